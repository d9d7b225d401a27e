#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference in
// kernels::scalar and, on x86-64, an AVX2+FMA variant in kernels::avx2.
// The unqualified entry points dispatch at runtime on CPU support.

#include <cstddef>
#include <span>
#include <string_view>

namespace levyld::kernels {

enum class Isa { scalar, avx2 };

// Shifted exponential sums over a sample: with y_i = scale * x_i and
// shift = max_i y_i, sum1 = sum exp(y_i - shift), sum2 = sum exp(2 (y_i - shift)).
struct ExpMoments {
  double shift = 0.0;
  double sum1 = 0.0;
  double sum2 = 0.0;
};

// Sum, and central second and fourth power sums about the sample mean.
struct CentralSums {
  double mean = 0.0;
  double m2 = 0.0;
  double m4 = 0.0;
};

// Coefficients of b l + s2/2 l^2 + sum_k rate_k (exp(l jump_k) - 1).
struct CumulantCoeffs {
  double drift = 0.0;
  double sigma2 = 0.0;
  std::span<const double> jumps;
  std::span<const double> rates;
};

namespace scalar {
void exp(std::span<const double> in, std::span<double> out);
void expm1(std::span<const double> in, std::span<double> out);
ExpMoments exp_moments(std::span<const double> x, double scale);
CentralSums central_sums(std::span<const double> x);
void cumulant_grid(const CumulantCoeffs& coeffs, std::span<const double> lambdas, std::span<double> out);
}  // namespace scalar

#if defined(LEVYLD_HAVE_AVX2)
namespace avx2 {
void exp(std::span<const double> in, std::span<double> out);
void expm1(std::span<const double> in, std::span<double> out);
ExpMoments exp_moments(std::span<const double> x, double scale);
CentralSums central_sums(std::span<const double> x);
void cumulant_grid(const CumulantCoeffs& coeffs, std::span<const double> lambdas, std::span<double> out);
}  // namespace avx2
#endif

bool avx2_supported();
Isa active_isa();
std::string_view isa_name(Isa isa);

// Pins dispatch to one variant (tests, benchmarks). Not thread-safe with
// concurrent kernel calls. Throws std::invalid_argument if unsupported.
void force_isa(Isa isa);
void reset_isa();

ExpMoments exp_moments(std::span<const double> x, double scale);
CentralSums central_sums(std::span<const double> x);
void cumulant_grid(const CumulantCoeffs& coeffs, std::span<const double> lambdas, std::span<double> out);

}  // namespace levyld::kernels

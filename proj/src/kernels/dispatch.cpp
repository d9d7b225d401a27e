#include <atomic>
#include <stdexcept>

#include "levyld/kernels/kernels.hpp"

namespace levyld::kernels {

namespace {

// -1 means "not forced"; otherwise the Isa value.
std::atomic<int> g_forced{-1};

Isa detect() {
  return avx2_supported() ? Isa::avx2 : Isa::scalar;
}

}  // namespace

bool avx2_supported() {
#if defined(LEVYLD_HAVE_AVX2)
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

Isa active_isa() {
  const int forced = g_forced.load(std::memory_order_relaxed);
  if (forced >= 0) return static_cast<Isa>(forced);
  static const Isa detected = detect();
  return detected;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::avx2:
      return "avx2";
    case Isa::scalar:
      break;
  }
  return "scalar";
}

void force_isa(Isa isa) {
  if (isa == Isa::avx2 && !avx2_supported()) throw std::invalid_argument("AVX2 kernels unavailable on this CPU");
  g_forced.store(static_cast<int>(isa), std::memory_order_relaxed);
}

void reset_isa() { g_forced.store(-1, std::memory_order_relaxed); }

ExpMoments exp_moments(std::span<const double> x, double scale) {
#if defined(LEVYLD_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::exp_moments(x, scale);
#endif
  return scalar::exp_moments(x, scale);
}

CentralSums central_sums(std::span<const double> x) {
#if defined(LEVYLD_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::central_sums(x);
#endif
  return scalar::central_sums(x);
}

void cumulant_grid(const CumulantCoeffs& coeffs, std::span<const double> lambdas, std::span<double> out) {
  if (out.size() < lambdas.size()) throw std::invalid_argument("cumulant_grid: output span too short");
#if defined(LEVYLD_HAVE_AVX2)
  if (active_isa() == Isa::avx2) return avx2::cumulant_grid(coeffs, lambdas, out);
#endif
  scalar::cumulant_grid(coeffs, lambdas, out);
}

}  // namespace levyld::kernels

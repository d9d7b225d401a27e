#pragma once

#include <span>
#include <vector>

#include "levyld/chain.hpp"
#include "levyld/jump_model.hpp"
#include "levyld/test_function.hpp"

namespace levyld {

/// Averaged limit triple (drift, variance, jump measure) and the averages
/// it is built from.
///
/// The limit exponential generator acts on a test function only through its
/// slope p = phi'(u):
///   H(p) = drift p + sigma2/2 p^2 + sum_k rate_k (exp(p jump_k) - 1),
/// which is also the cumulant of the limit Levy process.
struct LimitGenerator {
  static constexpr double kMergeTolerance = 1e-12;

  double a_bar = 0.0;
  double a0_bar = 0.0;
  double c_bar = 0.0;
  double c0_bar = 0.0;
  // sum_x pi(x) a1(x) (R0 a1)(x)
  double switching = 0.0;
  double drift = 0.0;
  double sigma2 = 0.0;
  // Sorted by jump size; sizes within kMergeTolerance are merged.
  std::vector<Atom> measure;

  // Triple given directly, e.g. a pure Gaussian or a tilted model. The
  // averages are filled so that a_bar = drift + sum jump*rate.
  static LimitGenerator from_triple(double drift, double sigma2, std::vector<Atom> atoms);

  [[nodiscard]] double total_mass() const;
};

// Throws SolvabilityViolated if the balance condition fails and
// NonPositiveVariance if sigma2 <= 0.
LimitGenerator limit_generator(const JumpModel& model, const ChainAnalysis& analysis);

// Sorts atoms by jump size and sums intensities of coincident sizes.
std::vector<Atom> merge_atoms(std::vector<Atom> atoms, double tolerance = LimitGenerator::kMergeTolerance);

double cumulant(const LimitGenerator& gen, double lambda);
double cumulant_d1(const LimitGenerator& gen, double lambda);
double cumulant_d2(const LimitGenerator& gen, double lambda);

// Cumulant over a grid through the SIMD dispatch layer.
std::vector<double> cumulant_grid(const LimitGenerator& gen, std::span<const double> lambdas);

double apply_h0(const LimitGenerator& gen, const TestFunction& phi, double u);

// Per-state generator with (a - a0), (c - c0) and gamma0(.; x).
double apply_h_gamma(const JumpModel& model, std::size_t x, const TestFunction& phi, double u);
double h_gamma_slope(const JumpModel& model, std::size_t x, double slope);

}  // namespace levyld

#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "levyld/limit_gen.hpp"

namespace levyld {

// I(x) = sup_l [l x - H(l)] with its maximiser l* solving H'(l*) = x.
struct RatePoint {
  double x = 0.0;
  double rate = 0.0;
  double lambda_star = 0.0;
};

// Safeguarded Newton on H'(l) = x inside a bracket grown by doubling from 0.
// Throws NonPositiveVariance if sigma2 <= 0, NoConvergence after 200 steps.
RatePoint rate_function(const LimitGenerator& gen, double x);

std::vector<RatePoint> rate_table(const LimitGenerator& gen, std::span<const double> xs);

// sup_x [lambda x - I(x)]: best grid node, then golden-section refinement
// between its neighbours. Approximates H(lambda) from below.
double legendre_on_grid(const LimitGenerator& gen, double lambda, std::span<const double> x_grid);

/// Exponentially tilted limit triple: drift b + lambda sigma2, atom rates
/// rate_k exp(lambda jump_k), same sigma2. Its mean is H'(lambda).
struct TiltedModel {
  double lambda = 0.0;
  double drift = 0.0;
  double sigma2 = 0.0;
  std::vector<Atom> measure;

  [[nodiscard]] double mean() const;
  [[nodiscard]] LimitGenerator as_generator() const;
};

TiltedModel tilt(const LimitGenerator& gen, double lambda);

struct TailEstimate {
  double probability = 0.0;
  double std_error = 0.0;
  // -(1/t) ln probability; +inf when no hits.
  double decay_rate = 0.0;
};

// Plain Monte Carlo estimate of P(xi0(t) >= level * t) for xi0(0) = 0.
TailEstimate tail_probability_direct(const LimitGenerator& gen, double level, double horizon, std::size_t paths,
                                     std::uint64_t seed, unsigned batches = 1);

// Importance sampling under the tilt at lambda, with likelihood ratio
// exp(-lambda xi + t H(lambda)).
TailEstimate tail_probability_tilted(const LimitGenerator& gen, double level, double horizon, double lambda,
                                     std::size_t paths, std::uint64_t seed, unsigned batches = 1);

// x,rate,lambda_star
void write_rate_csv(std::span<const RatePoint> rows, std::ostream& out);

}  // namespace levyld

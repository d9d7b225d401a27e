#include "levyld/ldp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "levyld/csv.hpp"
#include "levyld/errors.hpp"
#include "levyld/simulate.hpp"

namespace levyld {

namespace {

constexpr int kMaxIterations = 200;

TailEstimate finish(double sum, double sum_sq, std::size_t paths, double horizon) {
  const double n = static_cast<double>(paths);
  TailEstimate est;
  est.probability = sum / n;
  const double var = paths > 1 ? std::max(0.0, (sum_sq / n - est.probability * est.probability) * n / (n - 1.0)) : 0.0;
  est.std_error = std::sqrt(var / n);
  est.decay_rate = est.probability > 0.0 ? -std::log(est.probability) / horizon
                                         : std::numeric_limits<double>::infinity();
  return est;
}

}  // namespace

RatePoint rate_function(const LimitGenerator& gen, double x) {
  if (!(gen.sigma2 > 0.0)) throw NonPositiveVariance("rate function needs sigma^2 > 0");
  const double tol = 1e-10 * (1.0 + std::abs(x));
  auto f = [&](double l) { return cumulant_d1(gen, l) - x; };

  RatePoint out{x, 0.0, 0.0};
  const double f0 = f(0.0);
  if (std::abs(f0) <= tol) {
    // H(0) = 0, so the mean carries zero cost.
    return out;
  }

  // H' is increasing: grow the bracket away from 0 until it straddles x.
  double lo = 0.0;
  double hi = 0.0;
  int it = 0;
  if (f0 < 0.0) {
    hi = 1.0;
    while (f(hi) < 0.0) {
      lo = hi;
      hi *= 2.0;
      if (++it > kMaxIterations) throw NoConvergence("cannot bracket the dual variable");
    }
  } else {
    lo = -1.0;
    while (f(lo) > 0.0) {
      hi = lo;
      lo *= 2.0;
      if (++it > kMaxIterations) throw NoConvergence("cannot bracket the dual variable");
    }
  }

  double l = 0.5 * (lo + hi);
  for (it = 0; it < kMaxIterations; ++it) {
    const double fl = f(l);
    if (std::abs(fl) <= tol) {
      out.lambda_star = l;
      out.rate = l * x - cumulant(gen, l);
      return out;
    }
    if (fl < 0.0) {
      lo = l;
    } else {
      hi = l;
    }
    const double newton = l - fl / cumulant_d2(gen, l);
    l = (newton > lo && newton < hi) ? newton : 0.5 * (lo + hi);
  }
  std::ostringstream msg;
  msg << "rate function did not converge at x = " << x;
  throw NoConvergence(msg.str());
}

std::vector<RatePoint> rate_table(const LimitGenerator& gen, std::span<const double> xs) {
  std::vector<RatePoint> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(rate_function(gen, x));
  return out;
}

double legendre_on_grid(const LimitGenerator& gen, double lambda, std::span<const double> x_grid) {
  if (x_grid.empty()) throw InvalidModel("x grid is empty");
  const auto objective = [&](double x) { return lambda * x - rate_function(gen, x).rate; };
  std::size_t best_k = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < x_grid.size(); ++k) {
    const double v = objective(x_grid[k]);
    if (v > best) {
      best = v;
      best_k = k;
    }
  }
  // The objective is concave; refine between the neighbours of the best node.
  double lo = x_grid[best_k > 0 ? best_k - 1 : best_k];
  double hi = x_grid[best_k + 1 < x_grid.size() ? best_k + 1 : best_k];
  if (lo > hi) std::swap(lo, hi);
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = hi - ratio * (hi - lo);
  double b = lo + ratio * (hi - lo);
  double fa = objective(a);
  double fb = objective(b);
  for (int it = 0; it < 100 && hi - lo > 1e-12 * (1.0 + std::abs(lo)); ++it) {
    if (fa < fb) {
      lo = a;
      a = b;
      fa = fb;
      b = lo + ratio * (hi - lo);
      fb = objective(b);
    } else {
      hi = b;
      b = a;
      fb = fa;
      a = hi - ratio * (hi - lo);
      fa = objective(a);
    }
  }
  return std::max({best, fa, fb});
}

double TiltedModel::mean() const {
  double m = drift;
  for (const Atom& atom : measure) m += atom.jump * atom.rate;
  return m;
}

LimitGenerator TiltedModel::as_generator() const { return LimitGenerator::from_triple(drift, sigma2, measure); }

TiltedModel tilt(const LimitGenerator& gen, double lambda) {
  TiltedModel out;
  out.lambda = lambda;
  out.drift = gen.drift + lambda * gen.sigma2;
  out.sigma2 = gen.sigma2;
  for (const Atom& atom : gen.measure) out.measure.push_back({atom.jump, atom.rate * std::exp(lambda * atom.jump)});
  return out;
}

TailEstimate tail_probability_direct(const LimitGenerator& gen, double level, double horizon, std::size_t paths,
                                     std::uint64_t seed, unsigned batches) {
  SimConfig cfg;
  cfg.horizon = horizon;
  cfg.paths = paths;
  cfg.seed = seed;
  cfg.batches = batches;
  const std::vector<double> xi = simulate_limit(gen, cfg);
  double hits = 0.0;
  for (double v : xi) hits += v >= level * horizon ? 1.0 : 0.0;
  return finish(hits, hits, paths, horizon);
}

TailEstimate tail_probability_tilted(const LimitGenerator& gen, double level, double horizon, double lambda,
                                     std::size_t paths, std::uint64_t seed, unsigned batches) {
  SimConfig cfg;
  cfg.horizon = horizon;
  cfg.paths = paths;
  cfg.seed = seed;
  cfg.batches = batches;
  const std::vector<double> xi = simulate_limit(tilt(gen, lambda).as_generator(), cfg);
  const double log_norm = horizon * cumulant(gen, lambda);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double v : xi) {
    if (v < level * horizon) continue;
    const double w = std::exp(-lambda * v + log_norm);
    sum += w;
    sum_sq += w * w;
  }
  return finish(sum, sum_sq, paths, horizon);
}

void write_rate_csv(std::span<const RatePoint> rows, std::ostream& out) {
  out << "x,rate,lambda_star\n";
  for (const RatePoint& r : rows) {
    out << format_double(r.x) << ',' << format_double(r.rate) << ',' << format_double(r.lambda_star) << '\n';
  }
}

}  // namespace levyld

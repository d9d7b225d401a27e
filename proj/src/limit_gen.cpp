#include "levyld/limit_gen.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "levyld/errors.hpp"
#include "levyld/kernels/kernels.hpp"

namespace levyld {

std::vector<Atom> merge_atoms(std::vector<Atom> atoms, double tolerance) {
  std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& l, const Atom& r) { return l.jump < r.jump; });
  std::vector<Atom> out;
  for (const Atom& atom : atoms) {
    if (!out.empty() && std::abs(atom.jump - out.back().jump) <= tolerance) {
      out.back().rate += atom.rate;
    } else {
      out.push_back(atom);
    }
  }
  return out;
}

LimitGenerator LimitGenerator::from_triple(double drift, double sigma2, std::vector<Atom> atoms) {
  LimitGenerator gen;
  gen.drift = drift;
  gen.sigma2 = sigma2;
  gen.measure = merge_atoms(std::move(atoms));
  for (const Atom& atom : gen.measure) {
    gen.a0_bar += atom.jump * atom.rate;
    gen.c0_bar += atom.jump * atom.jump * atom.rate;
  }
  gen.a_bar = drift + gen.a0_bar;
  gen.c_bar = sigma2 + gen.c0_bar;
  return gen;
}

double LimitGenerator::total_mass() const {
  double m = 0.0;
  for (const Atom& atom : measure) m += atom.rate;
  return m;
}

LimitGenerator limit_generator(const JumpModel& model, const ChainAnalysis& analysis) {
  if (static_cast<Eigen::Index>(model.size()) != analysis.pi.size()) {
    throw InvalidModel("jump model and chain have different state counts");
  }
  const double balance = analysis.pi.dot(model.a1());
  if (std::abs(balance) > ValidationReport::kBalanceTolerance) {
    std::ostringstream msg;
    msg << "balance condition fails: sum pi a1 = " << balance;
    throw SolvabilityViolated(msg.str());
  }

  LimitGenerator gen;
  std::vector<Atom> mixture;
  for (std::size_t x = 0; x < model.size(); ++x) {
    const double p = analysis.pi(static_cast<Eigen::Index>(x));
    const StateJumps& s = model.state(x);
    gen.a_bar += p * s.a;
    gen.a0_bar += p * s.a0();
    gen.c_bar += p * s.c;
    gen.c0_bar += p * s.c0();
    for (const Atom& atom : s.gamma0) mixture.push_back({atom.jump, p * atom.rate});
  }
  gen.switching = switching_variance(model, analysis);
  gen.drift = gen.a_bar - gen.a0_bar;
  gen.sigma2 = (gen.c_bar - gen.c0_bar) + 2.0 * gen.switching;
  gen.measure = merge_atoms(std::move(mixture));
  if (!(gen.sigma2 > 0.0)) {
    std::ostringstream msg;
    msg << "limit variance sigma^2 = " << gen.sigma2 << " is not positive";
    throw NonPositiveVariance(msg.str());
  }
  return gen;
}

double cumulant(const LimitGenerator& gen, double lambda) {
  double h = gen.drift * lambda + 0.5 * gen.sigma2 * lambda * lambda;
  for (const Atom& atom : gen.measure) h += atom.rate * std::expm1(lambda * atom.jump);
  return h;
}

double cumulant_d1(const LimitGenerator& gen, double lambda) {
  double h = gen.drift + gen.sigma2 * lambda;
  for (const Atom& atom : gen.measure) h += atom.rate * atom.jump * std::exp(lambda * atom.jump);
  return h;
}

double cumulant_d2(const LimitGenerator& gen, double lambda) {
  double h = gen.sigma2;
  for (const Atom& atom : gen.measure) h += atom.rate * atom.jump * atom.jump * std::exp(lambda * atom.jump);
  return h;
}

std::vector<double> cumulant_grid(const LimitGenerator& gen, std::span<const double> lambdas) {
  std::vector<double> jumps;
  std::vector<double> rates;
  for (const Atom& atom : gen.measure) {
    jumps.push_back(atom.jump);
    rates.push_back(atom.rate);
  }
  std::vector<double> out(lambdas.size());
  kernels::cumulant_grid({gen.drift, gen.sigma2, jumps, rates}, lambdas, out);
  return out;
}

double apply_h0(const LimitGenerator& gen, const TestFunction& phi, double u) {
  return cumulant(gen, phi.d1(u));
}

double h_gamma_slope(const JumpModel& model, std::size_t x, double slope) {
  const StateJumps& s = model.state(x);
  double h = (s.a - s.a0()) * slope + 0.5 * (s.c - s.c0()) * slope * slope;
  for (const Atom& atom : s.gamma0) h += atom.rate * std::expm1(slope * atom.jump);
  return h;
}

double apply_h_gamma(const JumpModel& model, std::size_t x, const TestFunction& phi, double u) {
  return h_gamma_slope(model, x, phi.d1(u));
}

}  // namespace levyld

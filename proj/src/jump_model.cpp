#include "levyld/jump_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "levyld/errors.hpp"

namespace levyld {

double StateJumps::a0() const {
  double s = 0.0;
  for (const Atom& atom : gamma0) s += atom.jump * atom.rate;
  return s;
}

double StateJumps::c0() const {
  double s = 0.0;
  for (const Atom& atom : gamma0) s += atom.jump * atom.jump * atom.rate;
  return s;
}

JumpModel::JumpModel(std::vector<StateJumps> states) : states_(std::move(states)) {
  if (states_.empty()) throw InvalidModel("jump model needs at least one state");
  for (std::size_t x = 0; x < states_.size(); ++x) {
    const StateJumps& s = states_[x];
    if (!std::isfinite(s.a1) || !std::isfinite(s.a) || !std::isfinite(s.c)) {
      std::ostringstream msg;
      msg << "state " << x << ": a1, a, c must be finite";
      throw InvalidModel(msg.str());
    }
    for (const Atom& atom : s.gamma0) {
      if (!std::isfinite(atom.jump) || !std::isfinite(atom.rate) || atom.rate < 0.0) {
        std::ostringstream msg;
        msg << "state " << x << ": gamma0 atom (" << atom.jump << ", " << atom.rate
            << ") must be finite with non-negative rate";
        throw InvalidModel(msg.str());
      }
    }
  }
}

Vector JumpModel::a1() const {
  Vector out(static_cast<Eigen::Index>(states_.size()));
  for (std::size_t x = 0; x < states_.size(); ++x) out(static_cast<Eigen::Index>(x)) = states_[x].a1;
  return out;
}

double JumpModel::positivity_margin() const {
  double margin = std::numeric_limits<double>::infinity();
  for (const StateJumps& s : states_) margin = std::min(margin, s.c - s.c0() - std::abs(s.a1));
  return margin;
}

double PrelimitMeasure::total_mass(std::size_t x) const {
  double m = 0.0;
  for (const Atom& atom : atoms.at(x)) m += atom.rate;
  return m;
}

double PrelimitMeasure::mean(std::size_t x) const {
  double m = 0.0;
  for (const Atom& atom : atoms.at(x)) m += atom.jump * atom.rate;
  return m;
}

double PrelimitMeasure::second_moment(std::size_t x) const {
  double m = 0.0;
  for (const Atom& atom : atoms.at(x)) m += atom.jump * atom.jump * atom.rate;
  return m;
}

PrelimitMeasure build_prelimit(const JumpModel& model, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidModel("delta must be positive");
  PrelimitMeasure out;
  out.delta = delta;
  const double d2 = delta * delta;
  for (std::size_t x = 0; x < model.size(); ++x) {
    const StateJumps& s = model.state(x);
    const double spread = s.c - s.c0();
    const double drift = s.a1 + delta * (s.a - s.a0());
    if (spread < std::abs(drift)) {
      std::ostringstream msg;
      msg << "state " << x << ": c - c0 = " << spread << " < |a1 + delta (a - a0)| = "
          << std::abs(drift) << " at delta = " << delta;
      throw NegativeIntensity(msg.str());
    }
    const double lp = 0.5 * (spread + drift);
    const double lm = 0.5 * (spread - drift);
    out.plus.push_back(lp);
    out.minus.push_back(lm);

    std::vector<Atom> atoms{{delta, lp}, {-delta, lm}};
    for (const Atom& atom : s.gamma0) atoms.push_back({atom.jump, d2 * atom.rate});
    out.atoms.push_back(std::move(atoms));
  }
  return out;
}

double switching_variance(const JumpModel& model, const ChainAnalysis& analysis) {
  const Vector a1 = model.a1();
  const Vector r0a1 = analysis.potential * a1;
  return analysis.pi.dot(a1.cwiseProduct(r0a1));
}

std::vector<std::string> ValidationReport::failures() const {
  std::vector<std::string> out;
  if (!balance_ok) {
    std::ostringstream msg;
    msg << "LA3 balance: |sum pi a1| = " << balance_residual;
    out.push_back(msg.str());
  }
  if (!square_integrable) out.emplace_back("C3 uniform square integrability");
  if (!exponentially_finite) out.emplace_back("C4 exponential finiteness");
  if (!positivity_ok) {
    std::ostringstream msg;
    msg << "positivity: min(c - c0 - |a1|) = " << positivity_margin << " must be > 0";
    out.push_back(msg.str());
  }
  if (!variance_ok) {
    std::ostringstream msg;
    msg << "variance: sigma^2 = " << sigma2 << " must be > 0";
    out.push_back(msg.str());
  }
  return out;
}

ValidationReport validate_conditions(const JumpModel& model, const ChainAnalysis& analysis) {
  if (static_cast<Eigen::Index>(model.size()) != analysis.pi.size()) {
    throw InvalidModel("jump model and chain have different state counts");
  }
  ValidationReport r;
  r.balance_residual = std::abs(analysis.pi.dot(model.a1()));
  r.balance_ok = r.balance_residual <= ValidationReport::kBalanceTolerance;

  for (const StateJumps& s : model.states()) {
    for (const Atom& atom : s.gamma0) r.max_abs_jump = std::max(r.max_abs_jump, std::abs(atom.jump));
  }
  r.positivity_margin = model.positivity_margin();
  r.positivity_ok = r.positivity_margin > 0.0;

  double c_bar = 0.0;
  double c0_bar = 0.0;
  for (std::size_t x = 0; x < model.size(); ++x) {
    const double p = analysis.pi(static_cast<Eigen::Index>(x));
    c_bar += p * model.state(x).c;
    c0_bar += p * model.state(x).c0();
  }
  r.sigma2 = (c_bar - c0_bar) + 2.0 * switching_variance(model, analysis);
  r.variance_ok = r.sigma2 > 0.0;
  return r;
}

}  // namespace levyld

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "levyld/chain.hpp"

namespace levyld {

// One atom of a finite jump measure: mass `rate` at jump size `jump`.
struct Atom {
  double jump = 0.0;
  double rate = 0.0;
};

/// Levy approximation data attached to one switching state.
///
/// `a1` is the first-order drift that must average out under pi, `a` and `c`
/// are the second-order drift and second-moment coefficients, and `gamma0`
/// is the residual jump measure that survives the limit.
struct StateJumps {
  double a1 = 0.0;
  double a = 0.0;
  double c = 0.0;
  std::vector<Atom> gamma0;

  // First and second moments of gamma0.
  [[nodiscard]] double a0() const;
  [[nodiscard]] double c0() const;
};

class JumpModel {
 public:
  // Throws InvalidModel on non-finite coefficients or negative atom rates.
  explicit JumpModel(std::vector<StateJumps> states);

  [[nodiscard]] std::size_t size() const { return states_.size(); }
  [[nodiscard]] const StateJumps& state(std::size_t x) const { return states_.at(x); }
  [[nodiscard]] const std::vector<StateJumps>& states() const { return states_; }

  [[nodiscard]] Vector a1() const;

  // min_x (c - c0 - |a1|); the pre-limit family needs this strictly positive.
  [[nodiscard]] double positivity_margin() const;

 private:
  std::vector<StateJumps> states_;
};

/// Concrete jump measure Gamma^delta(dv; x).
///
/// Each state carries atoms at +delta and -delta with intensities
/// plus/minus, followed by the gamma0 atoms scaled by delta^2. First and
/// second moments equal delta*a1 + delta^2*a and delta^2*c exactly.
struct PrelimitMeasure {
  double delta = 0.0;
  std::vector<double> plus;
  std::vector<double> minus;
  std::vector<std::vector<Atom>> atoms;

  [[nodiscard]] std::size_t size() const { return atoms.size(); }
  [[nodiscard]] double total_mass(std::size_t x) const;
  [[nodiscard]] double mean(std::size_t x) const;
  [[nodiscard]] double second_moment(std::size_t x) const;
};

// Throws NegativeIntensity when c - c0 < |a1 + delta (a - a0)| in some state.
PrelimitMeasure build_prelimit(const JumpModel& model, double delta);

// sum_x pi(x) a1(x) (R0 a1)(x): the switching contribution to the variance.
double switching_variance(const JumpModel& model, const ChainAnalysis& analysis);

struct ValidationReport {
  static constexpr double kBalanceTolerance = 1e-10;

  double balance_residual = 0.0;
  bool balance_ok = false;
  // Finite-atom measures always satisfy uniform square integrability and
  // exponential finiteness; these are recorded for the report.
  bool square_integrable = true;
  bool exponentially_finite = true;
  double max_abs_jump = 0.0;
  double positivity_margin = 0.0;
  bool positivity_ok = false;
  double sigma2 = 0.0;
  bool variance_ok = false;

  [[nodiscard]] bool passed() const {
    return balance_ok && square_integrable && exponentially_finite && positivity_ok && variance_ok;
  }
  // Human-readable names of failing conditions, e.g. "LA3 balance".
  [[nodiscard]] std::vector<std::string> failures() const;
};

ValidationReport validate_conditions(const JumpModel& model, const ChainAnalysis& analysis);

}  // namespace levyld

#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "levyld/chain.hpp"
#include "levyld/jump_model.hpp"
#include "levyld/limit_gen.hpp"
#include "levyld/test_function.hpp"

namespace levyld {

// Small parameters (eps, delta) with delta/eps held in [0.5, 2].
struct ScalePair {
  double eps;
  double delta;

  // Throws InvalidModel outside the admissible regime.
  static ScalePair make(double eps, double delta);
  [[nodiscard]] double ratio() const { return delta / eps; }
};

// delta = ratio * eps. Parsed from "equal" or "ratio:<r>".
struct DeltaRule {
  double ratio = 1.0;

  static DeltaRule parse(const std::string& text);
  [[nodiscard]] std::string name() const;
  [[nodiscard]] ScalePair apply(double eps) const { return ScalePair::make(eps, ratio * eps); }
};

/// phi(u) + eps * ln(1 + delta*phi1(u,x) + delta^2*phi2(u,x)).
///
/// The correctors solve the singular-perturbation hierarchy
///   Q phi1 + a1 phi' = 0,
///   Q phi2 + a1 (R0 a1) phi'^2 + H_Gamma(x) phi - H0 phi = 0,
/// so phi1 = (R0 a1) phi' and phi2 = -R0 psi_u with
/// psi_u(x) = H0 phi - H_Gamma(x) phi - a1(x) (R0 a1)(x) phi'^2.
/// Both depend on u only through phi'(u).
class PerturbedTestFunction {
 public:
  PerturbedTestFunction(TestFunction phi, const ChainModel& chain, JumpModel model, ChainAnalysis analysis,
                        LimitGenerator gen);

  [[nodiscard]] const TestFunction& base() const { return phi_; }
  [[nodiscard]] const Matrix& generator() const { return q_; }
  [[nodiscard]] const JumpModel& model() const { return model_; }
  [[nodiscard]] const ChainAnalysis& analysis() const { return analysis_; }
  [[nodiscard]] const LimitGenerator& limit() const { return gen_; }
  [[nodiscard]] std::size_t size() const { return model_.size(); }

  [[nodiscard]] Vector phi1(double u) const;
  [[nodiscard]] Vector psi(double u) const;
  [[nodiscard]] Vector phi2(double u) const;
  // W(u, .) = 1 + delta phi1 + delta^2 phi2
  [[nodiscard]] Vector weight(double u, const ScalePair& scales) const;
  [[nodiscard]] double value(double u, std::size_t x, const ScalePair& scales) const;

  // Q phi1 + a1 phi'
  [[nodiscard]] Vector first_order_residual(double u) const;
  // Q phi2 + a1 (R0 a1) phi'^2 + H_Gamma phi - H0 phi
  [[nodiscard]] Vector second_order_residual(double u) const;

 private:
  TestFunction phi_;
  Matrix q_;
  JumpModel model_;
  ChainAnalysis analysis_;
  LimitGenerator gen_;
  Vector a1_;
  Vector r0a1_;
  Vector drift_correction_;
};

// Throws SolvabilityViolated when the balance condition fails.
PerturbedTestFunction build_perturbed(const TestFunction& phi, const ChainModel& chain, const JumpModel& model,
                                      const ChainAnalysis& analysis, const LimitGenerator& gen);

// exp(-phi_eps/eps) eps^-2 Q exp(phi_eps/eps) at (u, x). Exact.
double apply_prelimit_q(const PerturbedTestFunction& ptf, const ScalePair& scales, double u, std::size_t x);

// exp(-phi_eps/eps) eps Gamma_eps(x) exp(phi_eps/eps) at (u, x) for the
// measure built at scales.delta. Exact.
double apply_prelimit_gamma(const PerturbedTestFunction& ptf, const PrelimitMeasure& measure,
                            const ScalePair& scales, double u, std::size_t x);

// Relative defect of the exact algebraic expansion of apply_prelimit_q,
// including its closed-form remainder.
double lemma1_identity_check(const PerturbedTestFunction& ptf, const ScalePair& scales, double u, std::size_t x);

// apply_prelimit_gamma - [H_Gamma(x) phi + eps^-1 a1(x) phi'].
double lemma2_residual(const PerturbedTestFunction& ptf, const PrelimitMeasure& measure, const ScalePair& scales,
                       double u, std::size_t x);

struct ConvergenceRow {
  double eps = 0.0;
  double delta = 0.0;
  double max_residual = 0.0;
  double argmax_u = 0.0;
  std::size_t argmax_state = 0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  // Least-squares slope of log r against log eps; empty when fewer than two
  // positive residuals exist.
  std::optional<double> fitted_order;

  [[nodiscard]] bool strictly_decreasing() const;
  // Strict decrease, except that rows at or below `floor` count as
  // converged.
  [[nodiscard]] bool decreasing_to_floor(double floor = kRoundoffFloor) const;

  static constexpr double kRoundoffFloor = 1e-12;
};

enum class ResidualKind { theorem, lemma2 };

// Lower bound on W over the probe grid; smaller values reject the scale.
inline constexpr double kWeightFloor = 0.5;

// For each eps, the max over u_grid and states of the chosen residual. The
// full pre-limit generator is compared against H0 phi(u) for `theorem`.
// Throws DomainError if W < kWeightFloor anywhere on the grid.
ConvergenceReport residual_sweep(const PerturbedTestFunction& ptf, std::span<const double> eps_list,
                                 const DeltaRule& rule, std::span<const double> u_grid,
                                 ResidualKind kind = ResidualKind::theorem);

ConvergenceReport theorem_residual_sweep(const TestFunction& phi, const ChainModel& chain, const JumpModel& model,
                                         const ChainAnalysis& analysis, const LimitGenerator& gen,
                                         std::span<const double> eps_list, const DeltaRule& rule,
                                         std::span<const double> u_grid);

std::optional<double> fit_order(std::span<const double> eps, std::span<const double> residuals);

// Default probe grid u in [-2, 2] step 0.1.
std::vector<double> default_u_grid();

// CSV: eps,delta,max_residual,argmax_u,argmax_state,fitted_order
void write_convergence_csv(const ConvergenceReport& report, std::ostream& out);

}  // namespace levyld

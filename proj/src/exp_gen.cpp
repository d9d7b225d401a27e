#include "levyld/exp_gen.hpp"

#include <cmath>
#include <sstream>

#include "levyld/csv.hpp"
#include "levyld/errors.hpp"

namespace levyld {

namespace {

constexpr double kExponentLimit = 700.0;

double min_weight(const Vector& w) { return w.minCoeff(); }

void require_positive(const Vector& w, double u) {
  if (!(min_weight(w) > 0.0)) {
    std::ostringstream msg;
    msg << "perturbed logarithm argument " << min_weight(w) << " <= 0 at u = " << u;
    throw DomainError(msg.str());
  }
}

}  // namespace

ScalePair ScalePair::make(double eps, double delta) {
  if (!(eps > 0.0) || !(delta > 0.0) || !std::isfinite(eps) || !std::isfinite(delta)) {
    throw InvalidModel("eps and delta must be positive");
  }
  const double r = delta / eps;
  if (r < 0.5 || r > 2.0) {
    std::ostringstream msg;
    msg << "delta/eps = " << r << " outside [0.5, 2]";
    throw InvalidModel(msg.str());
  }
  return {eps, delta};
}

DeltaRule DeltaRule::parse(const std::string& text) {
  if (text == "equal") return {1.0};
  const std::string prefix = "ratio:";
  if (text.rfind(prefix, 0) == 0) {
    try {
      std::size_t used = 0;
      const std::string tail = text.substr(prefix.size());
      const double r = std::stod(tail, &used);
      if (used == tail.size() && r >= 0.5 && r <= 2.0) return {r};
    } catch (const std::exception&) {
    }
  }
  throw InvalidModel("delta_rule must be 'equal' or 'ratio:<r>' with r in [0.5, 2], got '" + text + "'");
}

std::string DeltaRule::name() const {
  if (ratio == 1.0) return "equal";
  return "ratio:" + format_double(ratio);
}

PerturbedTestFunction::PerturbedTestFunction(TestFunction phi, const ChainModel& chain, JumpModel model,
                                             ChainAnalysis analysis, LimitGenerator gen)
    : phi_(phi),
      q_(chain.generator()),
      model_(std::move(model)),
      analysis_(std::move(analysis)),
      gen_(std::move(gen)) {
  a1_ = model_.a1();
  r0a1_ = analysis_.potential * a1_;
  drift_correction_ = a1_.cwiseProduct(r0a1_);
}

Vector PerturbedTestFunction::phi1(double u) const { return r0a1_ * phi_.d1(u); }

Vector PerturbedTestFunction::psi(double u) const {
  const double p = phi_.d1(u);
  const double h0 = cumulant(gen_, p);
  Vector out(static_cast<Eigen::Index>(size()));
  for (std::size_t x = 0; x < size(); ++x) {
    const auto i = static_cast<Eigen::Index>(x);
    out(i) = h0 - h_gamma_slope(model_, x, p) - drift_correction_(i) * p * p;
  }
  return out;
}

Vector PerturbedTestFunction::phi2(double u) const { return solve_poisson(analysis_, psi(u)); }

Vector PerturbedTestFunction::weight(double u, const ScalePair& scales) const {
  const double d = scales.delta;
  return Vector::Ones(static_cast<Eigen::Index>(size())) + d * phi1(u) + (d * d) * phi2(u);
}

double PerturbedTestFunction::value(double u, std::size_t x, const ScalePair& scales) const {
  const Vector w = weight(u, scales);
  require_positive(w, u);
  return phi_.value(u) + scales.eps * std::log(w(static_cast<Eigen::Index>(x)));
}

Vector PerturbedTestFunction::first_order_residual(double u) const { return q_ * phi1(u) + a1_ * phi_.d1(u); }

Vector PerturbedTestFunction::second_order_residual(double u) const {
  const double p = phi_.d1(u);
  Vector out = q_ * phi2(u) + drift_correction_ * (p * p);
  const double h0 = cumulant(gen_, p);
  for (std::size_t x = 0; x < size(); ++x) {
    out(static_cast<Eigen::Index>(x)) += h_gamma_slope(model_, x, p) - h0;
  }
  return out;
}

PerturbedTestFunction build_perturbed(const TestFunction& phi, const ChainModel& chain, const JumpModel& model,
                                      const ChainAnalysis& analysis, const LimitGenerator& gen) {
  const double balance = analysis.pi.dot(model.a1());
  if (std::abs(balance) > ValidationReport::kBalanceTolerance) {
    std::ostringstream msg;
    msg << "first corrector unsolvable: sum pi a1 = " << balance;
    throw SolvabilityViolated(msg.str());
  }
  PerturbedTestFunction ptf(phi, chain, model, analysis, gen);
  // psi_u averages to zero exactly when gen is the limit of this model.
  (void)ptf.phi2(0.0);
  return ptf;
}

double apply_prelimit_q(const PerturbedTestFunction& ptf, const ScalePair& scales, double u, std::size_t x) {
  const Vector w = ptf.weight(u, scales);
  require_positive(w, u);
  const Matrix& q = ptf.generator();
  const auto i = static_cast<Eigen::Index>(x);
  double acc = 0.0;
  for (Eigen::Index y = 0; y < q.cols(); ++y) {
    if (y == i) continue;
    acc += q(i, y) * (w(y) - w(i));
  }
  return acc / w(i) / (scales.eps * scales.eps);
}

double apply_prelimit_gamma(const PerturbedTestFunction& ptf, const PrelimitMeasure& measure,
                            const ScalePair& scales, double u, std::size_t x) {
  const double eps = scales.eps;
  const double d = scales.delta;
  const auto i = static_cast<Eigen::Index>(x);
  const TestFunction& phi = ptf.base();

  const Vector phi1_u = ptf.phi1(u);
  const Vector phi2_u = ptf.phi2(u);
  const double w_u = 1.0 + d * phi1_u(i) + d * d * phi2_u(i);
  if (!(w_u > 0.0)) {
    std::ostringstream msg;
    msg << "perturbed logarithm argument " << w_u << " <= 0 at u = " << u;
    throw DomainError(msg.str());
  }

  double acc = 0.0;
  for (const Atom& atom : measure.atoms.at(x)) {
    if (atom.rate == 0.0) continue;
    const double shift = eps * atom.jump;
    const double exponent = phi.increment(u, shift) / eps;
    if (exponent > kExponentLimit) {
      std::ostringstream msg;
      msg << "exponent " << exponent << " exceeds " << kExponentLimit << " at eps = " << eps;
      throw OverflowGuard(msg.str());
    }
    // W(u + eps v)/W(u) - 1, formed from corrector increments.
    const double dw = d * (ptf.phi1(u + shift)(i) - phi1_u(i)) + d * d * (ptf.phi2(u + shift)(i) - phi2_u(i));
    if (!(w_u + dw > 0.0)) {
      std::ostringstream msg;
      msg << "perturbed logarithm argument " << (w_u + dw) << " <= 0 at u = " << (u + shift);
      throw DomainError(msg.str());
    }
    const double ratio_m1 = dw / w_u;
    // e^E * (1 + r) - 1 = expm1(E) * (1 + r) + r
    acc += atom.rate * (std::expm1(exponent) * (1.0 + ratio_m1) + ratio_m1);
  }
  return acc / (eps * eps);
}

double lemma1_identity_check(const PerturbedTestFunction& ptf, const ScalePair& scales, double u, std::size_t x) {
  const double lhs = apply_prelimit_q(ptf, scales, u, x);

  const double eps = scales.eps;
  const double d = scales.delta;
  const auto i = static_cast<Eigen::Index>(x);
  const Vector f1 = ptf.phi1(u);
  const Vector f2 = ptf.phi2(u);
  const double qf1 = (ptf.generator() * f1)(i);
  const double qf2 = (ptf.generator() * f2)(i);
  const double p1 = f1(i);
  const double p2 = f2(i);
  const double inv_e2 = 1.0 / (eps * eps);

  const double w = 1.0 + d * p1 + d * d * p2;
  const double theta = d * d * d * inv_e2 * (p1 * p1 + d * p1 * p2 - p2) / w * (qf1 + d * qf2) -
                       d * d * d * inv_e2 * p1 * qf2;
  const double rhs = d * inv_e2 * qf1 + d * d * inv_e2 * qf2 - d * d * inv_e2 * p1 * qf1 + theta;
  return std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

double lemma2_residual(const PerturbedTestFunction& ptf, const PrelimitMeasure& measure, const ScalePair& scales,
                       double u, std::size_t x) {
  const double pre = apply_prelimit_gamma(ptf, measure, scales, u, x);
  const double slope = ptf.base().d1(u);
  const double expansion = h_gamma_slope(ptf.model(), x, slope) + ptf.model().state(x).a1 * slope / scales.eps;
  return pre - expansion;
}

bool ConvergenceReport::strictly_decreasing() const {
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (!(rows[k].max_residual < rows[k - 1].max_residual)) return false;
  }
  return true;
}

bool ConvergenceReport::decreasing_to_floor(double floor) const {
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (rows[k].max_residual <= floor) continue;
    if (!(rows[k].max_residual < rows[k - 1].max_residual)) return false;
  }
  return true;
}

std::optional<double> fit_order(std::span<const double> eps, std::span<const double> residuals) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < eps.size() && k < residuals.size(); ++k) {
    if (!(residuals[k] > 0.0) || !(eps[k] > 0.0)) continue;
    const double lx = std::log(eps[k]);
    const double ly = std::log(residuals[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::nullopt;
  const double nn = static_cast<double>(n);
  const double denom = nn * sxx - sx * sx;
  if (denom <= 0.0) return std::nullopt;
  return (nn * sxy - sx * sy) / denom;
}

ConvergenceReport residual_sweep(const PerturbedTestFunction& ptf, std::span<const double> eps_list,
                                 const DeltaRule& rule, std::span<const double> u_grid, ResidualKind kind) {
  for (std::size_t k = 1; k < eps_list.size(); ++k) {
    if (!(eps_list[k] < eps_list[k - 1])) throw InvalidModel("eps list must be strictly decreasing");
  }
  if (u_grid.empty()) throw InvalidModel("probe grid is empty");

  ConvergenceReport report;
  for (double eps : eps_list) {
    const ScalePair scales = rule.apply(eps);
    const PrelimitMeasure measure = build_prelimit(ptf.model(), scales.delta);

    ConvergenceRow row{scales.eps, scales.delta, -1.0, 0.0, 0};
    for (double u : u_grid) {
      const Vector w = ptf.weight(u, scales);
      if (w.minCoeff() < kWeightFloor) {
        std::ostringstream msg;
        msg << "scale eps = " << eps << " rejected: perturbed logarithm argument " << w.minCoeff() << " < "
            << kWeightFloor << " at u = " << u;
        throw DomainError(msg.str());
      }
      const double h0 = apply_h0(ptf.limit(), ptf.base(), u);
      for (std::size_t x = 0; x < ptf.size(); ++x) {
        double r = 0.0;
        if (kind == ResidualKind::theorem) {
          r = apply_prelimit_q(ptf, scales, u, x) + apply_prelimit_gamma(ptf, measure, scales, u, x) - h0;
        } else {
          r = lemma2_residual(ptf, measure, scales, u, x);
        }
        r = std::abs(r);
        if (r > row.max_residual) {
          row.max_residual = r;
          row.argmax_u = u;
          row.argmax_state = x;
        }
      }
    }
    report.rows.push_back(row);
  }

  std::vector<double> e, r;
  for (const ConvergenceRow& row : report.rows) {
    e.push_back(row.eps);
    r.push_back(row.max_residual);
  }
  report.fitted_order = fit_order(e, r);
  return report;
}

ConvergenceReport theorem_residual_sweep(const TestFunction& phi, const ChainModel& chain, const JumpModel& model,
                                         const ChainAnalysis& analysis, const LimitGenerator& gen,
                                         std::span<const double> eps_list, const DeltaRule& rule,
                                         std::span<const double> u_grid) {
  const PerturbedTestFunction ptf = build_perturbed(phi, chain, model, analysis, gen);
  return residual_sweep(ptf, eps_list, rule, u_grid, ResidualKind::theorem);
}

std::vector<double> default_u_grid() {
  std::vector<double> grid;
  for (int k = -20; k <= 20; ++k) grid.push_back(0.1 * k);
  return grid;
}

void write_convergence_csv(const ConvergenceReport& report, std::ostream& out) {
  out << "eps,delta,max_residual,argmax_u,argmax_state,fitted_order\n";
  for (std::size_t k = 0; k < report.rows.size(); ++k) {
    const ConvergenceRow& row = report.rows[k];
    out << format_double(row.eps) << ',' << format_double(row.delta) << ',' << format_double(row.max_residual)
        << ',' << format_double(row.argmax_u) << ',' << row.argmax_state << ',';
    if (k + 1 == report.rows.size() && report.fitted_order) out << format_double(*report.fitted_order);
    out << '\n';
  }
}

}  // namespace levyld

#include "levyld/chain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "levyld/errors.hpp"

namespace levyld {

namespace {

constexpr double kMaxCondition = 1e12;
constexpr double kSolvabilityTolerance = 1e-9;

std::vector<bool> reachable(const Matrix& q, bool transpose) {
  const auto n = static_cast<std::size_t>(q.rows());
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const std::size_t x = stack.back();
    stack.pop_back();
    for (std::size_t y = 0; y < n; ++y) {
      const double rate = transpose ? q(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x))
                                    : q(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
      if (y != x && rate > 0.0 && !seen[y]) {
        seen[y] = true;
        stack.push_back(y);
      }
    }
  }
  return seen;
}

}  // namespace

ChainModel::ChainModel(Matrix q) : q_(std::move(q)) {
  if (q_.rows() < 1 || q_.rows() != q_.cols()) {
    std::ostringstream msg;
    msg << "rate matrix must be square with at least one state, got " << q_.rows() << "x"
        << q_.cols();
    throw InvalidModel(msg.str());
  }
  for (Eigen::Index x = 0; x < q_.rows(); ++x) {
    double row_sum = 0.0;
    for (Eigen::Index y = 0; y < q_.cols(); ++y) {
      const double rate = q_(x, y);
      if (!std::isfinite(rate)) throw InvalidModel("rate matrix has a non-finite entry");
      if (x != y && rate < 0.0) {
        std::ostringstream msg;
        msg << "negative off-diagonal rate Q(" << x << "," << y << ") = " << rate;
        throw InvalidModel(msg.str());
      }
      row_sum += rate;
    }
    if (std::abs(row_sum) > kRowSumTolerance) {
      std::ostringstream msg;
      msg << "row " << x << " of Q sums to " << row_sum << ", expected 0";
      throw InvalidModel(msg.str());
    }
  }
}

double ChainModel::exit_rate(std::size_t x) const {
  const auto i = static_cast<Eigen::Index>(x);
  return -q_(i, i);
}

double ChainModel::jump_probability(std::size_t from, std::size_t to) const {
  if (from == to) return 0.0;
  const double q = exit_rate(from);
  if (q <= 0.0) return 0.0;
  return q_(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(to)) / q;
}

bool ChainModel::irreducible() const {
  const auto fwd = reachable(q_, false);
  const auto bwd = reachable(q_, true);
  return std::all_of(fwd.begin(), fwd.end(), [](bool b) { return b; }) &&
         std::all_of(bwd.begin(), bwd.end(), [](bool b) { return b; });
}

ChainAnalysis analyze_chain(const ChainModel& model) {
  if (!model.irreducible()) {
    throw SingularSystem("switching chain is reducible; no unique stationary distribution");
  }
  const Matrix& q = model.generator();
  const Eigen::Index n = q.rows();

  // pi Q = 0 with the last balance equation replaced by sum(pi) = 1.
  Matrix lhs = q.transpose();
  lhs.row(n - 1).setOnes();
  Vector rhs = Vector::Zero(n);
  rhs(n - 1) = 1.0;
  Eigen::PartialPivLU<Matrix> pi_lu(lhs);
  if (pi_lu.rcond() < 1.0 / kMaxCondition) {
    throw SingularSystem("stationary equations are numerically singular");
  }
  ChainAnalysis out;
  out.pi = pi_lu.solve(rhs);
  for (Eigen::Index x = 0; x < n; ++x) {
    if (!(out.pi(x) > 0.0)) throw SingularSystem("stationary distribution has a non-positive entry");
  }
  out.pi /= out.pi.sum();

  out.projector = Vector::Ones(n) * out.pi.transpose();
  const Matrix fundamental = out.projector - q;
  Eigen::PartialPivLU<Matrix> lu(fundamental);
  if (lu.rcond() < 1.0 / kMaxCondition) {
    throw SingularSystem("(Pi - Q) is numerically singular");
  }
  out.potential = lu.inverse() - out.projector;
  return out;
}

Vector solve_poisson(const ChainAnalysis& analysis, const Vector& psi) {
  if (psi.size() != analysis.pi.size()) throw InvalidModel("Poisson right-hand side has wrong length");
  const double mean = analysis.pi.dot(psi);
  if (std::abs(mean) > kSolvabilityTolerance) {
    std::ostringstream msg;
    msg << "Poisson equation unsolvable: Pi psi = " << mean;
    throw SolvabilityViolated(msg.str());
  }
  return -(analysis.potential * psi);
}

std::size_t ChainPath::state_at(double t) const {
  auto it = std::upper_bound(jumps.begin(), jumps.end(), t,
                             [](double value, const ChainJump& j) { return value < j.time; });
  return std::prev(it)->state;
}

std::size_t sample_next_state(const ChainModel& model, std::size_t x, double uniform) {
  const Matrix& q = model.generator();
  const auto row = static_cast<Eigen::Index>(x);
  const double target = uniform * model.exit_rate(x);
  double acc = 0.0;
  std::size_t last = x;
  for (Eigen::Index y = 0; y < q.cols(); ++y) {
    if (y == row || q(row, y) <= 0.0) continue;
    acc += q(row, y);
    last = static_cast<std::size_t>(y);
    if (target < acc) return last;
  }
  return last;
}

ChainPath simulate_chain(const ChainModel& model, std::size_t x0, double horizon, Rng& rng) {
  if (!(horizon > 0.0)) throw InvalidModel("simulation horizon must be positive");
  if (x0 >= model.size()) throw InvalidModel("initial state out of range");

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  ChainPath path;
  path.horizon = horizon;
  path.jumps.push_back({0.0, x0});
  double t = 0.0;
  std::size_t x = x0;
  while (true) {
    const double rate = model.exit_rate(x);
    if (rate <= 0.0) break;
    t += std::exponential_distribution<double>(rate)(rng);
    if (t > horizon) break;
    x = sample_next_state(model, x, unif(rng));
    path.jumps.push_back({t, x});
  }
  return path;
}

}  // namespace levyld

#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "levyld/rng.hpp"

namespace levyld {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Generator of a finite-state switching process x(t).
///
/// Holds the rate matrix Q with non-negative off-diagonal entries and zero
/// row sums. Exit rates q(x) = -Q(x,x) and the jump kernel
/// P(x,y) = Q(x,y)/q(x) are derived on demand. Irreducibility is checked by
/// analyze_chain, not here.
class ChainModel {
 public:
  static constexpr double kRowSumTolerance = 1e-12;

  explicit ChainModel(Matrix q);

  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(q_.rows()); }
  [[nodiscard]] const Matrix& generator() const { return q_; }
  [[nodiscard]] double exit_rate(std::size_t x) const;
  [[nodiscard]] double jump_probability(std::size_t from, std::size_t to) const;

  // True when every state reaches every other state along positive rates.
  [[nodiscard]] bool irreducible() const;

 private:
  Matrix q_;
};

/// Stationary law pi, projector Pi (rows equal to pi) and potential R0.
struct ChainAnalysis {
  Vector pi;
  Matrix projector;
  Matrix potential;
};

// Computes pi, Pi and R0 = (Pi - Q)^{-1} - Pi. Throws SingularSystem when Q
// is reducible or (Pi - Q) is ill-conditioned beyond 1e12.
ChainAnalysis analyze_chain(const ChainModel& model);

// Solves Q phi = psi on mean-zero functions: phi = -R0 psi, Pi phi = 0.
// Throws SolvabilityViolated when |pi . psi| > 1e-9.
Vector solve_poisson(const ChainAnalysis& analysis, const Vector& psi);

struct ChainJump {
  double time;
  std::size_t state;
};

// Piecewise-constant path; the first entry is (0, x0), later entries are
// jump epochs strictly inside [0, horizon].
struct ChainPath {
  std::vector<ChainJump> jumps;
  double horizon = 0.0;

  [[nodiscard]] std::size_t state_at(double t) const;
};

ChainPath simulate_chain(const ChainModel& model, std::size_t x0, double horizon, Rng& rng);

// Draws the next state from P(x, .) given a uniform variate in [0, 1).
std::size_t sample_next_state(const ChainModel& model, std::size_t x, double uniform);

}  // namespace levyld

#pragma once

// Shared test models and independent numerical oracles. Nothing here calls
// into the code under test beyond model constructors.

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "levyld/chain.hpp"
#include "levyld/jump_model.hpp"

namespace levyld::testing {

inline Matrix two_state_q() {
  Matrix q(2, 2);
  q << -1.0, 1.0, 1.0, -1.0;
  return q;
}

// Reference model: up/down states with opposite first-order drifts.
inline JumpModel two_state_jumps() {
  return JumpModel({StateJumps{1.0, 0.5, 3.0, {{1.0, 0.2}}}, StateJumps{-1.0, 0.5, 3.0, {{-1.0, 0.2}}}});
}

inline Matrix three_state_q() {
  Matrix q(3, 3);
  q << -1.5, 1.0, 0.5, 1.0, -2.0, 1.0, 0.5, 1.0, -1.5;
  return q;
}

inline JumpModel three_state_jumps() {
  return JumpModel({StateJumps{0.8, 0.2, 2.5, {{0.5, 0.3}, {-1.5, 0.1}}}, StateJumps{-0.3, -0.1, 2.0, {{2.0, 0.05}}},
                    StateJumps{-0.5, 0.4, 3.0, {}}});
}

// Plain Gauss-Jordan inverse with partial pivoting on std::vector storage.
inline std::vector<std::vector<double>> gauss_jordan_inverse(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (std::abs(a[piv][col]) < 1e-300) throw std::runtime_error("oracle: singular matrix");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    const double d = a[col][col];
    for (std::size_t c = 0; c < n; ++c) {
      a[col][c] /= d;
      inv[col][c] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col];
      for (std::size_t c = 0; c < n; ++c) {
        a[r][c] -= f * a[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  return inv;
}

// Irreducible rate matrix: a random cycle guarantees strong connectivity,
// other edges present with probability 1/2; rates in [0.1, 10].
inline Matrix random_irreducible_q(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> rate(0.1, 10.0);
  std::bernoulli_distribution edge(0.5);
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  Matrix q = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  auto idx = [](std::size_t i) { return static_cast<Eigen::Index>(i); };
  if (n > 1) {
    for (std::size_t k = 0; k < n; ++k) q(idx(perm[k]), idx(perm[(k + 1) % n])) = rate(rng);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j && q(idx(i), idx(j)) == 0.0 && edge(rng)) q(idx(i), idx(j)) = rate(rng);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) s += q(idx(i), idx(j));
    }
    q(idx(i), idx(i)) = -s;
  }
  return q;
}

}  // namespace levyld::testing

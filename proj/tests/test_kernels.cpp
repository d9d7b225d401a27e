#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "levyld/kernels/kernels.hpp"

using namespace levyld;
namespace k = levyld::kernels;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::vector<double> sample(std::size_t n, double sd, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sd);
  std::vector<double> x(n);
  for (double& v : x) v = normal(rng);
  return x;
}

// Restores automatic dispatch when a test case ends.
struct IsaGuard {
  ~IsaGuard() { k::reset_isa(); }
};

}  // namespace

TEST_CASE("scalar kernels against direct loops") {
  const std::vector<double> x = {0.3, -1.2, 2.5, 0.0, 4.0};
  const k::ExpMoments m = k::scalar::exp_moments(x, 2.0);
  CHECK(m.shift == 8.0);
  double s1 = 0.0, s2 = 0.0;
  for (double v : x) {
    s1 += std::exp(2.0 * v - 8.0);
    s2 += std::exp(4.0 * v - 16.0);
  }
  CHECK(m.sum1 == doctest::Approx(s1).epsilon(1e-15));
  CHECK(m.sum2 == doctest::Approx(s2).epsilon(1e-15));

  const k::CentralSums c = k::scalar::central_sums(x);
  CHECK(c.mean == doctest::Approx(1.12).epsilon(1e-15));
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    m2 += (v - 1.12) * (v - 1.12);
    m4 += std::pow(v - 1.12, 4);
  }
  CHECK(c.m2 == doctest::Approx(m2).epsilon(1e-14));
  CHECK(c.m4 == doctest::Approx(m4).epsilon(1e-14));

  const k::ExpMoments empty = k::scalar::exp_moments({}, 1.0);
  CHECK(empty.sum1 == 0.0);
}

#if defined(LEVYLD_HAVE_AVX2)

TEST_CASE("AVX2 elementwise exp and expm1 match the scalar reference") {
  if (!k::avx2_supported()) return;
  std::vector<double> in;
  for (int i = -7400; i <= 7090; ++i) in.push_back(0.1 * i);
  for (double v : {1e-300, -1e-300, 1e-17, -1e-12, 1e-8, 0.34999, -0.35, 0.35001, 709.7, -745.0}) in.push_back(v);
  in.push_back(0.0);
  // Odd length exercises the scalar tail.
  if (in.size() % 4 == 0) in.push_back(0.123);
  std::vector<double> a(in.size()), b(in.size());

  k::scalar::exp(in, a);
  k::avx2::exp(in, b);
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (a[i] == 0.0 || a[i] < 1e-300) {
      CHECK(std::abs(b[i]) <= 1e-300);
      continue;
    }
    CHECK(rel(b[i], a[i]) <= 1e-14);
  }

  k::scalar::expm1(in, a);
  k::avx2::expm1(in, b);
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (a[i] == 0.0) {
      CHECK(b[i] == 0.0);
      continue;
    }
    CHECK(rel(b[i], a[i]) <= 1e-14);
  }
}

TEST_CASE("AVX2 reductions match the scalar reference") {
  if (!k::avx2_supported()) return;
  for (std::size_t n : {1u, 3u, 4u, 7u, 1000u, 100003u}) {
    const std::vector<double> x = sample(n, 2.0, n);
    for (double scale : {-10.0, -1.0, 0.5, 20.0}) {
      const k::ExpMoments a = k::scalar::exp_moments(x, scale);
      const k::ExpMoments b = k::avx2::exp_moments(x, scale);
      CHECK(a.shift == b.shift);
      CHECK(rel(b.sum1, a.sum1) <= 1e-13);
      CHECK(rel(b.sum2, a.sum2) <= 1e-13);
    }
    const k::CentralSums a = k::scalar::central_sums(x);
    const k::CentralSums b = k::avx2::central_sums(x);
    CHECK(std::abs(b.mean - a.mean) <= 1e-13 * (1.0 + std::abs(a.mean)));
    if (n > 1) {
      CHECK(rel(b.m2, a.m2) <= 1e-12);
      CHECK(rel(b.m4, a.m4) <= 1e-12);
    }
  }
}

TEST_CASE("AVX2 cumulant grid matches the scalar reference") {
  if (!k::avx2_supported()) return;
  const std::vector<double> jumps = {1.0, -1.0, 0.5, -2.5, 3e-9};
  const std::vector<double> rates = {0.1, 0.1, 0.3, 0.05, 2.0};
  const k::CumulantCoeffs c{0.5, 3.8, jumps, rates};
  std::vector<double> lambdas;
  for (int i = -100; i <= 100; ++i) lambdas.push_back(0.05 * i);
  lambdas.push_back(1e-9);
  std::vector<double> a(lambdas.size()), b(lambdas.size());
  k::scalar::cumulant_grid(c, lambdas, a);
  k::avx2::cumulant_grid(c, lambdas, b);
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    CHECK(std::abs(b[i] - a[i]) <= 1e-14 * std::max(1.0, std::abs(a[i])));
  }
}

#endif

TEST_CASE("runtime dispatch") {
  IsaGuard guard;
  const std::vector<double> x = sample(1001, 1.0, 3);
  k::force_isa(k::Isa::scalar);
  CHECK(k::active_isa() == k::Isa::scalar);
  const k::ExpMoments s = k::exp_moments(x, 1.0);
  const k::ExpMoments ref = k::scalar::exp_moments(x, 1.0);
  CHECK(s.sum1 == ref.sum1);
  CHECK(k::isa_name(k::Isa::scalar) == "scalar");
  CHECK(k::isa_name(k::Isa::avx2) == "avx2");

  if (k::avx2_supported()) {
    k::force_isa(k::Isa::avx2);
    CHECK(k::active_isa() == k::Isa::avx2);
    CHECK(rel(k::exp_moments(x, 1.0).sum1, ref.sum1) <= 1e-13);
    k::reset_isa();
    CHECK(k::active_isa() == k::Isa::avx2);
  } else {
    CHECK_THROWS_AS(k::force_isa(k::Isa::avx2), std::invalid_argument);
    k::reset_isa();
    CHECK(k::active_isa() == k::Isa::scalar);
  }

  std::vector<double> out(2);
  const std::vector<double> three = {0.0, 1.0, 2.0};
  CHECK_THROWS_AS(k::cumulant_grid(k::CumulantCoeffs{}, three, out), std::invalid_argument);
}

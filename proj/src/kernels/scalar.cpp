#include <algorithm>
#include <cmath>
#include <limits>

#include "levyld/kernels/kernels.hpp"

namespace levyld::kernels::scalar {

void exp(std::span<const double> in, std::span<double> out) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = std::exp(in[i]);
}

void expm1(std::span<const double> in, std::span<double> out) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = std::expm1(in[i]);
}

ExpMoments exp_moments(std::span<const double> x, double scale) {
  ExpMoments m;
  if (x.empty()) return m;
  m.shift = -std::numeric_limits<double>::infinity();
  for (double v : x) m.shift = std::max(m.shift, scale * v);
  for (double v : x) {
    const double e = std::exp(scale * v - m.shift);
    m.sum1 += e;
    m.sum2 += e * e;
  }
  return m;
}

CentralSums central_sums(std::span<const double> x) {
  CentralSums s;
  if (x.empty()) return s;
  double total = 0.0;
  for (double v : x) total += v;
  s.mean = total / static_cast<double>(x.size());
  for (double v : x) {
    const double d = v - s.mean;
    const double d2 = d * d;
    s.m2 += d2;
    s.m4 += d2 * d2;
  }
  return s;
}

void cumulant_grid(const CumulantCoeffs& coeffs, std::span<const double> lambdas, std::span<double> out) {
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double l = lambdas[i];
    double h = coeffs.drift * l + 0.5 * coeffs.sigma2 * l * l;
    for (std::size_t k = 0; k < coeffs.jumps.size(); ++k) h += coeffs.rates[k] * std::expm1(l * coeffs.jumps[k]);
    out[i] = h;
  }
}

}  // namespace levyld::kernels::scalar

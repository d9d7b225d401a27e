// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "levyld/kernels/kernels.hpp"

namespace levyld::kernels::avx2 {

namespace {

constexpr double kLog2e = 1.4426950408889634074;
constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr double kExpMax = 709.78;
constexpr double kExpMin = -745.5;
// |x| below this uses the series for expm1; above it exp(x) - 1 loses < 3 ulp.
constexpr double kExpm1Switch = 0.35;

// 1/k! for k = 13 down to 0; the reduced argument satisfies |r| <= ln2/2.
constexpr double kInvFact[] = {
    1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0, 1.0 / 362880.0,
    1.0 / 40320.0,      1.0 / 5040.0,      1.0 / 720.0,      1.0 / 120.0,     1.0 / 24.0,
    1.0 / 6.0,          0.5,               1.0,              1.0};

inline __m256d pow2(__m256d k) {
  const __m128i k32 = _mm256_cvtpd_epi32(k);
  __m256i bits = _mm256_cvtepi32_epi64(k32);
  bits = _mm256_add_epi64(bits, _mm256_set1_epi64x(1023));
  bits = _mm256_slli_epi64(bits, 52);
  return _mm256_castsi256_pd(bits);
}

inline __m256d vexp(__m256d x) {
  x = _mm256_max_pd(x, _mm256_set1_pd(kExpMin));
  x = _mm256_min_pd(x, _mm256_set1_pd(kExpMax));
  const __m256d n =
      _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kLog2e)), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kLn2Hi), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kLn2Lo), r);

  __m256d p = _mm256_set1_pd(kInvFact[0]);
  for (int k = 1; k < 14; ++k) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(kInvFact[k]));

  // Split the binary exponent so both halves stay in the normal range.
  const __m256d n1 = _mm256_floor_pd(_mm256_mul_pd(n, _mm256_set1_pd(0.5)));
  const __m256d n2 = _mm256_sub_pd(n, n1);
  return _mm256_mul_pd(_mm256_mul_pd(p, pow2(n1)), pow2(n2));
}

inline __m256d vexpm1(__m256d x) {
  // x * sum_{k=0}^{12} x^k / (k+1)!
  __m256d p = _mm256_set1_pd(kInvFact[0]);
  for (int k = 1; k < 13; ++k) p = _mm256_fmadd_pd(p, x, _mm256_set1_pd(kInvFact[k]));
  const __m256d series = _mm256_mul_pd(p, x);
  const __m256d direct = _mm256_sub_pd(vexp(x), _mm256_set1_pd(1.0));
  const __m256d abs_x = _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
  const __m256d small = _mm256_cmp_pd(abs_x, _mm256_set1_pd(kExpm1Switch), _CMP_LT_OQ);
  return _mm256_blendv_pd(direct, series, small);
}

inline double hsum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

inline double hmax(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
}

}  // namespace

void exp(std::span<const double> in, std::span<double> out) {
  std::size_t i = 0;
  for (; i + 4 <= in.size(); i += 4) _mm256_storeu_pd(out.data() + i, vexp(_mm256_loadu_pd(in.data() + i)));
  for (; i < in.size(); ++i) out[i] = std::exp(in[i]);
}

void expm1(std::span<const double> in, std::span<double> out) {
  std::size_t i = 0;
  for (; i + 4 <= in.size(); i += 4) _mm256_storeu_pd(out.data() + i, vexpm1(_mm256_loadu_pd(in.data() + i)));
  for (; i < in.size(); ++i) out[i] = std::expm1(in[i]);
}

ExpMoments exp_moments(std::span<const double> x, double scale) {
  ExpMoments m;
  if (x.empty()) return m;
  const std::size_t n = x.size();
  const __m256d s = _mm256_set1_pd(scale);

  std::size_t i = 0;
  double shift = -std::numeric_limits<double>::infinity();
  if (n >= 4) {
    __m256d vmax = _mm256_set1_pd(shift);
    for (; i + 4 <= n; i += 4) vmax = _mm256_max_pd(vmax, _mm256_mul_pd(s, _mm256_loadu_pd(x.data() + i)));
    shift = hmax(vmax);
  }
  for (; i < n; ++i) shift = std::max(shift, scale * x[i]);
  m.shift = shift;

  const __m256d vshift = _mm256_set1_pd(shift);
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d y = _mm256_sub_pd(_mm256_mul_pd(s, _mm256_loadu_pd(x.data() + i)), vshift);
    const __m256d e = vexp(y);
    acc1 = _mm256_add_pd(acc1, e);
    acc2 = _mm256_fmadd_pd(e, e, acc2);
  }
  m.sum1 = hsum(acc1);
  m.sum2 = hsum(acc2);
  for (; i < n; ++i) {
    const double e = std::exp(scale * x[i] - shift);
    m.sum1 += e;
    m.sum2 += e * e;
  }
  return m;
}

CentralSums central_sums(std::span<const double> x) {
  CentralSums out;
  if (x.empty()) return out;
  const std::size_t n = x.size();
  std::size_t i = 0;
  __m256d acc = _mm256_setzero_pd();
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x.data() + i));
  double total = hsum(acc);
  for (; i < n; ++i) total += x[i];
  out.mean = total / static_cast<double>(n);

  const __m256d mean = _mm256_set1_pd(out.mean);
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc4 = _mm256_setzero_pd();
  i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x.data() + i), mean);
    const __m256d d2 = _mm256_mul_pd(d, d);
    acc2 = _mm256_add_pd(acc2, d2);
    acc4 = _mm256_fmadd_pd(d2, d2, acc4);
  }
  out.m2 = hsum(acc2);
  out.m4 = hsum(acc4);
  for (; i < n; ++i) {
    const double d = x[i] - out.mean;
    out.m2 += d * d;
    out.m4 += d * d * d * d;
  }
  return out;
}

void cumulant_grid(const CumulantCoeffs& coeffs, std::span<const double> lambdas, std::span<double> out) {
  const __m256d drift = _mm256_set1_pd(coeffs.drift);
  const __m256d half_s2 = _mm256_set1_pd(0.5 * coeffs.sigma2);
  std::size_t i = 0;
  for (; i + 4 <= lambdas.size(); i += 4) {
    const __m256d l = _mm256_loadu_pd(lambdas.data() + i);
    __m256d h = _mm256_fmadd_pd(_mm256_mul_pd(half_s2, l), l, _mm256_mul_pd(drift, l));
    for (std::size_t k = 0; k < coeffs.jumps.size(); ++k) {
      const __m256d e = vexpm1(_mm256_mul_pd(l, _mm256_set1_pd(coeffs.jumps[k])));
      h = _mm256_fmadd_pd(_mm256_set1_pd(coeffs.rates[k]), e, h);
    }
    _mm256_storeu_pd(out.data() + i, h);
  }
  if (i < lambdas.size()) scalar::cumulant_grid(coeffs, lambdas.subspan(i), out.subspan(i));
}

}  // namespace levyld::kernels::avx2

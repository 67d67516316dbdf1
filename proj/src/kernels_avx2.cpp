// Compiled with -mavx2 -mfma. Nothing here may run before the dispatcher has
// confirmed CPU support.

#include <immintrin.h>

#include <cmath>
#include <cstdint>
#include <limits>

#include "rwre/kernels.hpp"

namespace rwre::kernels {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

// 2^k for integer-valued k in [-1022, 1023].
inline __m256d pow2i(__m256d k) {
  const __m128i ki = _mm256_cvtpd_epi32(k);
  const __m256i k64 = _mm256_cvtepi32_epi64(ki);
  const __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(k64, _mm256_set1_epi64x(1023)), 52);
  return _mm256_castsi256_pd(bits);
}

// exp(x) by Cody-Waite reduction x = n ln2 + r, |r| <= ln2/2, and a degree-13
// Taylor polynomial (truncation error below 1e-17 relative). The scale 2^n is
// applied as two half-powers so subnormal results and n = 1024 stay exact.
inline __m256d exp_pd(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  const __m256d hi_cut = _mm256_set1_pd(709.782712893384);
  const __m256d lo_cut = _mm256_set1_pd(-745.1332191019412);

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
  r = _mm256_fnmadd_pd(n, ln2_lo, r);

  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  // Clamp n so the half-power split stays in range for the lanes masked below.
  const __m256d nc = _mm256_min_pd(_mm256_max_pd(n, _mm256_set1_pd(-1100.0)), _mm256_set1_pd(1100.0));
  const __m256d half = _mm256_round_pd(_mm256_mul_pd(nc, _mm256_set1_pd(0.5)), _MM_FROUND_TO_NEG_INF | _MM_FROUND_NO_EXC);
  __m256d result = _mm256_mul_pd(_mm256_mul_pd(p, pow2i(half)), pow2i(_mm256_sub_pd(nc, half)));

  result = _mm256_blendv_pd(result, _mm256_set1_pd(std::numeric_limits<double>::infinity()),
                            _mm256_cmp_pd(x, hi_cut, _CMP_GT_OQ));
  result = _mm256_blendv_pd(result, _mm256_setzero_pd(), _mm256_cmp_pd(x, lo_cut, _CMP_LT_OQ));
  // NaN and -inf inputs: -inf -> 0 via lo_cut; NaN propagates.
  result = _mm256_blendv_pd(result, x, _mm256_cmp_pd(x, x, _CMP_UNORD_Q));
  return result;
}

double max_value_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_set1_pd(kNegInf);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(x + i));
  double m = hmax(acc);
  for (; i < n; ++i) m = x[i] > m ? x[i] : m;
  return m;
}

double log_sum_exp_avx2(const double* x, std::size_t n) {
  const double m = max_value_avx2(x, n);
  if (!std::isfinite(m)) return m;
  const __m256d vm = _mm256_set1_pd(m);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, exp_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), vm)));
  double sum = hsum(acc);
  for (; i < n; ++i) sum += std::exp(x[i] - m);
  return m + std::log(sum);
}

double softmax_mean_avx2(const double* w, const double* v, std::size_t n) {
  const double m = max_value_avx2(w, n);
  const __m256d vm = _mm256_set1_pd(m);
  __m256d num = _mm256_setzero_pd();
  __m256d den = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d e = exp_pd(_mm256_sub_pd(_mm256_loadu_pd(w + i), vm));
    num = _mm256_fmadd_pd(e, _mm256_loadu_pd(v + i), num);
    den = _mm256_add_pd(den, e);
  }
  double sn = hsum(num);
  double sd = hsum(den);
  for (; i < n; ++i) {
    const double e = std::exp(w[i] - m);
    sn += e * v[i];
    sd += e;
  }
  return sn / sd;
}

double tilted_sum_above_avx2(const double* x, std::size_t n, double shift, double threshold) {
  const __m256d vs = _mm256_set1_pd(shift);
  const __m256d vt = _mm256_set1_pd(threshold);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xi = _mm256_loadu_pd(x + i);
    const __m256d keep = _mm256_cmp_pd(xi, vt, _CMP_GE_OQ);
    const __m256d e = exp_pd(_mm256_sub_pd(_mm256_setzero_pd(), _mm256_add_pd(xi, vs)));
    acc = _mm256_add_pd(acc, _mm256_and_pd(keep, e));
  }
  double sum = hsum(acc);
  for (; i < n; ++i) {
    if (x[i] >= threshold) sum += std::exp(-x[i] - shift);
  }
  return sum;
}

void exp_array_avx2(const double* x, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, exp_pd(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = std::exp(x[i]);
}

constexpr KernelTable kAvx2{
    "avx2", &log_sum_exp_avx2, &softmax_mean_avx2, &tilted_sum_above_avx2, &max_value_avx2, &exp_array_avx2,
};

}  // namespace

namespace detail {
const KernelTable* avx2_table_if_built() { return &kAvx2; }
}  // namespace detail

}  // namespace rwre::kernels

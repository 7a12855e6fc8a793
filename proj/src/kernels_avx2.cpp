#include "bpsim/kernels.hpp"

#include <cmath>
#include <limits>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define BPSIM_X86 1
#else
#define BPSIM_X86 0
#endif

namespace bpsim::kernels::avx2 {

#if BPSIM_X86

#define BPSIM_AVX2 __attribute__((target("avx2,fma")))

BPSIM_AVX2 void polyval(std::span<const double> coeffs, std::span<const double> xs,
                        std::span<double> out) {
  const std::size_t n = xs.size();
  if (coeffs.empty()) {
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
    return;
  }
  const std::size_t deg = coeffs.size() - 1;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d x = _mm256_loadu_pd(xs.data() + i);
    __m256d acc = _mm256_set1_pd(coeffs[deg]);
    for (std::size_t k = deg; k-- > 0;) acc = _mm256_fmadd_pd(acc, x, _mm256_set1_pd(coeffs[k]));
    _mm256_storeu_pd(out.data() + i, acc);
  }
  for (; i < n; ++i) {
    double acc = coeffs[deg];
    for (std::size_t k = deg; k-- > 0;) acc = std::fma(acc, xs[i], coeffs[k]);
    out[i] = acc;
  }
}

BPSIM_AVX2 double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  __m256d nan_seen = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
    d = _mm256_andnot_pd(sign, d);
    nan_seen = _mm256_or_pd(nan_seen, _mm256_cmp_pd(d, d, _CMP_UNORD_Q));
    m = _mm256_max_pd(m, d);
  }
  if (_mm256_movemask_pd(nan_seen) != 0) return std::numeric_limits<double>::quiet_NaN();
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double r = lanes[0];
  for (int k = 1; k < 4; ++k)
    if (lanes[k] > r) r = lanes[k];
  for (; i < n; ++i) {
    double d = std::fabs(a[i] - b[i]);
    if (std::isnan(d)) return d;
    if (d > r) r = d;
  }
  return r;
}

BPSIM_AVX2 std::size_t sign_changes(std::span<const double> v) {
  const std::size_t n = v.size();
  if (n < 2) return 0;
  const __m256d zero = _mm256_setzero_pd();
  std::size_t c = 0;
  std::size_t i = 0;
  for (; i + 5 <= n; i += 4) {
    __m256d lo = _mm256_loadu_pd(v.data() + i);
    __m256d hi = _mm256_loadu_pd(v.data() + i + 1);
    __m256d down = _mm256_and_pd(_mm256_cmp_pd(lo, zero, _CMP_GT_OQ), _mm256_cmp_pd(hi, zero, _CMP_LT_OQ));
    __m256d up = _mm256_and_pd(_mm256_cmp_pd(lo, zero, _CMP_LT_OQ), _mm256_cmp_pd(hi, zero, _CMP_GT_OQ));
    c += static_cast<std::size_t>(__builtin_popcount(_mm256_movemask_pd(_mm256_or_pd(down, up))));
  }
  for (; i + 1 < n; ++i) {
    if ((v[i] < 0.0 && v[i + 1] > 0.0) || (v[i] > 0.0 && v[i + 1] < 0.0)) ++c;
  }
  return c;
}

#else

void polyval(std::span<const double> coeffs, std::span<const double> xs, std::span<double> out) {
  scalar::polyval(coeffs, xs, out);
}
double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  return scalar::max_abs_diff(a, b);
}
std::size_t sign_changes(std::span<const double> v) { return scalar::sign_changes(v); }

#endif

}  // namespace bpsim::kernels::avx2

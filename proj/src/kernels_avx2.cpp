#include "cfmimo/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>

#define CFMIMO_AVX2 __attribute__((target("avx2")))

namespace cfmimo::kernels {
namespace {

// Tails fall back to the scalar body; the per-lane arithmetic is identical.

CFMIMO_AVX2 void axpy(std::size_t n, double s, const double* x, double* y) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(vs, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] = y[i] + s * x[i];
}

CFMIMO_AVX2 void scale(std::size_t n, double s, const double* x, double* y) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, _mm256_mul_pd(vs, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = s * x[i];
}

CFMIMO_AVX2 inline void conj_product(const double* ar, const double* ai, const double* br, const double* bi,
                                     __m256d& re, __m256d& im) {
  const __m256d a_r = _mm256_loadu_pd(ar);
  const __m256d a_i = _mm256_loadu_pd(ai);
  const __m256d b_r = _mm256_loadu_pd(br);
  const __m256d b_i = _mm256_loadu_pd(bi);
  re = _mm256_add_pd(_mm256_mul_pd(a_r, b_r), _mm256_mul_pd(a_i, b_i));
  im = _mm256_sub_pd(_mm256_mul_pd(a_r, b_i), _mm256_mul_pd(a_i, b_r));
}

CFMIMO_AVX2 void cdot_acc(std::size_t n, const double* ar, const double* ai, const double* br, const double* bi,
                          double* cr, double* ci) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d re, im;
    conj_product(ar + i, ai + i, br + i, bi + i, re, im);
    _mm256_storeu_pd(cr + i, _mm256_add_pd(_mm256_loadu_pd(cr + i), re));
    _mm256_storeu_pd(ci + i, _mm256_add_pd(_mm256_loadu_pd(ci + i), im));
  }
  for (; i < n; ++i) {
    const double re = ar[i] * br[i] + ai[i] * bi[i];
    const double im = ar[i] * bi[i] - ai[i] * br[i];
    cr[i] = cr[i] + re;
    ci[i] = ci[i] + im;
  }
}

CFMIMO_AVX2 void cmul_conj(std::size_t n, const double* ar, const double* ai, const double* br, const double* bi,
                           double* cr, double* ci) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d re, im;
    conj_product(ar + i, ai + i, br + i, bi + i, re, im);
    _mm256_storeu_pd(cr + i, re);
    _mm256_storeu_pd(ci + i, im);
  }
  for (; i < n; ++i) {
    const double re = ar[i] * br[i] + ai[i] * bi[i];
    const double im = ar[i] * bi[i] - ai[i] * br[i];
    cr[i] = re;
    ci[i] = im;
  }
}

CFMIMO_AVX2 void abs2_acc(std::size_t n, const double* ar, const double* ai, double* acc) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_loadu_pd(ar + i);
    const __m256d m = _mm256_loadu_pd(ai + i);
    const __m256d p = _mm256_add_pd(_mm256_mul_pd(r, r), _mm256_mul_pd(m, m));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), p));
  }
  for (; i < n; ++i) acc[i] = acc[i] + (ar[i] * ar[i] + ai[i] * ai[i]);
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{"avx2", axpy, scale, cdot_acc, cmul_conj, abs2_acc};
  if (!__builtin_cpu_supports("avx2")) return nullptr;
  return &table;
}

}  // namespace cfmimo::kernels

#else

namespace cfmimo::kernels {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace cfmimo::kernels

#endif

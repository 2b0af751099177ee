#include "cfmimo/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace cfmimo::kernels {
namespace {

// vmulq/vaddq only (no vfmaq) to stay bit-identical with the scalar table.

void axpy(std::size_t n, double s, const double* x, double* y) {
  const float64x2_t vs = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(vs, vld1q_f64(x + i))));
  for (; i < n; ++i) y[i] = y[i] + s * x[i];
}

void scale(std::size_t n, double s, const double* x, double* y) {
  const float64x2_t vs = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vmulq_f64(vs, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] = s * x[i];
}

inline void conj_product(const double* ar, const double* ai, const double* br, const double* bi, float64x2_t& re,
                         float64x2_t& im) {
  const float64x2_t a_r = vld1q_f64(ar), a_i = vld1q_f64(ai);
  const float64x2_t b_r = vld1q_f64(br), b_i = vld1q_f64(bi);
  re = vaddq_f64(vmulq_f64(a_r, b_r), vmulq_f64(a_i, b_i));
  im = vsubq_f64(vmulq_f64(a_r, b_i), vmulq_f64(a_i, b_r));
}

void cdot_acc(std::size_t n, const double* ar, const double* ai, const double* br, const double* bi, double* cr,
              double* ci) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t re, im;
    conj_product(ar + i, ai + i, br + i, bi + i, re, im);
    vst1q_f64(cr + i, vaddq_f64(vld1q_f64(cr + i), re));
    vst1q_f64(ci + i, vaddq_f64(vld1q_f64(ci + i), im));
  }
  for (; i < n; ++i) {
    const double re = ar[i] * br[i] + ai[i] * bi[i];
    const double im = ar[i] * bi[i] - ai[i] * br[i];
    cr[i] = cr[i] + re;
    ci[i] = ci[i] + im;
  }
}

void cmul_conj(std::size_t n, const double* ar, const double* ai, const double* br, const double* bi, double* cr,
               double* ci) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t re, im;
    conj_product(ar + i, ai + i, br + i, bi + i, re, im);
    vst1q_f64(cr + i, re);
    vst1q_f64(ci + i, im);
  }
  for (; i < n; ++i) {
    const double re = ar[i] * br[i] + ai[i] * bi[i];
    const double im = ar[i] * bi[i] - ai[i] * br[i];
    cr[i] = re;
    ci[i] = im;
  }
}

void abs2_acc(std::size_t n, const double* ar, const double* ai, double* acc) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t r = vld1q_f64(ar + i), m = vld1q_f64(ai + i);
    vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), vaddq_f64(vmulq_f64(r, r), vmulq_f64(m, m))));
  }
  for (; i < n; ++i) acc[i] = acc[i] + (ar[i] * ar[i] + ai[i] * ai[i]);
}

}  // namespace

const KernelTable* neon_table() {
  static const KernelTable table{"neon", axpy, scale, cdot_acc, cmul_conj, abs2_acc};
  return &table;
}

}  // namespace cfmimo::kernels

#else

namespace cfmimo::kernels {
const KernelTable* neon_table() { return nullptr; }
}  // namespace cfmimo::kernels

#endif

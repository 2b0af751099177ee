#include "cfmimo/kernels.hpp"

namespace cfmimo::kernels {
namespace {

void axpy(std::size_t n, double s, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + s * x[i];
}

void scale(std::size_t n, double s, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = s * x[i];
}

void cdot_acc(std::size_t n, const double* ar, const double* ai, const double* br, const double* bi, double* cr,
              double* ci) {
  for (std::size_t i = 0; i < n; ++i) {
    const double re = ar[i] * br[i] + ai[i] * bi[i];
    const double im = ar[i] * bi[i] - ai[i] * br[i];
    cr[i] = cr[i] + re;
    ci[i] = ci[i] + im;
  }
}

void cmul_conj(std::size_t n, const double* ar, const double* ai, const double* br, const double* bi, double* cr,
               double* ci) {
  for (std::size_t i = 0; i < n; ++i) {
    const double re = ar[i] * br[i] + ai[i] * bi[i];
    const double im = ar[i] * bi[i] - ai[i] * br[i];
    cr[i] = re;
    ci[i] = im;
  }
}

void abs2_acc(std::size_t n, const double* ar, const double* ai, double* acc) {
  for (std::size_t i = 0; i < n; ++i) acc[i] = acc[i] + (ar[i] * ar[i] + ai[i] * ai[i]);
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar", axpy, scale, cdot_acc, cmul_conj, abs2_acc};
  return table;
}

}  // namespace cfmimo::kernels

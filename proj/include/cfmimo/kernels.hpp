#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace cfmimo::kernels {

// Lane-wise complex arithmetic on split (re, im) arrays. Every variant performs
// the same IEEE operations in the same order per lane, so results are
// bit-identical across variants.
struct KernelTable {
  const char* name;
  // y[i] += s * x[i]
  void (*axpy)(std::size_t n, double s, const double* x, double* y);
  // y[i] = s * x[i]
  void (*scale)(std::size_t n, double s, const double* x, double* y);
  // c[i] += conj(a[i]) * b[i]
  void (*cdot_acc)(std::size_t n, const double* ar, const double* ai, const double* br, const double* bi,
                   double* cr, double* ci);
  // c[i] = conj(a[i]) * b[i]
  void (*cmul_conj)(std::size_t n, const double* ar, const double* ai, const double* br, const double* bi,
                    double* cr, double* ci);
  // acc[i] += ar[i]^2 + ai[i]^2
  void (*abs2_acc)(std::size_t n, const double* ar, const double* ai, double* acc);
};

const KernelTable& scalar_table();
/// Null when the build or the CPU lacks the instruction set.
const KernelTable* avx2_table();
const KernelTable* neon_table();

/// Every variant usable on this machine, scalar first.
std::vector<const KernelTable*> available_tables();

/// Best available variant, or the one named by CFMIMO_KERNELS (scalar, avx2, neon).
const KernelTable& active_table();

const KernelTable* find_table(const std::string& name);

}  // namespace cfmimo::kernels

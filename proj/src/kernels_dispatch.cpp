#include <cstdlib>
#include <stdexcept>

#include "cfmimo/kernels.hpp"

namespace cfmimo::kernels {

std::vector<const KernelTable*> available_tables() {
  std::vector<const KernelTable*> out{&scalar_table()};
  if (const auto* t = avx2_table()) out.push_back(t);
  if (const auto* t = neon_table()) out.push_back(t);
  return out;
}

const KernelTable* find_table(const std::string& name) {
  for (const auto* t : available_tables()) {
    if (name == t->name) return t;
  }
  return nullptr;
}

const KernelTable& active_table() {
  static const KernelTable* chosen = [] {
    if (const char* env = std::getenv("CFMIMO_KERNELS"); env && *env) {
      const auto* t = find_table(env);
      if (!t) throw std::runtime_error(std::string("CFMIMO_KERNELS: variant '") + env + "' unavailable");
      return t;
    }
    return available_tables().back();
  }();
  return *chosen;
}

}  // namespace cfmimo::kernels

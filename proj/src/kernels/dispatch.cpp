#include <cstdlib>
#include <string_view>

#include "vsum/kernels.hpp"

namespace vsum::kernels {

#if defined(VSUM_HAVE_AVX2)
const KernelSet& avx2_kernel_table();
#endif

const KernelSet* avx2_kernels() {
#if defined(VSUM_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelSet& active() {
  static const KernelSet& chosen = [&]() -> const KernelSet& {
    const char* forced = std::getenv("VSUM_KERNELS");
    if (forced != nullptr && std::string_view(forced) == "scalar") return scalar_kernels();
    if (const KernelSet* k = avx2_kernels()) return *k;
    return scalar_kernels();
  }();
  return chosen;
}

}  // namespace vsum::kernels

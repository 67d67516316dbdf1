#include <cstdlib>
#include <cstring>

#include "rwre/kernels.hpp"

namespace rwre::kernels {

#if !defined(RWRE_HAVE_AVX2_KERNELS)
namespace detail {
const KernelTable* avx2_table_if_built() { return nullptr; }
}  // namespace detail
#endif

namespace {

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& select() {
  const char* forced = std::getenv("RWRE_SIMD");
  if (forced != nullptr && std::strcmp(forced, "scalar") == 0) return scalar();
  if (const KernelTable* t = avx2()) return *t;
  return scalar();
}

}  // namespace

const KernelTable* avx2() {
  static const KernelTable* table = cpu_has_avx2_fma() ? detail::avx2_table_if_built() : nullptr;
  return table;
}

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace rwre::kernels

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "dam/simd/kernels.hpp"

namespace dam::simd {

#ifdef DAM_HAVE_AVX2
const KernelTable& avx2_table_impl();
#endif

const KernelTable* avx2_table() {
#ifdef DAM_HAVE_AVX2
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_table_impl() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable* initial_table() {
  const char* env = std::getenv("DAM_SIMD");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) return &scalar_table();
  if (const KernelTable* t = avx2_table()) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{initial_table()};
  return current;
}

}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

void select(Isa isa) {
  const KernelTable* t = isa == Isa::scalar ? &scalar_table() : avx2_table();
  if (t == nullptr) throw std::runtime_error("requested kernel ISA is not available");
  slot().store(t, std::memory_order_release);
}

}  // namespace dam::simd

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "terracelab/kernels.hpp"

namespace terracelab::kernels {

#if defined(TERRACELAB_WITH_AVX2)
const Table& avx2_table_impl();
#endif

namespace {
// -1: automatic, otherwise static_cast<int>(Isa)
std::atomic<int> g_forced{-1};
}  // namespace

const Table* avx2_table() {
#if defined(TERRACELAB_WITH_AVX2)
  static const bool ok = __builtin_cpu_supports("avx2");
  return ok ? &avx2_table_impl() : nullptr;
#else
  return nullptr;
#endif
}

void force_isa(std::optional<Isa> isa) { g_forced = isa ? static_cast<int>(*isa) : -1; }

const Table& active() {
  int want = g_forced.load();
  if (want < 0) {
    if (const char* env = std::getenv("TERRACELAB_ISA")) {
      if (std::strcmp(env, "scalar") == 0) want = static_cast<int>(Isa::Scalar);
      else if (std::strcmp(env, "avx2") == 0) want = static_cast<int>(Isa::Avx2);
    }
  }
  if (want == static_cast<int>(Isa::Scalar)) return scalar_table();
  if (const Table* t = avx2_table()) return *t;
  return scalar_table();
}

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

}  // namespace terracelab::kernels

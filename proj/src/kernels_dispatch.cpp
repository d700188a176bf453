#include "kernels_impl.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace tvprox::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(TVPROX_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Table* lookup(std::string_view name) {
  if (name == "scalar") return &scalar();
  if (name == "avx2") return avx2();
  return nullptr;
}

const Table* initial_table() {
  if (const char* env = std::getenv("TVPROX_KERNELS")) {
    const std::string_view want(env);
    if (want != "auto" && !want.empty()) {
      if (const Table* t = lookup(want)) return t;
      throw std::invalid_argument("TVPROX_KERNELS: unknown or unavailable kernel set '" +
                                  std::string(want) + "'");
    }
  }
  if (const Table* t = avx2()) return t;
  return &scalar();
}

std::atomic<const Table*>& current() {
  static std::atomic<const Table*> table{initial_table()};
  return table;
}

}  // namespace

const Table& scalar() { return detail::scalar_table(); }

const Table* avx2() {
#if defined(TVPROX_HAVE_AVX2)
  static const bool ok = cpu_has_avx2();
  return ok ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const Table& active() { return *current().load(std::memory_order_acquire); }

void select(std::string_view name) {
  const Table* t = name == "auto" ? (avx2() ? avx2() : &scalar()) : lookup(name);
  if (t == nullptr)
    throw std::invalid_argument("unknown or unavailable kernel set '" + std::string(name) + "'");
  current().store(t, std::memory_order_release);
}

}  // namespace tvprox::kernels

#include <atomic>
#include <cassert>

#include "acdc/simd/kernels.hpp"

namespace acdc::simd {

namespace {

struct Table {
  double (*dot)(const double*, const double*, std::size_t) noexcept;
  void (*axpy)(double, const double*, double*, std::size_t) noexcept;
  double (*squared_l2)(const double*, const double*, std::size_t) noexcept;
  double (*l1_distance)(const double*, const double*, std::size_t) noexcept;
};

constexpr Table kScalar{scalar::dot, scalar::axpy, scalar::squared_l2, scalar::l1_distance};
#ifdef ACDC_SIMD_HAVE_AVX2
constexpr Table kAvx2{avx2::dot, avx2::axpy, avx2::squared_l2, avx2::l1_distance};
#endif

Level detect() noexcept {
#ifdef ACDC_SIMD_HAVE_AVX2
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Level::avx2;
#endif
  return Level::scalar;
}

const Table* table_for(Level level) noexcept {
#ifdef ACDC_SIMD_HAVE_AVX2
  if (level == Level::avx2) return &kAvx2;
#endif
  return &kScalar;
}

std::atomic<const Table*> g_table{table_for(detect())};
std::atomic<Level> g_level{detect()};

}  // namespace

Level detected_level() noexcept { return detect(); }
Level active_level() noexcept { return g_level.load(); }

Level set_level(Level level) noexcept {
  if (level == Level::avx2 && detect() != Level::avx2) level = Level::scalar;
  g_table = table_for(level);
  g_level = level;
  return level;
}

std::string_view level_name(Level level) noexcept {
  return level == Level::avx2 ? "avx2" : "scalar";
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  assert(a.size() == b.size());
  return g_table.load(std::memory_order_relaxed)->dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
  assert(x.size() == y.size());
  g_table.load(std::memory_order_relaxed)->axpy(alpha, x.data(), y.data(), x.size());
}

double squared_l2(std::span<const double> a, std::span<const double> b) noexcept {
  assert(a.size() == b.size());
  return g_table.load(std::memory_order_relaxed)->squared_l2(a.data(), b.data(), a.size());
}

double l1_distance(std::span<const double> a, std::span<const double> b) noexcept {
  assert(a.size() == b.size());
  return g_table.load(std::memory_order_relaxed)->l1_distance(a.data(), b.data(), a.size());
}

}  // namespace acdc::simd

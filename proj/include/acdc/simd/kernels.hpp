#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Dense double-precision inner-loop kernels used by the learners and the
// distance-based samplers. Each kernel has a portable scalar reference and an
// AVX2+FMA variant; the variant is chosen once at startup from CPUID and can
// be pinned for testing.
namespace acdc::simd {

enum class Level { scalar, avx2 };

Level active_level() noexcept;
// Best level the running CPU supports.
Level detected_level() noexcept;
// Pins the dispatch level; requesting avx2 on a CPU without it falls back to
// scalar. Returns the level actually installed.
Level set_level(Level level) noexcept;
std::string_view level_name(Level level) noexcept;

double dot(std::span<const double> a, std::span<const double> b) noexcept;
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept;
double squared_l2(std::span<const double> a, std::span<const double> b) noexcept;
double l1_distance(std::span<const double> a, std::span<const double> b) noexcept;

namespace scalar {
double dot(const double* a, const double* b, std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
double squared_l2(const double* a, const double* b, std::size_t n) noexcept;
double l1_distance(const double* a, const double* b, std::size_t n) noexcept;
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define ACDC_SIMD_HAVE_AVX2 1
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n) noexcept;
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept;
double squared_l2(const double* a, const double* b, std::size_t n) noexcept;
double l1_distance(const double* a, const double* b, std::size_t n) noexcept;
}  // namespace avx2
#endif

}  // namespace acdc::simd

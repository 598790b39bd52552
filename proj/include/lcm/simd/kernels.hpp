#pragma once

// Elementwise kernels for the class-indexed inner loops of EM.
//
// Every kernel exists as a scalar reference and, where the target supports
// it, an AVX2 variant. The active variant is chosen once at startup from the
// CPU features, or forced with LCM_SIMD_LEVEL=scalar|avx2. Kernels perform
// only lane-independent multiplies and adds in a fixed association order, so
// all variants produce bit-identical results; horizontal sums are left to the
// caller, which adds in ascending class order.

#include <cstddef>
#include <span>
#include <string_view>

namespace lcm::simd {

enum class Level { scalar, avx2 };

struct KernelTable {
    /// out[i] = (a[i] * b[i]) * c[i]
    void (*product3)(const double* a, const double* b, const double* c, double* out, std::size_t n);
    /// out[i] = a[i] * b[i]
    void (*product2)(const double* a, const double* b, double* out, std::size_t n);
    /// out[i] = (a[i] * s) * b[i]
    void (*scaled_product)(const double* a, double s, const double* b, double* out, std::size_t n);
    /// acc[i] = acc[i] + x[i] * s
    void (*accumulate)(double* acc, const double* x, double s, std::size_t n);
};

const KernelTable& scalar_kernels();
#if defined(LCM_HAVE_AVX2)
const KernelTable& avx2_kernels();
#endif

/// True when `level` was compiled in and the CPU supports it.
bool level_available(Level level);

/// Kernel table for the currently selected level.
const KernelTable& kernels();
Level active_level();

/// Override the selected level (tests, benchmarking). Throws if unavailable.
void set_level(Level level);

std::string_view level_name(Level level);

/// Ascending-order sum; the one reduction order used throughout.
inline double ordered_sum(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
}

}  // namespace lcm::simd

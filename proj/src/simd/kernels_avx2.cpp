// AVX2 kernel variants. Compiled with -mavx2 only; callers must check
// level_available(Level::avx2) before using this table.

#include "lcm/simd/kernels.hpp"

#include <immintrin.h>

namespace lcm::simd {
namespace {

constexpr std::size_t kWidth = 4;

void product3(const double* a, const double* b, const double* c, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + kWidth <= n; i += kWidth) {
        __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        _mm256_storeu_pd(out + i, _mm256_mul_pd(ab, _mm256_loadu_pd(c + i)));
    }
    for (; i < n; ++i) out[i] = (a[i] * b[i]) * c[i];
}

void product2(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + kWidth <= n; i += kWidth) {
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    }
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

void scaled_product(const double* a, double s, const double* b, double* out, std::size_t n) {
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + kWidth <= n; i += kWidth) {
        __m256d as = _mm256_mul_pd(_mm256_loadu_pd(a + i), vs);
        _mm256_storeu_pd(out + i, _mm256_mul_pd(as, _mm256_loadu_pd(b + i)));
    }
    for (; i < n; ++i) out[i] = (a[i] * s) * b[i];
}

void accumulate(double* acc, const double* x, double s, std::size_t n) {
    const __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + kWidth <= n; i += kWidth) {
        __m256d xs = _mm256_mul_pd(_mm256_loadu_pd(x + i), vs);
        _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), xs));
    }
    for (; i < n; ++i) acc[i] = acc[i] + x[i] * s;
}

}  // namespace

const KernelTable& avx2_kernels() {
    static const KernelTable table{product3, product2, scaled_product, accumulate};
    return table;
}

}  // namespace lcm::simd

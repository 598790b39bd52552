#include "lcm/simd/kernels.hpp"

namespace lcm::simd {
namespace {

void product3(const double* a, const double* b, const double* c, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = (a[i] * b[i]) * c[i];
}

void product2(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void scaled_product(const double* a, double s, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = (a[i] * s) * b[i];
}

void accumulate(double* acc, const double* x, double s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] = acc[i] + x[i] * s;
}

}  // namespace

const KernelTable& scalar_kernels() {
    static const KernelTable table{product3, product2, scaled_product, accumulate};
    return table;
}

}  // namespace lcm::simd

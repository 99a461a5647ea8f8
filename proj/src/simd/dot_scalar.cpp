#include "fogrid/simd.hpp"

namespace fogrid::simd {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

} // namespace fogrid::simd

#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Inner-product kernels. Every hot loop in the library (GL history sums,
// DFT correlations, power averages) reduces to a dot product, so this is the
// only place with ISA-specific code. The scalar kernel is the reference; the
// vector kernels are checked against it in tests/test_simd.cpp.

namespace fogrid::simd {

enum class Isa { Scalar, Avx2, Neon };

using DotFn = double (*)(const double* a, const double* b, std::size_t n);

double dot_scalar(const double* a, const double* b, std::size_t n);
#if defined(FOGRID_HAVE_AVX2)
double dot_avx2(const double* a, const double* b, std::size_t n);
#endif
#if defined(FOGRID_HAVE_NEON)
double dot_neon(const double* a, const double* b, std::size_t n);
#endif

// True when the kernel was compiled in and the running CPU supports it.
bool isa_available(Isa isa);

// Kernel picked at first use: the widest available ISA, unless the
// FOGRID_SIMD environment variable names one ("scalar", "avx2", "neon").
Isa active_isa();

// Pins the dispatched kernel. Throws ConfigError if the ISA is unavailable.
void force_isa(Isa isa);

std::string_view isa_name(Isa isa);

DotFn kernel_for(Isa isa);

inline double dot(const double* a, const double* b, std::size_t n) {
    extern DotFn g_dot;
    return g_dot(a, b, n);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    return dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

} // namespace fogrid::simd

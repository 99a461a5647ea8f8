#include "fogrid/error.hpp"
#include "fogrid/simd.hpp"

#include <cstdlib>
#include <string>

namespace fogrid::simd {

namespace {

bool cpu_has_avx2() {
#if defined(FOGRID_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa pick_default() {
    if (const char* env = std::getenv("FOGRID_SIMD")) {
        const std::string name(env);
        if (name == "scalar") return Isa::Scalar;
        if (name == "avx2" && isa_available(Isa::Avx2)) return Isa::Avx2;
        if (name == "neon" && isa_available(Isa::Neon)) return Isa::Neon;
    }
    if (isa_available(Isa::Avx2)) return Isa::Avx2;
    if (isa_available(Isa::Neon)) return Isa::Neon;
    return Isa::Scalar;
}

Isa g_isa = Isa::Scalar;

double dot_first_call(const double* a, const double* b, std::size_t n);

} // namespace

DotFn g_dot = &dot_first_call;

namespace {

double dot_first_call(const double* a, const double* b, std::size_t n) {
    g_isa = pick_default();
    g_dot = kernel_for(g_isa);
    return g_dot(a, b, n);
}

} // namespace

bool isa_available(Isa isa) {
    switch (isa) {
    case Isa::Scalar:
        return true;
    case Isa::Avx2:
        return cpu_has_avx2();
    case Isa::Neon:
#if defined(FOGRID_HAVE_NEON)
        return true;
#else
        return false;
#endif
    }
    return false;
}

DotFn kernel_for(Isa isa) {
    switch (isa) {
#if defined(FOGRID_HAVE_AVX2)
    case Isa::Avx2:
        if (cpu_has_avx2()) return &dot_avx2;
        break;
#endif
#if defined(FOGRID_HAVE_NEON)
    case Isa::Neon:
        return &dot_neon;
#endif
    default:
        break;
    }
    if (isa != Isa::Scalar) {
        throw ConfigError("SIMD kernel '" + std::string(isa_name(isa)) + "' is not available on this CPU");
    }
    return &dot_scalar;
}

Isa active_isa() {
    if (g_dot == &dot_first_call) {
        g_isa = pick_default();
        g_dot = kernel_for(g_isa);
    }
    return g_isa;
}

void force_isa(Isa isa) {
    g_dot = kernel_for(isa);
    g_isa = isa;
}

std::string_view isa_name(Isa isa) {
    switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
    }
    return "unknown";
}

} // namespace fogrid::simd

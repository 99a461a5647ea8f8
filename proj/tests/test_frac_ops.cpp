#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fogrid/error.hpp"
#include "fogrid/frac_ops.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

using namespace fogrid;

namespace {

// (-1)^j binom(alpha, j) straight from the gamma function.
double gamma_weight(double alpha, int j) {
    // Gamma has poles at non-positive integers; use the product form there.
    double w = 1.0;
    for (int i = 0; i < j; ++i) w *= (alpha - i) / (i + 1.0);
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    const double via_gamma = std::tgamma(alpha + 1.0) / (std::tgamma(j + 1.0) * std::tgamma(alpha - j + 1.0));
    return std::isfinite(via_gamma) ? sign * via_gamma : sign * w;
}

// D^alpha t^p at t with the given step and memory.
double gl_power_at(double alpha, double p, double t, double h, std::size_t mem) {
    GLDifferintegrator op(FracOrder(alpha), h, mem);
    const auto n = static_cast<std::size_t>(std::llround(t / h));
    double y = 0.0;
    for (std::size_t k = 0; k <= n; ++k) y = op.step(std::pow(static_cast<double>(k) * h, p));
    return y;
}

double analytic_power(double alpha, double p, double t) {
    return std::tgamma(p + 1.0) / std::tgamma(p - alpha + 1.0) * std::pow(t, p - alpha);
}

} // namespace

TEST_CASE("FracOrder range and identity") {
    CHECK(FracOrder(0.0).is_identity());
    CHECK(FracOrder(-2.0).is_integer());
    CHECK_FALSE(FracOrder(0.875).is_integer());
    CHECK_THROWS_AS(FracOrder(2.5), ConfigError);
    CHECK_THROWS_AS(FracOrder(-2.0001), ConfigError);
    CHECK_THROWS_AS(FracOrder(std::numeric_limits<double>::quiet_NaN()), ConfigError);
}

TEST_CASE("gl_coefficients examples") {
    auto w0 = gl_coefficients(0.5, 0);
    REQUIRE(w0.size() == 1);
    CHECK(w0[0] == 1.0);

    auto w1 = gl_coefficients(1.0, 3);
    CHECK(w1 == std::vector<double>{1.0, -1.0, 0.0, 0.0});

    auto wh = gl_coefficients(0.5, 2);
    CHECK(wh[0] == 1.0);
    CHECK(wh[1] == doctest::Approx(gamma_weight(0.5, 1)).epsilon(1e-12));
    CHECK(wh[2] == doctest::Approx(gamma_weight(0.5, 2)).epsilon(1e-12));
    CHECK(wh[1] == doctest::Approx(-0.5));
    CHECK(wh[2] == doctest::Approx(-0.125));
}

TEST_CASE("gl_coefficients match the gamma closed form and the ratio recurrence") {
    for (double a : {-1.75, -0.95, -0.6, 0.25, 0.6, 0.875, 1.5}) {
        auto w = gl_coefficients(a, 40);
        for (int j = 1; j <= 40; ++j) {
            CHECK(w[j] == doctest::Approx(gamma_weight(a, j)).epsilon(1e-10));
            if (w[j - 1] != 0.0) {
                CHECK(w[j] / w[j - 1] == doctest::Approx(1.0 - (a + 1.0) / j).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("GL operator integer-order reductions are exact") {
    const double h = 1e-3;
    SUBCASE("alpha = -1 on a constant is c k h") {
        GLDifferintegrator op(FracOrder(-1.0), h);
        double y = 0.0;
        for (int k = 1; k <= 5000; ++k) {
            y = op.step(2.5);
            CHECK(y == doctest::Approx(2.5 * k * h).epsilon(1e-12));
        }
        // No short-memory truncation for integer integrals.
        GLDifferintegrator small(FracOrder(-1.0), h, 10);
        for (int k = 0; k < 100; ++k) y = small.step(1.0);
        CHECK(y == doctest::Approx(100 * h).epsilon(1e-12));
    }
    SUBCASE("alpha = 0 passes samples through") {
        GLDifferintegrator op(FracOrder(0.0), h);
        for (double x : {1.5, -3.0, 0.0, 1e9}) CHECK(op.step(x) == x);
    }
    SUBCASE("alpha = 1 is the backward difference over h") {
        GLDifferintegrator op(FracOrder(1.0), h);
        double prev = 0.0;
        for (int k = 0; k < 200; ++k) {
            const double x = std::sin(0.05 * k);
            CHECK(op.step(x) == doctest::Approx((x - prev) / h).epsilon(1e-12));
            prev = x;
        }
    }
    SUBCASE("alpha = -2 is the double running sum") {
        GLDifferintegrator op(FracOrder(-2.0), h);
        double s1 = 0.0, s2 = 0.0;
        for (int k = 0; k < 500; ++k) {
            const double x = std::cos(0.01 * k);
            s1 += h * x;
            s2 += h * s1;
            CHECK(op.step(x) == doctest::Approx(s2).epsilon(1e-12));
        }
    }
}

TEST_CASE("GL half derivative of t") {
    const double y = gl_power_at(0.5, 1.0, 1.0, 1e-4, 20000);
    CHECK(std::abs(y - 2.0 * std::sqrt(1.0 / std::numbers::pi)) / 1.1284 < 0.01);
}

TEST_CASE("GL power-function oracle and short-memory consistency") {
    for (double a : {0.25, 0.5, 0.875}) {
        for (double p : {1.0, 2.0}) {
            CAPTURE(a);
            CAPTURE(p);
            const double exact = analytic_power(a, p, 1.0);
            const double full = gl_power_at(a, p, 1.0, 1e-4, 10001);
            CHECK(std::abs(full - exact) / exact < 0.01);
            const double windowed = gl_power_at(a, p, 1.0, 1e-4, kDefaultMemory);
            CHECK(std::abs(windowed - full) / std::abs(full) < 0.005);
        }
    }
}

TEST_CASE("GL history is bounded and non-finite input is rejected") {
    GLDifferintegrator op(FracOrder(0.5), 1e-3, 64);
    for (int k = 0; k < 1000; ++k) op.step(1.0);
    CHECK(op.history_size() == 64);
    CHECK(op.samples_seen() == 1000);
    CHECK_THROWS_AS(op.step(std::numeric_limits<double>::infinity()), NumericInputError);
    CHECK_THROWS_AS(op.step(std::nan("")), NumericInputError);
    op.reset();
    CHECK(op.history_size() == 0);
    CHECK(op.step(0.0) == 0.0);
    CHECK_THROWS_AS(GLDifferintegrator(FracOrder(0.5), 0.0), ConfigError);
    CHECK_THROWS_AS(GLDifferintegrator(FracOrder(0.5), 1e-3, 0), ConfigError);
}

TEST_CASE("GL linearity") {
    GLDifferintegrator a(FracOrder(0.6), 1e-4, 500), b(FracOrder(0.6), 1e-4, 500), c(FracOrder(0.6), 1e-4, 500);
    for (int k = 0; k < 2000; ++k) {
        const double x = std::sin(0.01 * k), y = std::cos(0.003 * k) + 0.1 * k * 1e-3;
        const double lhs = c.step(2.0 * x - 3.0 * y);
        const double rhs = 2.0 * a.step(x) - 3.0 * b.step(y);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("gl_compose") {
    auto op = gl_compose(FracOrder(-0.875), FracOrder(-0.875), 1e-4);
    CHECK(op.order().value() == -1.75);
    CHECK(gl_compose(FracOrder(0.5), FracOrder(-0.5), 1e-4).order().is_identity());
    CHECK_THROWS_AS(gl_compose(FracOrder(-1.5), FracOrder(-1.0), 1e-4), ConfigError);

    SUBCASE("D^-1 of D^-1 on a constant is c t^2 / 2") {
        const double h = 1e-4, c = 3.0;
        GLDifferintegrator i1(FracOrder(-1.0), h), i2(FracOrder(-1.0), h);
        auto single = gl_compose(FracOrder(-1.0), FracOrder(-1.0), h);
        double cascade = 0.0, one = 0.0;
        for (int k = 0; k < 10000; ++k) {
            cascade = i2.step(i1.step(c));
            one = single.step(c);
        }
        const double t = 1.0;
        CHECK(std::abs(cascade - c * t * t / 2) / (c * t * t / 2) < 0.005);
        CHECK(std::abs(one - c * t * t / 2) / (c * t * t / 2) < 0.005);
    }
    SUBCASE("fractional cascade agrees with the single composed operator") {
        for (double a : {0.25, 0.6, 0.875}) {
            const double h = 1e-4;
            GLDifferintegrator i1(FracOrder(-a), h), i2(FracOrder(-a), h);
            auto single = gl_compose(FracOrder(-a), FracOrder(-a), h);
            double cascade = 0.0, one = 0.0;
            for (int k = 0; k <= 10000; ++k) {
                const double t = k * h;
                const double x = 1.0 + std::sin(3.0 * t) + t * t;
                cascade = i2.step(i1.step(x));
                one = single.step(x);
            }
            CAPTURE(a);
            CHECK(std::abs(cascade - one) / std::abs(one) < 0.005);
        }
    }
}

TEST_CASE("Oustaloup design") {
    auto f = oustaloup_design(0.5, 0.01, 1e4, 5);
    CHECK(f.zeros().size() == 11);
    CHECK(f.poles().size() == 11);
    // Geometric interlacing: z_k < p_k < z_{k+1}.
    for (std::size_t k = 0; k < f.zeros().size(); ++k) {
        CHECK(f.zeros()[k] > 0.0);
        CHECK(f.poles()[k] > f.zeros()[k]);
        if (k + 1 < f.zeros().size()) CHECK(f.poles()[k] < f.zeros()[k + 1]);
    }
    CHECK(std::abs(20.0 * std::log10(std::abs(f.response(1.0)))) < 1.0);

    for (double w = 1.0; w <= 100.0; w *= std::pow(10.0, 0.1)) {
        const double db = 20.0 * std::log10(std::abs(f.response(w)));
        CHECK(std::abs(db - 10.0 * std::log10(w)) < 1.0);
    }
    const double slope = 20.0 * std::log10(std::abs(f.response(100.0)) / std::abs(f.response(1.0))) / 2.0;
    CHECK(slope == doctest::Approx(10.0).epsilon(0.05));

    const double mid = std::sqrt(0.01 * 1e4);
    const double phase_deg = std::arg(f.response(mid)) * 180.0 / std::numbers::pi;
    CHECK(std::abs(phase_deg - 45.0) < 5.0);

    CHECK_THROWS_AS(oustaloup_design(0.0, 0.01, 1e4, 5), ConfigError);
    CHECK_THROWS_AS(oustaloup_design(0.5, 1e4, 0.01, 5), ConfigError);
    CHECK_THROWS_AS(oustaloup_design(0.5, 0.01, 1e4, 0), ConfigError);
    CHECK_THROWS_AS(oustaloup_design(1.5, 0.01, 1e4, 5), ConfigError);
}

TEST_CASE("Oustaloup stepping") {
    SUBCASE("discrete poles are inside the unit circle") {
        auto f = oustaloup_design(0.5, 0.01, 1e4, 5);
        f.step(0.0, 1e-4);
        for (double p : f.discrete_poles()) CHECK(std::abs(p) < 1.0);
    }
    SUBCASE("band above Nyquist is rejected") {
        auto f = oustaloup_design(0.5, 0.01, 1e4, 5);
        CHECK_THROWS_AS(f.step(1.0, 1e-3), ConfigError);
    }
    SUBCASE("alpha = -1 step response is a ramp inside the band") {
        auto f = oustaloup_design(-1.0, 1e-3, 1e3, 6);
        const double h = 1e-4;
        double y = 0.0;
        for (int k = 0; k < 10000; ++k) y = f.step(1.0, h);
        // After 1 s (well inside 1/omega_b) the output is close to t.
        CHECK(y == doctest::Approx(1.0).epsilon(0.1));
    }
    SUBCASE("mid-band sinusoid gain and agreement with GL") {
        const double w = 10.0, h = 1e-4;
        auto f = oustaloup_design(0.5, 0.01, 1e4, 5);
        GLDifferintegrator gl(FracOrder(0.5), h, 200000);
        double amp_o = 0.0, amp_g = 0.0;
        const int n = static_cast<int>(20.0 / h);
        for (int k = 0; k < n; ++k) {
            const double x = std::sin(w * k * h);
            const double yo = f.step(x, h);
            const double yg = gl.step(x);
            if (k > n / 2) {
                amp_o = std::max(amp_o, std::abs(yo));
                amp_g = std::max(amp_g, std::abs(yg));
            }
        }
        CHECK(std::abs(amp_o - std::sqrt(w)) / std::sqrt(w) < 0.12);
        CHECK(std::abs(amp_o - amp_g) / amp_g < 0.15);
    }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fogrid/error.hpp"
#include "fogrid/power_stage.hpp"

#include <cmath>
#include <numbers>

using namespace fogrid;

TEST_CASE("plant parameter validation") {
    PlantParams p;
    CHECK_NOTHROW(p.validate());
    p.c_pv = -1.0;
    CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("c_pv"), ConfigError);
    p = PlantParams{};
    p.f_sw_inv = 200e3;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = PlantParams{};
    p.parasitics.r_on = -0.1;
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("averaged model examples") {
    const PlantParams p;
    SUBCASE("u1 = 1 shorts the inductor to the source") {
        const PlantState s{203.0, 5.0, 400.0, 2.0};
        const auto d = plant_derivatives(s, {1.0, 0.3}, 7.0, 100.0, p);
        CHECK(d.x2 == 203.0 / p.l_o);
    }
    SUBCASE("zero inductor voltage needs 1 - u1 = x1 / x3") {
        const PlantState s{203.0, 5.0, 400.0, 0.0};
        const double u1 = 1.0 - 203.0 / 400.0;
        CHECK(plant_derivatives(s, {u1, 0.0}, 5.0, 0.0, p).x2 == doctest::Approx(0.0).scale(1.0));
    }
    SUBCASE("equilibrium with grid current flowing") {
        // Power balance (1-u1) x2 = u2 x4 and u2 x3 = v_g.
        const double x1 = 203.0, x2 = 7.35, x3 = 400.0, v_g = 150.0;
        const double u1 = 1.0 - x1 / x3;
        const double u2 = v_g / x3;
        const double x4 = (1.0 - u1) * x2 / u2;
        const auto d = plant_derivatives({x1, x2, x3, x4}, {u1, u2}, x2, v_g, p);
        CHECK(std::abs(d.x1) < 1e-12);
        CHECK(std::abs(d.x2) < 1e-12);
        CHECK(std::abs(d.x3) < 1e-9);
        CHECK(std::abs(d.x4) < 1e-9);
    }
}

TEST_CASE("plant derivatives are bilinear in state and inputs") {
    const PlantParams p;
    const PlantState a{200.0, 6.0, 390.0, 3.0}, b{-10.0, 1.0, 20.0, -2.0};
    const ControlInputs u{0.4, 0.6};
    // With i_pv and v_g fixed at zero the map is linear in the state for fixed u.
    const auto fa = plant_derivatives(a, u, 0.0, 0.0, p);
    const auto fb = plant_derivatives(b, u, 0.0, 0.0, p);
    const auto fab = plant_derivatives(a + 2.0 * b, u, 0.0, 0.0, p);
    CHECK(fab.x1 == doctest::Approx(fa.x1 + 2.0 * fb.x1));
    CHECK(fab.x2 == doctest::Approx(fa.x2 + 2.0 * fb.x2));
    CHECK(fab.x3 == doctest::Approx(fa.x3 + 2.0 * fb.x3));
    CHECK(fab.x4 == doctest::Approx(fa.x4 + 2.0 * fb.x4));
    // Affine in u for fixed state.
    const auto g0 = plant_derivatives(a, {0.0, 0.0}, 0.0, 0.0, p);
    const auto g1 = plant_derivatives(a, {0.2, 0.1}, 0.0, 0.0, p);
    const auto g2 = plant_derivatives(a, {0.4, 0.2}, 0.0, 0.0, p);
    CHECK(g2.x2 - g1.x2 == doctest::Approx(g1.x2 - g0.x2));
    CHECK(g2.x3 - g1.x3 == doctest::Approx(g1.x3 - g0.x3));
    CHECK(g2.x4 - g1.x4 == doctest::Approx(g1.x4 - g0.x4));
}

TEST_CASE("lossless energy rate equals port power") {
    const PlantParams p;
    const PlantState s{210.0, 6.5, 395.0, 4.0};
    const double i_pv = 7.0, v_g = 250.0;
    for (const ControlInputs u : {ControlInputs{0.3, 0.5}, ControlInputs{0.9, -0.7}, ControlInputs{0.0, 0.0}}) {
        const auto d = plant_derivatives(s, u, i_pv, v_g, p);
        const double de = p.c_pv * s.x1 * d.x1 + p.l_o * s.x2 * d.x2 + p.c_dc * s.x3 * d.x3 + p.l_g * s.x4 * d.x4;
        CHECK(de == doctest::Approx(i_pv * s.x1 - v_g * s.x4).epsilon(1e-12));
    }
    PlantParams lossy;
    lossy.parasitics = {0.4, 0.3, 0.1};
    const auto d = plant_derivatives(s, {0.3, 0.5}, i_pv, v_g, lossy);
    const double de = lossy.c_pv * s.x1 * d.x1 + lossy.l_o * s.x2 * d.x2 + lossy.c_dc * s.x3 * d.x3 +
                      lossy.l_g * s.x4 * d.x4;
    const double dissipated = (0.4 + 0.3 * 0.1) * s.x2 * s.x2 + (0.3 + 0.2) * s.x4 * s.x4;
    CHECK(de == doctest::Approx(i_pv * s.x1 - v_g * s.x4 - dissipated).epsilon(1e-12));
    CHECK(stored_energy(s, p) == doctest::Approx(0.5 * (p.c_pv * 210.0 * 210.0 + p.l_o * 6.5 * 6.5 +
                                                        p.c_dc * 395.0 * 395.0 + p.l_g * 16.0)));
}

TEST_CASE("control inputs saturate") {
    const auto c = ControlInputs{1.4, -3.0}.saturated();
    CHECK(c.u1 == 1.0);
    CHECK(c.u2 == -1.0);
}

TEST_CASE("PWM switch states") {
    const PlantParams p;
    const double dt = 1e-7;
    SUBCASE("full duty keeps the boost switch on") {
        for (int k = 0; k < 1000; ++k) CHECK(pwm_switch_states({1.0, 0.0}, k * dt, p).mu1 == 1);
    }
    SUBCASE("zero modulation averages to zero") {
        const int per = static_cast<int>(std::lround(1.0 / (p.f_sw_inv * dt)));
        int sum = 0;
        for (int k = 0; k < per; ++k) sum += pwm_switch_states({0.5, 0.0}, k * dt, p).mu2;
        CHECK(sum == 0);
    }
    SUBCASE("realized boost duty matches the command within one sample") {
        const int per = static_cast<int>(std::lround(1.0 / (p.f_sw_boost * dt)));
        for (double u1 : {0.5, 0.25, 0.7, 0.93}) {
            for (int period = 0; period < 5; ++period) {
                int on = 0;
                for (int k = 0; k < per; ++k) on += pwm_switch_states({u1, 0.0}, (period * per + k) * dt, p).mu1;
                CHECK(std::abs(on - u1 * per) <= 1.0);
            }
        }
    }
    SUBCASE("unipolar inverter mean tracks u2") {
        const double h = 1e-8;
        const int per = static_cast<int>(std::lround(1.0 / (p.f_sw_inv * h)));
        for (double u2 : {0.8, -0.3, 0.05}) {
            long sum = 0;
            for (int k = 0; k < per; ++k) {
                const int m = pwm_switch_states({0.0, u2}, k * h, p).mu2;
                CHECK((m == -1 || m == 0 || m == 1));
                if (u2 > 0) CHECK(m >= 0);
                if (u2 < 0) CHECK(m <= 0);
                sum += m;
            }
            CHECK(static_cast<double>(sum) / per == doctest::Approx(u2).epsilon(0.01));
        }
    }
    CHECK(triangle_carrier(0.0, 1e5) == 0.0);
    CHECK(triangle_carrier(5e-6, 1e5) == doctest::Approx(1.0));
}

TEST_CASE("boost sizing") {
    CHECK(boost_min_inductance({203.0, 406.0, 1.0, 1e5}) == doctest::Approx(203.0 * 203.0 / (406.0 * 1e5)));
    CHECK(boost_min_inductance({203.0, 406.0, 1.0, 1e5}) == doctest::Approx(1.015e-3).epsilon(1e-3));
    CHECK(boost_min_inductance({203.0, 406.0, 1.0, 2e5}) ==
          doctest::Approx(0.5 * boost_min_inductance({203.0, 406.0, 1.0, 1e5})));
    CHECK(boost_min_inductance({203.0, 203.0 * (1 + 1e-9), 1.0, 1e5}) < 1e-9);
    CHECK_THROWS_AS(boost_min_inductance({406.0, 203.0, 1.0, 1e5}), SizingError);
    CHECK_THROWS_AS(boost_min_inductance({203.0, 203.0, 1.0, 1e5}), SizingError);
    CHECK_THROWS_AS(boost_min_inductance({203.0, 406.0, 0.0, 1e5}), SizingError);
}

TEST_CASE("boost output voltage") {
    CHECK(boost_output_voltage(203.0, 0.5).v_out == doctest::Approx(406.0));
    CHECK(boost_output_voltage(203.0, 0.0).v_out == 203.0);
    CHECK(boost_output_voltage(203.0, 0.4925).v_out == doctest::Approx(400.0).epsilon(1e-3));
    const auto sat = boost_output_voltage(203.0, 0.97);
    CHECK(sat.duty_saturated);
    CHECK(sat.v_out == doctest::Approx(203.0 / 0.05));
    CHECK_FALSE(boost_output_voltage(203.0, 0.9).duty_saturated);
    CHECK_THROWS_AS(boost_output_voltage(203.0, -0.1), SizingError);
}

TEST_CASE("DC-link capacitance") {
    const double w = 2.0 * std::numbers::pi * 50.0;
    const double c = dc_link_capacitance(1492.0, 0.1, 400.0, w);
    CHECK(c == doctest::Approx(1492.0 / (0.1 * 400.0 * 400.0 * w)));
    CHECK(c == doctest::Approx(2.97e-4).epsilon(0.01));
    CHECK(dc_link_capacitance(2 * 1492.0, 0.1, 400.0, w) == doctest::Approx(2 * c));
    CHECK(dc_link_capacitance(1492.0, 0.05, 400.0, w) == doctest::Approx(2 * c));
    CHECK_THROWS_AS(dc_link_capacitance(1492.0, 0.3, 400.0, w), SizingError);
}

TEST_CASE("grid voltage") {
    const PlantParams p;
    CHECK(grid_voltage(0.0, p) == 0.0);
    CHECK(grid_voltage(1.0 / (4.0 * p.grid_freq), p) == doctest::Approx(std::numbers::sqrt2 * 220.0));
    const int n = 20000;
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
        const double v = grid_voltage(k / (n * p.grid_freq), p);
        acc += v * v;
    }
    CHECK(std::sqrt(acc / n) == doctest::Approx(220.0).epsilon(1e-3));
}

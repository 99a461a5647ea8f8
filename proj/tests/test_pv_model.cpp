#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fogrid/error.hpp"
#include "fogrid/pv_model.hpp"

#include <cmath>

using namespace fogrid;

namespace {

PVArray default_array() {
    PVArray a;
    a.panel = fit_single_diode(PanelDatasheet{});
    return a;
}

// Residual of the panel-level single-diode equation, evaluated independently.
double diode_residual(const PVPanelParams& p, const DiodeOperatingPoint& d, double v, double i) {
    const double vd = v + i * p.r_s;
    const double shunt = std::isinf(p.r_p) ? 0.0 : vd / p.r_p;
    return d.i_ph - d.i_0 * std::expm1(vd / d.n_vt) - shunt - i;
}

} // namespace

TEST_CASE("parameter and environment validation") {
    PVPanelParams p;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    CHECK_THROWS_AS(EnvironmentInput({1600.0, 25.0}).validate(), ConfigError);
    CHECK_THROWS_AS(EnvironmentInput({1000.0, -41.0}).validate(), ConfigError);
    CHECK_NOTHROW(EnvironmentInput({0.0, 90.0}).validate());
}

TEST_CASE("fit reproduces the datasheet points") {
    const PanelDatasheet ds;
    const PVPanelParams p = fit_single_diode(ds);
    CHECK(p.r_s >= 0.0);
    CHECK(p.r_p > 0.0);
    CHECK(p.a >= 1.0);
    CHECK(p.a <= 2.0);
    CHECK(p.i_0_stc > 0.0);

    PVArray one;
    one.panel = p;
    one.n_series_panels = 1;
    const PVCurve c(one, kStc);
    CHECK(std::abs(c.current(0.0) - ds.i_sc) / ds.i_sc < 0.02);
    CHECK(std::abs(c.current(ds.v_oc)) / ds.i_sc < 0.02);
    CHECK(std::abs(c.v_oc() - ds.v_oc) / ds.v_oc < 0.02);
    CHECK(std::abs(c.power(ds.v_mpp) - ds.p_max) / ds.p_max < 0.02);
}

TEST_CASE("ideal fit reproduces V_oc and I_sc exactly") {
    FitOptions o;
    o.ideal = true;
    const PVPanelParams p = fit_single_diode(PanelDatasheet{}, o);
    CHECK(p.r_s == 0.0);
    CHECK(std::isinf(p.r_p));
    PVArray one;
    one.panel = p;
    one.n_series_panels = 1;
    const PVCurve c(one, kStc);
    CHECK(c.current(0.0) == doctest::Approx(7.84).epsilon(1e-12));
    CHECK(c.current(36.4) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
}

TEST_CASE("infeasible datasheets are rejected") {
    CHECK_THROWS_AS(fit_single_diode(PanelDatasheet{36.4, 7.84, 40.0, 215.0, 60}), ExtractionError);
    CHECK_THROWS_AS(fit_single_diode(PanelDatasheet{36.4, 7.84, 29.0, 240.0, 60}), ExtractionError);
    CHECK_THROWS_AS(fit_single_diode(PanelDatasheet{-1.0, 7.84, 29.0, 215.0, 60}), ExtractionError);
}

TEST_CASE("pv_current examples at STC") {
    const PVArray a = default_array();
    CHECK(pv_current(0.0, kStc, a) == doctest::Approx(7.84).epsilon(0.02));
    CHECK(std::abs(pv_current(7 * 36.4, kStc, a)) < 0.02 * 7.84);
    const double p203 = 203.0 * pv_current(203.0, kStc, a);
    CHECK(p203 == doctest::Approx(1492.0).epsilon(0.02));
}

TEST_CASE("array scaling") {
    PVArray a = default_array();
    PVArray one = a;
    one.n_series_panels = 1;
    const PVCurve ca(a, kStc), c1(one, kStc);
    CHECK(ca.v_oc() == doctest::Approx(7 * c1.v_oc()).epsilon(1e-9));
    PVArray two = a;
    two.n_parallel_strings = 2;
    const PVCurve c2(two, kStc);
    CHECK(c2.i_sc() == doctest::Approx(2 * ca.i_sc()).epsilon(1e-9));
    CHECK(c2.current(150.0) == doctest::Approx(2 * ca.current(150.0)).epsilon(1e-9));
}

TEST_CASE("residual tolerance, Newton/bisection agreement and monotonicity") {
    const PVArray a = default_array();
    for (EnvironmentInput env : {kStc, EnvironmentInput{800.0, 30.0}, EnvironmentInput{700.0, 35.0},
                                 EnvironmentInput{200.0, -10.0}, EnvironmentInput{1200.0, 70.0}}) {
        const PVCurve c(a, env);
        const DiodeOperatingPoint d = c.diode();
        double prev = INFINITY;
        for (int k = 0; k <= 100; ++k) {
            const double v = 1.05 * c.v_oc() * k / 100.0;
            const double i = c.current(v);
            const double ib = c.current_bisection(v);
            CHECK(std::abs(i - ib) < 1e-6);
            const double res = diode_residual(a.panel, d, v / a.n_series_panels, i / a.n_parallel_strings);
            CHECK(std::abs(res) < 1e-9);
            CHECK(i <= prev + 1e-12);
            prev = i;
        }
    }
}

TEST_CASE("current is non-decreasing in irradiance") {
    const PVArray a = default_array();
    for (double v : {0.0, 100.0, 180.0, 203.0, 230.0}) {
        double prev = -INFINITY;
        for (double g = 100.0; g <= 1500.0; g += 100.0) {
            const double i = pv_current(v, {g, 25.0}, a);
            CHECK(i >= prev - 1e-12);
            prev = i;
        }
    }
}

TEST_CASE("P(v) is unimodal") {
    const PVArray a = default_array();
    for (EnvironmentInput env : {kStc, EnvironmentInput{800.0, 30.0}, EnvironmentInput{700.0, 35.0},
                                 EnvironmentInput{300.0, 0.0}}) {
        const PVCurve c(a, env);
        int sign_changes = 0;
        double prev_dp = 0.0;
        double prev_p = c.power(0.0);
        for (int k = 1; k <= 2000; ++k) {
            const double v = c.v_oc() * k / 2000.0;
            const double p = c.power(v);
            const double dp = p - prev_p;
            if (k > 1 && (dp > 0) != (prev_dp > 0)) ++sign_changes;
            prev_dp = dp;
            prev_p = p;
        }
        CHECK(sign_changes == 1);
    }
}

TEST_CASE("apply_environment") {
    const PVPanelParams p = fit_single_diode(PanelDatasheet{});
    const DiodeOperatingPoint d = apply_environment(p, kStc);
    CHECK(d.i_ph == p.i_ph_stc);
    CHECK(d.i_0 == p.i_0_stc);
    const DiodeOperatingPoint hot = apply_environment(p, {800.0, 30.0});
    CHECK(hot.i_ph == doctest::Approx(0.8 * (p.i_ph_stc + p.k_i * 5.0)));
    CHECK(hot.i_0 > p.i_0_stc);
    CHECK(hot.i_ph > 0.0);
}

TEST_CASE("mpp_oracle") {
    const PVArray a = default_array();
    const MppPoint stc = mpp_oracle(a, kStc);
    CHECK(std::abs(stc.v_mpp - 203.0) < 4.0);
    CHECK(std::abs(stc.p_mpp - 1492.0) < 30.0);
    const MppPoint c2 = mpp_oracle(a, {800.0, 30.0});
    CHECK(c2.p_mpp == doctest::Approx(1202.0).epsilon(0.03));
    const MppPoint c3 = mpp_oracle(a, {700.0, 35.0});
    CHECK(c3.p_mpp == doctest::Approx(1050.5).epsilon(0.03));
    const MppPoint dark = mpp_oracle(a, {0.0, 25.0});
    CHECK(dark.p_mpp == 0.0);

    // Global maximum: nothing on a fine grid beats the oracle.
    const PVCurve c(a, kStc);
    for (int k = 0; k <= 5000; ++k) CHECK(c.power(c.v_oc() * k / 5000.0) <= stc.p_mpp + 1e-9);
}

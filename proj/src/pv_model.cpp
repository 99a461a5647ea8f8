#include "fogrid/pv_model.hpp"

#include "fogrid/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace fogrid {

namespace {

constexpr double kElectronCharge = 1.602176634e-19;
constexpr double kBoltzmann = 1.380649e-23;
constexpr double kKelvin = 273.15;
constexpr double kResidualTol = 1e-9;
constexpr int kMaxIter = 100;

double thermal_voltage(double a, int n_cells, double t_kelvin) {
    return a * n_cells * kBoltzmann * t_kelvin / kElectronCharge;
}

} // namespace

void PVPanelParams::validate() const {
    if (!(r_s >= 0.0)) throw ConfigError("pv.r_s must be >= 0");
    if (!(r_p > 0.0)) throw ConfigError("pv.r_p must be > 0");
    if (!(a >= 1.0 && a <= 2.0)) throw ConfigError("pv.a (ideality) must lie in [1, 2]");
    if (!(i_ph_stc > 0.0)) throw ConfigError("pv.i_ph_stc must be > 0");
    if (!(i_0_stc > 0.0)) throw ConfigError("pv.i_0_stc must be > 0");
    if (n_s_cells < 1) throw ConfigError("pv.n_s_cells must be >= 1");
    if (!std::isfinite(k_i)) throw ConfigError("pv.k_i must be finite");
}

void PVArray::validate() const {
    panel.validate();
    if (n_series_panels < 1) throw ConfigError("pv.series_panels must be >= 1");
    if (n_parallel_strings < 1) throw ConfigError("pv.parallel_strings must be >= 1");
}

void EnvironmentInput::validate() const {
    if (!(irradiance >= 0.0 && irradiance <= 1500.0)) {
        throw ConfigError("irradiance " + std::to_string(irradiance) + " W/m² outside [0, 1500]");
    }
    if (!(temperature >= -40.0 && temperature <= 90.0)) {
        throw ConfigError("temperature " + std::to_string(temperature) + " °C outside [-40, 90]");
    }
}

DiodeOperatingPoint apply_environment(const PVPanelParams& p, const EnvironmentInput& env) {
    env.validate();
    const double t_ref = 25.0 + kKelvin;
    const double t = env.temperature + kKelvin;
    DiodeOperatingPoint d;
    d.i_ph = (env.irradiance / 1000.0) * (p.i_ph_stc + p.k_i * (env.temperature - 25.0));
    d.i_ph = std::max(d.i_ph, 0.0);
    if (env.temperature == 25.0) {
        d.i_0 = p.i_0_stc;
    } else {
        const double activation = kElectronCharge * p.e_gap_ev / (p.a * kBoltzmann);
        d.i_0 = p.i_0_stc * std::pow(t / t_ref, 3.0) * std::exp(activation * (1.0 / t_ref - 1.0 / t));
    }
    d.n_vt = thermal_voltage(p.a, p.n_s_cells, t);
    return d;
}

PVCurve::PVCurve(const PVArray& array, const EnvironmentInput& env)
    : array_(array), diode_(apply_environment(array.panel, env)),
      shunt_g_(std::isinf(array.panel.r_p) ? 0.0 : 1.0 / array.panel.r_p) {
    i_sc_ = current(0.0);
    v_oc_ = solve_v_oc();
}

double PVCurve::residual(double v, double i) const {
    const double vd = v + i * array_.panel.r_s;
    return diode_.i_ph - diode_.i_0 * std::expm1(vd / diode_.n_vt) - vd * shunt_g_ - i;
}

double PVCurve::newton(double v, double guess, bool& ok) const {
    const double rs = array_.panel.r_s;
    double i = guess;
    for (int it = 0; it < kMaxIter; ++it) {
        const double vd = v + i * rs;
        const double e = std::exp(vd / diode_.n_vt);
        const double f = diode_.i_ph - diode_.i_0 * (e - 1.0) - vd * shunt_g_ - i;
        if (std::abs(f) < kResidualTol) {
            ok = true;
            return i;
        }
        const double df = -diode_.i_0 * e * rs / diode_.n_vt - rs * shunt_g_ - 1.0;
        double delta = -f / df;
        // Damping: the exponential makes full steps overshoot far from the root.
        const double max_step = std::max(1.0, std::abs(i));
        delta = std::clamp(delta, -max_step, max_step);
        i += delta;
        if (!std::isfinite(i)) break;
    }
    ok = false;
    return i;
}

double PVCurve::bisect(double v) const {
    // The residual is strictly decreasing in i, so widen until it brackets.
    double lo = -1.0;
    double hi = diode_.i_ph + 1.0;
    for (int k = 0; residual(v, lo) < 0.0 && k < 200; ++k) lo *= 2.0;
    for (int k = 0; residual(v, hi) > 0.0 && k < 200; ++k) hi = hi * 2.0 + 1.0;
    if (residual(v, lo) < 0.0 || residual(v, hi) > 0.0) {
        throw SolverError("PV current not bracketed at panel voltage " + std::to_string(v));
    }
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f = residual(v, mid);
        if (std::abs(f) < kResidualTol || hi - lo < 1e-15) return mid;
        (f > 0.0 ? lo : hi) = mid;
    }
    const double mid = 0.5 * (lo + hi);
    if (std::abs(residual(v, mid)) >= kResidualTol) {
        throw SolverError("PV current bisection did not converge at panel voltage " + std::to_string(v));
    }
    return mid;
}

double PVCurve::current(double v) const {
    if (!std::isfinite(v)) throw NumericInputError("non-finite PV voltage");
    const double v_panel = v / array_.n_series_panels;
    bool ok = false;
    double i = newton(v_panel, diode_.i_ph, ok);
    if (!ok) i = bisect(v_panel);
    return i * array_.n_parallel_strings;
}

double PVCurve::current_bisection(double v) const {
    if (!std::isfinite(v)) throw NumericInputError("non-finite PV voltage");
    return bisect(v / array_.n_series_panels) * array_.n_parallel_strings;
}

double PVCurve::solve_v_oc() const {
    if (diode_.i_ph <= 0.0) return 0.0;
    // I(V) is decreasing; find the panel voltage where it crosses zero.
    double lo = 0.0;
    double hi = diode_.n_vt;
    while (current(hi * array_.n_series_panels) > 0.0) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        (current(mid * array_.n_series_panels) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi) * array_.n_series_panels;
}

double pv_current(double v, const EnvironmentInput& env, const PVArray& array) {
    return PVCurve(array, env).current(v);
}

namespace {

struct FitResiduals {
    double i_ph, i_0;
    double mpp_current;  // I(V_mpp) - I_mpp
    double mpp_slope;    // dI/dV + I_mpp/V_mpp
};

// I_ph and I_0 are linear given (r_s, g_shunt): solve the I_sc and V_oc
// conditions for them, then report the two MPP conditions.
FitResiduals fit_residuals(const PanelDatasheet& ds, double n_vt, double rs, double g) {
    const double i_mpp = ds.p_max / ds.v_mpp;
    const double e_sc = std::expm1(ds.i_sc * rs / n_vt);
    const double e_oc = std::expm1(ds.v_oc / n_vt);
    // [1 -e_sc; 1 -e_oc] [i_ph; i_0] = [i_sc + i_sc*rs*g; v_oc*g]
    const double b1 = ds.i_sc + ds.i_sc * rs * g;
    const double b2 = ds.v_oc * g;
    const double det = -e_oc + e_sc;
    const double i_0 = (b1 - b2) / (e_oc - e_sc);
    const double i_ph = (-e_oc * b1 + e_sc * b2) / det;

    const double vd = ds.v_mpp + i_mpp * rs;
    const double e = std::exp(vd / n_vt);
    FitResiduals r{i_ph, i_0, 0.0, 0.0};
    r.mpp_current = i_ph - i_0 * (e - 1.0) - vd * g - i_mpp;
    const double cond = i_0 / n_vt * e + g;
    r.mpp_slope = -cond / (1.0 + cond * rs) + i_mpp / ds.v_mpp;
    return r;
}

} // namespace

PVPanelParams fit_single_diode(const PanelDatasheet& ds, const FitOptions& opts) {
    if (!(ds.v_oc > 0.0 && ds.i_sc > 0.0 && ds.v_mpp > 0.0 && ds.p_max > 0.0)) {
        throw ExtractionError("datasheet values must all be positive");
    }
    if (!(ds.v_mpp < ds.v_oc)) throw ExtractionError("datasheet requires V_mpp < V_oc");
    if (!(ds.p_max / ds.v_mpp < ds.i_sc)) throw ExtractionError("datasheet requires P_max/V_mpp < I_sc");
    if (ds.n_s_cells < 1) throw ExtractionError("datasheet needs n_s_cells >= 1");

    PVPanelParams p;
    p.a = opts.ideality;
    p.k_i = opts.k_i;
    p.n_s_cells = ds.n_s_cells;
    const double n_vt = thermal_voltage(p.a, ds.n_s_cells, 25.0 + kKelvin);

    if (opts.ideal) {
        p.r_s = 0.0;
        p.r_p = std::numeric_limits<double>::infinity();
        p.i_ph_stc = ds.i_sc;
        p.i_0_stc = ds.i_sc / std::expm1(ds.v_oc / n_vt);
        p.validate();
        return p;
    }

    const double i_mpp = ds.p_max / ds.v_mpp;
    const double rs_max = (ds.v_oc - ds.v_mpp) / i_mpp;

    // Full four-condition solve in (r_s, g) by damped Newton with a
    // finite-difference Jacobian.
    double rs = 0.5 * rs_max;
    double g = 1.0 / (100.0 * ds.v_oc / ds.i_sc);
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
        const FitResiduals r = fit_residuals(ds, n_vt, rs, g);
        if (std::abs(r.mpp_current) < 1e-12 && std::abs(r.mpp_slope) < 1e-12) {
            converged = true;
            break;
        }
        const double hr = 1e-7 * std::max(rs, 1e-3);
        const double hg = 1e-7 * std::max(std::abs(g), 1e-6);
        const FitResiduals rr = fit_residuals(ds, n_vt, rs + hr, g);
        const FitResiduals rg = fit_residuals(ds, n_vt, rs, g + hg);
        const double j11 = (rr.mpp_current - r.mpp_current) / hr;
        const double j12 = (rg.mpp_current - r.mpp_current) / hg;
        const double j21 = (rr.mpp_slope - r.mpp_slope) / hr;
        const double j22 = (rg.mpp_slope - r.mpp_slope) / hg;
        const double det = j11 * j22 - j12 * j21;
        if (!std::isfinite(det) || det == 0.0) break;
        double drs = -(j22 * r.mpp_current - j12 * r.mpp_slope) / det;
        double dg = -(-j21 * r.mpp_current + j11 * r.mpp_slope) / det;
        drs = std::clamp(drs, -0.5 * rs_max, 0.5 * rs_max);
        rs = std::clamp(rs + drs, 0.0, rs_max);
        g += dg;
        if (!std::isfinite(g)) break;
    }

    if (!converged || g < 0.0) {
        // No physical shunt satisfies the slope condition at this ideality:
        // drop the shunt and fit r_s to the MPP current alone. The residual
        // is decreasing in r_s.
        g = 0.0;
        double lo = 0.0;
        double hi = rs_max;
        if (fit_residuals(ds, n_vt, lo, g).mpp_current < 0.0) {
            throw ExtractionError("datasheet MPP is unreachable even with r_s = 0 at ideality " +
                                  std::to_string(p.a));
        }
        if (fit_residuals(ds, n_vt, hi, g).mpp_current > 0.0) {
            throw ExtractionError("datasheet MPP needs r_s beyond (V_oc - V_mpp)/I_mpp");
        }
        for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
            const double mid = 0.5 * (lo + hi);
            (fit_residuals(ds, n_vt, mid, g).mpp_current > 0.0 ? lo : hi) = mid;
        }
        rs = 0.5 * (lo + hi);
    }

    const FitResiduals r = fit_residuals(ds, n_vt, rs, g);
    p.r_s = rs;
    p.r_p = g > 0.0 ? 1.0 / g : std::numeric_limits<double>::infinity();
    p.i_ph_stc = r.i_ph;
    p.i_0_stc = r.i_0;
    if (!(p.i_0_stc > 0.0) || !(p.i_ph_stc > 0.0)) {
        throw ExtractionError("extraction produced non-positive diode currents");
    }
    p.validate();
    return p;
}

MppPoint mpp_oracle(const PVArray& array, const EnvironmentInput& env) {
    const PVCurve curve(array, env);
    const double v_oc = curve.v_oc();
    if (v_oc <= 0.0) return {0.0, 0.0};

    constexpr double kResolution = 0.01;
    double best_v = 0.0;
    double best_p = 0.0;
    for (double v = 0.0; v <= v_oc; v += kResolution) {
        const double p = curve.power(v);
        if (p > best_p) {
            best_p = p;
            best_v = v;
        }
    }

    // Golden-section refinement on the bracketing bins.
    double lo = std::max(0.0, best_v - kResolution);
    double hi = std::min(v_oc, best_v + kResolution);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double pc = curve.power(c);
    double pd = curve.power(d);
    for (int it = 0; it < 80 && hi - lo > 1e-10; ++it) {
        if (pc > pd) {
            hi = d;
            d = c;
            pd = pc;
            c = hi - inv_phi * (hi - lo);
            pc = curve.power(c);
        } else {
            lo = c;
            c = d;
            pc = pd;
            d = lo + inv_phi * (hi - lo);
            pd = curve.power(d);
        }
    }
    const double v = 0.5 * (lo + hi);
    const double p = curve.power(v);
    if (p > best_p) return {v, p};
    return {best_v, best_p};
}

} // namespace fogrid

#pragma once

#include <limits>

namespace fogrid {

// Panel-level single-diode parameters at STC (1000 W/m², 25 °C).
struct PVPanelParams {
    double i_ph_stc = 0.0;  // A
    double i_0_stc = 0.0;   // A
    double r_s = 0.0;       // ohm
    double r_p = std::numeric_limits<double>::infinity();  // ohm; inf = no shunt path
    double a = 1.3;         // diode ideality
    int n_s_cells = 60;
    double k_i = 0.04;      // A/°C, short-circuit current temperature coefficient
    double e_gap_ev = 1.12; // bandgap used by the saturation-current temperature law

    void validate() const;
};

struct PVArray {
    PVPanelParams panel;
    int n_series_panels = 7;
    int n_parallel_strings = 1;

    void validate() const;
};

struct EnvironmentInput {
    double irradiance = 1000.0;  // W/m²
    double temperature = 25.0;   // °C

    void validate() const;
    friend bool operator==(const EnvironmentInput&, const EnvironmentInput&) = default;
};

inline constexpr EnvironmentInput kStc{1000.0, 25.0};

struct PanelDatasheet {
    double v_oc = 36.4;
    double i_sc = 7.84;
    double v_mpp = 29.0;
    double p_max = 215.0;
    int n_s_cells = 60;

    friend bool operator==(const PanelDatasheet&, const PanelDatasheet&) = default;
};

struct FitOptions {
    double ideality = 1.3;
    double k_i = 0.04;
    bool ideal = false;  // r_s = 0, r_p = inf; matches V_oc and I_sc exactly

    friend bool operator==(const FitOptions&, const FitOptions&) = default;
};

// Photocurrent and saturation current after irradiance/temperature scaling,
// plus the modified thermal voltage a*Ns*k*T/q, all at panel level.
struct DiodeOperatingPoint {
    double i_ph = 0.0;
    double i_0 = 0.0;
    double n_vt = 0.0;
};

DiodeOperatingPoint apply_environment(const PVPanelParams& params, const EnvironmentInput& env);

// I-V curve of an array at one fixed environment. Construction does the
// environment scaling once; current() is then cheap enough to call from
// every integrator stage.
class PVCurve {
public:
    PVCurve(const PVArray& array, const EnvironmentInput& env);

    // Array terminal current at array voltage v. Damped Newton on the
    // implicit diode equation with a bisection fallback; throws SolverError
    // if neither reaches |residual| < 1e-9 A.
    double current(double v) const;

    // Bracketing solve only; used as the cross-check for current().
    double current_bisection(double v) const;

    double power(double v) const { return v * current(v); }
    double v_oc() const noexcept { return v_oc_; }
    double i_sc() const noexcept { return i_sc_; }
    const DiodeOperatingPoint& diode() const noexcept { return diode_; }

private:
    double residual(double v_panel, double i_panel) const;
    double newton(double v_panel, double guess, bool& ok) const;
    double bisect(double v_panel) const;
    double solve_v_oc() const;

    PVArray array_;
    DiodeOperatingPoint diode_;
    double shunt_g_;
    double v_oc_ = 0.0;
    double i_sc_ = 0.0;
};

double pv_current(double v, const EnvironmentInput& env, const PVArray& array);

// Five-parameter extraction from datasheet values. Fixes the ideality and
// solves I_sc, V_oc, the MPP current and dP/dV = 0 at the MPP. If that needs
// a negative shunt conductance the shunt is dropped (r_p = inf) and r_s alone
// is fitted to the MPP current. Throws ExtractionError on infeasible input.
PVPanelParams fit_single_diode(const PanelDatasheet& ds, const FitOptions& opts = {});

struct MppPoint {
    double v_mpp = 0.0;
    double p_mpp = 0.0;

    friend bool operator==(const MppPoint&, const MppPoint&) = default;
};

// Brute-force scan at 0.01 V, refined by golden section around the best bin.
MppPoint mpp_oracle(const PVArray& array, const EnvironmentInput& env);

} // namespace fogrid

#pragma once

namespace fogrid {

// Optional conduction losses. All zero gives the lossless averaged model.
struct Parasitics {
    double r_lo = 0.0;  // boost inductor series resistance, ohm
    double r_lg = 0.0;  // grid filter inductor series resistance, ohm
    double r_on = 0.0;  // per-switch on-resistance, ohm

    bool lossless() const noexcept { return r_lo == 0.0 && r_lg == 0.0 && r_on == 0.0; }
    friend bool operator==(const Parasitics&, const Parasitics&) = default;
};

struct PlantParams {
    double c_pv = 0.2e-3;
    double l_o = 100e-3;
    double c_dc = 5e-3;
    double l_g = 9e-3;
    double grid_v_rms = 220.0;
    double grid_freq = 50.0;
    double f_sw_boost = 100e3;
    double f_sw_inv = 10e3;
    Parasitics parasitics;

    void validate() const;
    double grid_period() const noexcept { return 1.0 / grid_freq; }
    friend bool operator==(const PlantParams&, const PlantParams&) = default;
};

// x1 PV voltage, x2 boost inductor current, x3 DC-link voltage, x4 grid current.
struct PlantState {
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;
    double x4 = 0.0;

    friend bool operator==(const PlantState&, const PlantState&) = default;
};

inline PlantState operator+(const PlantState& a, const PlantState& b) {
    return {a.x1 + b.x1, a.x2 + b.x2, a.x3 + b.x3, a.x4 + b.x4};
}
inline PlantState operator*(double k, const PlantState& s) {
    return {k * s.x1, k * s.x2, k * s.x3, k * s.x4};
}

// u1 boost duty in [0, 1], u2 inverter modulation in [-1, 1].
struct ControlInputs {
    double u1 = 0.0;
    double u2 = 0.0;

    ControlInputs saturated() const noexcept;
};

// Averaged four-state model:
//   c_pv x1' = i_pv - x2
//   l_o  x2' = x1 - (1 - u1) x3
//   c_dc x3' = (1 - u1) x2 - u2 x4
//   l_g  x4' = u2 x3 - v_g
// with resistive drops r_lo x2 + u1 r_on x2 and (r_lg + 2 r_on) x4 when
// parasitics are configured. u may also be a switch state (mu1, mu2).
PlantState plant_derivatives(const PlantState& s, const ControlInputs& u, double i_pv, double v_g,
                             const PlantParams& p);

// Stored energy 1/2 (c_pv x1² + l_o x2² + c_dc x3² + l_g x4²).
double stored_energy(const PlantState& s, const PlantParams& p);

struct SwitchStates {
    int mu1 = 0;  // boost switch: 1 conducting
    int mu2 = 0;  // H-bridge output: -1, 0, +1
};

// Boost: triangular carrier in [0, 1] at f_sw_boost, on while carrier < u1.
// Inverter: unipolar sine-triangle at f_sw_inv; leg A compares u2 and leg B
// compares -u2 against a [-1, 1] triangle, mu2 = A - B.
SwitchStates pwm_switch_states(const ControlInputs& u, double t, const PlantParams& p);

// Symmetric triangle in [0, 1], zero at t = 0 and at every period boundary.
double triangle_carrier(double t, double freq);

struct BoostSizing {
    double v_in = 0.0;
    double v_out = 0.0;
    double delta_i = 0.0;  // A, inductor ripple
    double f_s = 0.0;      // Hz
};

double boost_min_inductance(const BoostSizing& z);

struct BoostOutput {
    double v_out = 0.0;
    bool duty_saturated = false;  // duty was clipped to the 0.95 ceiling
};

BoostOutput boost_output_voltage(double v_in, double duty);

inline constexpr double kDutyCeiling = 0.95;

// C = P / (dV * V_dc * omega) with dV = delta_v_frac * V_dc.
double dc_link_capacitance(double p_g, double delta_v_frac, double v_dc, double omega);

// sqrt(2) V_rms sin(2 pi f t)
double grid_voltage(double t, const PlantParams& p);

} // namespace fogrid

#include "fogrid/power_stage.hpp"

#include "fogrid/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace fogrid {

void PlantParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw ConfigError(std::string("plant.") + name + " must be positive");
        }
    };
    positive(c_pv, "c_pv");
    positive(l_o, "l_o");
    positive(c_dc, "c_dc");
    positive(l_g, "l_g");
    positive(grid_v_rms, "grid_v_rms");
    positive(grid_freq, "grid_freq");
    positive(f_sw_boost, "f_sw_boost");
    positive(f_sw_inv, "f_sw_inv");
    if (!(f_sw_boost > f_sw_inv && f_sw_inv > grid_freq)) {
        throw ConfigError("plant switching frequencies must satisfy f_sw_boost > f_sw_inv > grid_freq");
    }
    if (parasitics.r_lo < 0.0 || parasitics.r_lg < 0.0 || parasitics.r_on < 0.0) {
        throw ConfigError("plant.parasitics resistances must be >= 0");
    }
}

ControlInputs ControlInputs::saturated() const noexcept {
    return {std::clamp(u1, 0.0, 1.0), std::clamp(u2, -1.0, 1.0)};
}

PlantState plant_derivatives(const PlantState& s, const ControlInputs& u, double i_pv, double v_g,
                             const PlantParams& p) {
    const Parasitics& r = p.parasitics;
    const double off = 1.0 - u.u1;
    PlantState d;
    d.x1 = (i_pv - s.x2) / p.c_pv;
    d.x2 = (s.x1 - off * s.x3 - (r.r_lo + u.u1 * r.r_on) * s.x2) / p.l_o;
    d.x3 = (off * s.x2 - u.u2 * s.x4) / p.c_dc;
    d.x4 = (u.u2 * s.x3 - v_g - (r.r_lg + 2.0 * r.r_on) * s.x4) / p.l_g;
    return d;
}

double stored_energy(const PlantState& s, const PlantParams& p) {
    return 0.5 * (p.c_pv * s.x1 * s.x1 + p.l_o * s.x2 * s.x2 + p.c_dc * s.x3 * s.x3 +
                  p.l_g * s.x4 * s.x4);
}

double triangle_carrier(double t, double freq) {
    double phase = t * freq;
    phase -= std::floor(phase);
    return phase < 0.5 ? 2.0 * phase : 2.0 - 2.0 * phase;
}

SwitchStates pwm_switch_states(const ControlInputs& u, double t, const PlantParams& p) {
    const ControlInputs c = u.saturated();
    SwitchStates out;
    // Continuous mode caps mean the comparator never fires at exactly 0 or 1.
    out.mu1 = (c.u1 >= 1.0 || triangle_carrier(t, p.f_sw_boost) < c.u1) ? 1 : 0;
    const double tri = 2.0 * triangle_carrier(t, p.f_sw_inv) - 1.0;
    const int leg_a = c.u2 > tri ? 1 : 0;
    const int leg_b = -c.u2 > tri ? 1 : 0;
    out.mu2 = leg_a - leg_b;
    return out;
}

double boost_min_inductance(const BoostSizing& z) {
    if (!(z.v_in > 0.0)) throw SizingError("boost sizing needs v_in > 0");
    if (!(z.v_in < z.v_out)) throw SizingError("boost sizing needs v_in < v_out");
    if (!(z.delta_i > 0.0)) throw SizingError("boost sizing needs a positive ripple current");
    if (!(z.f_s > 0.0)) throw SizingError("boost sizing needs a positive switching frequency");
    return z.v_in * (z.v_out - z.v_in) / (z.delta_i * z.v_out * z.f_s);
}

BoostOutput boost_output_voltage(double v_in, double duty) {
    if (!(duty >= 0.0)) throw SizingError("boost duty must be >= 0");
    BoostOutput out;
    out.duty_saturated = duty >= kDutyCeiling;
    const double d = std::min(duty, kDutyCeiling);
    out.v_out = v_in / (1.0 - d);
    return out;
}

double dc_link_capacitance(double p_g, double delta_v_frac, double v_dc, double omega) {
    if (!(p_g > 0.0 && v_dc > 0.0 && omega > 0.0)) {
        throw SizingError("DC-link sizing needs positive power, voltage and frequency");
    }
    if (!(delta_v_frac > 0.0 && delta_v_frac <= 0.2)) {
        throw SizingError("DC-link ripple fraction must lie in (0, 0.2]");
    }
    return p_g / (delta_v_frac * v_dc * v_dc * omega);
}

double grid_voltage(double t, const PlantParams& p) {
    return std::numbers::sqrt2 * p.grid_v_rms * std::sin(2.0 * std::numbers::pi * p.grid_freq * t);
}

} // namespace fogrid

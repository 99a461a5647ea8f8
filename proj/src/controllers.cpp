#include "fogrid/controllers.hpp"

#include "fogrid/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace fogrid {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ConfigError(std::string("controller.") + name + " must be positive");
    }
}

void require_order(double v, const char* name) {
    if (!(v > 0.0 && v <= 1.0)) {
        throw ConfigError(std::string("controller.") + name + " must lie in (0, 1]");
    }
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

} // namespace

void ControllerConfig::validate() const {
    require_positive(c1, "c1");
    require_positive(c2, "c2");
    require_positive(c3, "c3");
    require_positive(kp, "kp");
    if (!(ki >= 0.0) || !std::isfinite(ki)) {
        throw ConfigError("controller.ki must be >= 0");
    }
    require_order(alpha1, "alpha1");
    require_order(alpha2, "alpha2");
    require_order(alpha_pi, "alpha_pi");
    require_positive(voltage_error_scale, "voltage_error_scale");
    require_positive(grid_error_scale, "grid_error_scale");
    require_positive(mppt_step, "mppt_step");
    require_positive(mppt_period, "mppt_period");
    require_positive(v_dc_ref, "v_dc_ref");
    require_positive(rate_voltage_loop, "rate_voltage_loop");
    require_positive(rate_current_loop, "rate_current_loop");
    require_positive(ref_derivative_corner_hz, "ref_derivative_corner_hz");
    require_positive(rated_power, "rated_power");
    require_positive(current_limit_factor, "current_limit_factor");
    if (!(x3_floor >= 0.0) || x3_floor >= v_dc_ref) {
        throw ConfigError("controller.x3_floor must lie in [0, v_dc_ref)");
    }
    if (memory == 0) {
        throw ConfigError("controller.memory must be at least 1");
    }
}

ControllerConfig ControllerConfig::integer_order() const {
    ControllerConfig c = *this;
    c.alpha1 = 1.0;
    c.alpha2 = 1.0;
    c.alpha_pi = 1.0;
    return c;
}

ControllerConfig ControllerConfig::with_mode(ControllerMode mode) const {
    return mode == ControllerMode::IntegerOrder ? integer_order() : *this;
}

double pno_update(double v_pv, double i_pv, MpptState& st, const ControllerConfig& cfg, double v_oc) {
    const double p = v_pv * i_pv;
    if (!st.primed) {
        st.primed = true;
        if (st.direction == 0) st.direction = -1;  // default search is downhill from v_oc
    } else {
        const double dp = p - st.prev_p;
        const double dv = v_pv - st.prev_v;
        // Climb towards dP/dV = 0: step up while power rises with voltage.
        if (dp * dv > 0.0) {
            st.direction = 1;
        } else if (dp * dv < 0.0) {
            st.direction = -1;
        } else {
            st.direction = -st.direction;
        }
    }
    st.prev_p = p;
    st.prev_v = v_pv;
    const double lo = 0.5 * v_oc;
    const double hi = v_oc;
    st.v_ref = std::clamp(st.v_ref + st.direction * cfg.mppt_step, lo, std::max(lo, hi));
    return st.v_ref;
}

VoltageLoop::VoltageLoop(const ControllerConfig& cfg, const PlantParams& plant)
    : c1_(cfg.c1), c2_(cfg.c2), c_pv_(plant.c_pv), l_o_(plant.l_o), scale_(cfg.voltage_error_scale),
      floor_(cfg.x3_floor), period_(1.0 / cfg.rate_voltage_loop),
      lpf_gain_(1.0 - std::exp(-2.0 * std::numbers::pi * cfg.ref_derivative_corner_hz / cfg.rate_voltage_loop)),
      d_alpha_(FracOrder(cfg.alpha1), period_, cfg.memory),
      d_neg_alpha_(FracOrder(-cfg.alpha1), period_, cfg.memory),
      d_neg_2alpha_(gl_compose(FracOrder(-cfg.alpha1), FracOrder(-cfg.alpha1), period_, cfg.memory)) {}

VoltageLoop::Output VoltageLoop::step(const PlantState& s, double i_pv, double x1_ref) {
    Output out;
    ++steps_;
    if (!(s.x3 > floor_)) {
        ++events_.low_dc_link;
        out.u1 = u1_;
        out.held = true;
        return out;
    }

    const double raw_rate = prev_x1_ref_ ? (x1_ref - *prev_x1_ref_) / period_ : 0.0;
    prev_x1_ref_ = x1_ref;
    x1_ref_rate_ += lpf_gain_ * (raw_rate - x1_ref_rate_);

    const double e1 = scale_ * c_pv_ * (s.x1 - x1_ref);
    const double x2_ref = i_pv + c1_ * e1 - c_pv_ * x1_ref_rate_;
    const double x2_ref_rate = prev_x2_ref_ ? (x2_ref - *prev_x2_ref_) / period_ : 0.0;
    prev_x2_ref_ = x2_ref;

    const double e2 = l_o_ * d_alpha_.step(s.x2 - x2_ref);
    const double int_e2 = d_neg_alpha_.step(e2);
    const double int2_e1 = d_neg_2alpha_.step(e1);

    const double raw = 1.0 - (s.x1 + c2_ * int_e2 - l_o_ * x2_ref_rate - int2_e1 / l_o_) / s.x3;
    const double u1 = std::clamp(raw, 0.0, 1.0);
    out.saturated = u1 != raw;
    if (out.saturated) ++events_.saturations;

    u1_ = u1;
    v1_ = 0.5 * e1 * e1;
    v2_ = 0.5 * e2 * e2 + v1_;
    out.u1 = u1;
    out.e1 = e1;
    out.e2 = e2;
    out.x2_ref = x2_ref;
    out.x2_ref_rate = x2_ref_rate;
    return out;
}

DcLinkLoop::DcLinkLoop(const ControllerConfig& cfg, const PlantParams& plant)
    : kp_(cfg.kp), ki_(cfg.ki),
      beta_limit_(cfg.current_limit_factor * cfg.rated_power / (plant.grid_v_rms * plant.grid_v_rms)),
      integral_(FracOrder(-cfg.alpha_pi), 1.0 / cfg.rate_current_loop, cfg.memory) {}

double DcLinkLoop::step(double x3, double x3_ref) {
    const double eps = x3 * x3 - x3_ref * x3_ref;
    // Conditional integration: while clamped, drop error that pushes further
    // into the clamp.
    const double pushed = (saturated_sign_ != 0 && sign_of(eps) == saturated_sign_) ? 0.0 : eps;
    const double raw = kp_ * eps + ki_ * integral_.step(pushed);
    beta_ = std::clamp(raw, -beta_limit_, beta_limit_);
    saturated_sign_ = beta_ == raw ? 0 : sign_of(raw);
    if (saturated_sign_ != 0) ++events_.saturations;
    return beta_;
}

GridCurrentLoop::GridCurrentLoop(const ControllerConfig& cfg, const PlantParams& plant)
    : c3_(cfg.c3), l_g_(plant.l_g), scale_(cfg.grid_error_scale), floor_(cfg.x3_floor),
      period_(1.0 / cfg.rate_current_loop),
      d_alpha_(FracOrder(cfg.alpha2), period_, cfg.memory),
      d_neg_alpha_(FracOrder(-cfg.alpha2), period_, cfg.memory) {}

GridCurrentLoop::Output GridCurrentLoop::step(const PlantState& s, double v_g, double beta) {
    Output out;
    ++steps_;
    out.x4_ref = beta * v_g;
    if (!(s.x3 > floor_)) {
        ++events_.low_dc_link;
        out.u2 = u2_;
        out.held = true;
        return out;
    }

    const double x4_ref_rate = prev_x4_ref_ ? (out.x4_ref - *prev_x4_ref_) / period_ : 0.0;
    prev_x4_ref_ = out.x4_ref;

    const double e3 = scale_ * l_g_ * d_alpha_.step(s.x4 - out.x4_ref);
    const double int_e3 = d_neg_alpha_.step(e3);
    const double raw = (v_g + l_g_ * x4_ref_rate - c3_ * int_e3) / s.x3;
    const double u2 = std::clamp(raw, -1.0, 1.0);
    out.saturated = u2 != raw;
    if (out.saturated) ++events_.saturations;

    u2_ = u2;
    v3_ = 0.5 * e3 * e3;
    out.u2 = u2;
    out.e3 = e3;
    return out;
}

void LyapunovProbe::observe_voltage_loop(const VoltageLoop& loop) {
    if (voltage_samples_ > 0) {
        sample_.dv1 = (loop.v1() - sample_.v1) / loop.period();
        sample_.dv2 = (loop.v2() - sample_.v2) / loop.period();
    }
    sample_.v1 = loop.v1();
    sample_.v2 = loop.v2();
    ++voltage_samples_;
}

void LyapunovProbe::observe_grid_loop(const GridCurrentLoop& loop) {
    if (grid_samples_ > 0) {
        sample_.dv3 = (loop.v3() - sample_.v3) / loop.period();
    }
    sample_.v3 = loop.v3();
    ++grid_samples_;
}

} // namespace fogrid

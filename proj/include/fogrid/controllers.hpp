#pragma once

#include "fogrid/frac_ops.hpp"
#include "fogrid/power_stage.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>

namespace fogrid {

enum class ControllerMode { FractionalOrder, IntegerOrder };

struct ControllerConfig {
    // Backstepping gains.
    double c1 = 5e5;
    double c2 = 500.0;
    double c3 = 5e5;
    // DC-link PI gains on the squared-voltage error.
    double kp = 2.5e-6;
    double ki = 1.0e-4;
    // Fractional orders; all 1 gives the integer-order baseline.
    double alpha1 = 0.875;
    double alpha2 = 0.6;
    double alpha_pi = 0.95;
    // Multiplies e1 = c_pv (x1 - x1*) and e3 = l_g D^a (x4 - x4*). The
    // loop poles sit at c1 * scale and c3 * scale; these keep them well
    // inside the sampled loops' stability limits.
    double voltage_error_scale = 0.01;
    double grid_error_scale = 0.004;

    double mppt_step = 0.5;       // V
    double mppt_period = 0.01;    // s
    double v_dc_ref = 400.0;      // V
    double rate_voltage_loop = 100e3;
    double rate_current_loop = 10e3;
    double ref_derivative_corner_hz = 1000.0;
    double x3_floor = 50.0;
    double rated_power = 1492.0;      // W, sets the grid-current clamp
    double current_limit_factor = 1.5;
    std::size_t memory = kDefaultMemory;

    void validate() const;
    bool is_integer_order() const noexcept {
        return alpha1 == 1.0 && alpha2 == 1.0 && alpha_pi == 1.0;
    }
    ControllerConfig integer_order() const;
    ControllerConfig with_mode(ControllerMode mode) const;

    friend bool operator==(const ControllerConfig&, const ControllerConfig&) = default;
};

// Perturb and observe reference generator.
struct MpptState {
    double v_ref = 0.0;
    double prev_p = 0.0;
    double prev_v = 0.0;
    int direction = -1;
    bool primed = false;  // false until the first observation
};

// One P&O decision. Steps v_ref up when dP*dV > 0, down when dP*dV < 0,
// reverses on a flat reading, then clamps to [0.5 v_oc, v_oc].
double pno_update(double v_pv, double i_pv, MpptState& st, const ControllerConfig& cfg, double v_oc);

struct LoopEventCounters {
    std::uint64_t saturations = 0;
    std::uint64_t low_dc_link = 0;
};

// PV-voltage loop: tracks x1* and drives the boost duty u1.
class VoltageLoop {
public:
    VoltageLoop(const ControllerConfig& cfg, const PlantParams& plant);

    struct Output {
        double u1 = 0.0;
        double e1 = 0.0;
        double e2 = 0.0;
        double x2_ref = 0.0;
        double x2_ref_rate = 0.0;
        bool held = false;
        bool saturated = false;
    };

    Output step(const PlantState& s, double i_pv, double x1_ref);

    double v1() const noexcept { return v1_; }
    double v2() const noexcept { return v2_; }
    double period() const noexcept { return period_; }
    const LoopEventCounters& events() const noexcept { return events_; }
    std::size_t steps() const noexcept { return steps_; }

private:
    double c1_, c2_, c_pv_, l_o_, scale_, floor_, period_;
    double lpf_gain_;
    GLDifferintegrator d_alpha_;      // D^a (x2 - x2*)
    GLDifferintegrator d_neg_alpha_;  // D^-a e2
    GLDifferintegrator d_neg_2alpha_; // D^-2a e1
    std::optional<double> prev_x1_ref_;
    std::optional<double> prev_x2_ref_;
    double x1_ref_rate_ = 0.0;
    double u1_ = 0.0;
    double v1_ = 0.0;
    double v2_ = 0.0;
    LoopEventCounters events_;
    std::size_t steps_ = 0;
};

// DC-link loop: beta = (kp + ki D^-a)(x3² - x3*²) with conditional
// integration while beta sits on its clamp.
class DcLinkLoop {
public:
    DcLinkLoop(const ControllerConfig& cfg, const PlantParams& plant);

    double step(double x3, double x3_ref);

    double beta() const noexcept { return beta_; }
    double beta_limit() const noexcept { return beta_limit_; }
    const LoopEventCounters& events() const noexcept { return events_; }

private:
    double kp_, ki_, beta_limit_;
    GLDifferintegrator integral_;
    double beta_ = 0.0;
    int saturated_sign_ = 0;
    LoopEventCounters events_;
};

// Grid-current loop: tracks x4* = beta v_g and drives the inverter
// modulation u2.
class GridCurrentLoop {
public:
    GridCurrentLoop(const ControllerConfig& cfg, const PlantParams& plant);

    struct Output {
        double u2 = 0.0;
        double x4_ref = 0.0;
        double e3 = 0.0;
        bool held = false;
        bool saturated = false;
    };

    Output step(const PlantState& s, double v_g, double beta);

    double v3() const noexcept { return v3_; }
    double period() const noexcept { return period_; }
    const LoopEventCounters& events() const noexcept { return events_; }
    std::size_t steps() const noexcept { return steps_; }

private:
    double c3_, l_g_, scale_, floor_, period_;
    GLDifferintegrator d_alpha_;      // D^a (x4 - x4*)
    GLDifferintegrator d_neg_alpha_;  // D^-a e3
    std::optional<double> prev_x4_ref_;
    double u2_ = 0.0;
    double v3_ = 0.0;
    LoopEventCounters events_;
    std::size_t steps_ = 0;
};

struct LyapunovSample {
    double v1 = 0.0, v2 = 0.0, v3 = 0.0;
    double dv1 = 0.0, dv2 = 0.0, dv3 = 0.0;
};

// Backward-difference monitor. Feed it after every loop step; derivatives
// are valid once each loop has been sampled twice.
class LyapunovProbe {
public:
    void observe_voltage_loop(const VoltageLoop& loop);
    void observe_grid_loop(const GridCurrentLoop& loop);

    bool ready() const noexcept { return voltage_samples_ >= 2 && grid_samples_ >= 2; }
    const LyapunovSample& sample() const noexcept { return sample_; }

private:
    LyapunovSample sample_;
    std::size_t voltage_samples_ = 0;
    std::size_t grid_samples_ = 0;
};

} // namespace fogrid

#include "fogrid/sim_engine.hpp"

#include "fogrid/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fogrid {

namespace {

std::size_t steps_for(double span, double dt) {
    return static_cast<std::size_t>(std::llround(span / dt));
}

// Number of integration steps per controller period; the period must be an
// integer multiple of dt.
std::size_t ratio_for(double period, double dt, const char* name) {
    const double r = period / dt;
    const double rr = std::round(r);
    if (rr < 1.0 || std::abs(r - rr) > 1e-6 * std::max(1.0, rr)) {
        throw ConfigError(std::string("scenario.dt must divide ") + name);
    }
    return static_cast<std::size_t>(rr);
}

bool diverged(const PlantState& s) {
    auto bad = [](double v) { return !std::isfinite(v) || std::abs(v) > 1e6; };
    return bad(s.x1) || bad(s.x2) || bad(s.x3) || bad(s.x4);
}

struct Integrator {
    const PlantParams& plant;
    const PVCurve& curve;

    PlantState f(const PlantState& s, const ControlInputs& u, double t) const {
        return plant_derivatives(s, u, curve.current(s.x1), grid_voltage(t, plant), plant);
    }

    PlantState rk4(const PlantState& s, const ControlInputs& u, double t, double dt) const {
        const PlantState k1 = f(s, u, t);
        const PlantState k2 = f(s + (0.5 * dt) * k1, u, t + 0.5 * dt);
        const PlantState k3 = f(s + (0.5 * dt) * k2, u, t + 0.5 * dt);
        const PlantState k4 = f(s + dt * k3, u, t + dt);
        return s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    PlantState euler(const PlantState& s, const ControlInputs& u, double t, double dt) const {
        const SwitchStates sw = pwm_switch_states(u, t, plant);
        const ControlInputs mu{static_cast<double>(sw.mu1), static_cast<double>(sw.mu2)};
        return s + dt * f(s, mu, t);
    }
};

} // namespace

const char* event_kind_name(EventKind k) noexcept {
    switch (k) {
    case EventKind::EnvironmentChange: return "environment_change";
    case EventKind::VoltageLoopSaturated: return "u1_saturated";
    case EventKind::GridLoopSaturated: return "u2_saturated";
    case EventKind::BetaSaturated: return "beta_saturated";
    case EventKind::LowDcLink: return "low_dc_link";
    }
    return "unknown";
}

double Scenario::effective_dt() const noexcept {
    if (dt) return *dt;
    return fidelity == Fidelity::Switched ? kDefaultDtSwitched : kDefaultDtAveraged;
}

PVArray Scenario::array() const {
    PVArray a;
    a.panel = fit_single_diode(datasheet, fit);
    a.n_series_panels = n_series_panels;
    a.n_parallel_strings = n_parallel_strings;
    a.validate();
    return a;
}

PlantState Scenario::initial(const PVArray& arr) const {
    if (initial_state) return *initial_state;
    EnvironmentInput env = kStc;
    if (!schedule.empty()) env = {schedule.front().irradiance, schedule.front().temperature};
    const PVCurve curve(arr, env);
    return {0.9 * curve.v_oc(), 0.0, controller.v_dc_ref, 0.0};
}

double Scenario::total_duration() const noexcept {
    double t = 0.0;
    for (const auto& seg : schedule) t += seg.duration;
    return t;
}

void Scenario::validate() const {
    plant.validate();
    controller.validate();
    for (const auto& seg : schedule) {
        if (!(seg.duration >= 0.0) || !std::isfinite(seg.duration)) {
            throw ConfigError("schedule.duration must be >= 0");
        }
        EnvironmentInput{seg.irradiance, seg.temperature}.validate();
    }
    if (n_series_panels < 1 || n_parallel_strings < 1) {
        throw ConfigError("pv.n_series_panels and pv.n_parallel_strings must be >= 1");
    }
    const double h = effective_dt();
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("scenario.dt must be positive");
    const double limit = fidelity == Fidelity::Switched ? 1.0 / (10.0 * plant.f_sw_boost)
                                                        : 1.0 / (10.0 * plant.f_sw_inv);
    if (h > limit * (1.0 + 1e-9)) {
        throw ConfigError(fidelity == Fidelity::Switched
                              ? "scenario.dt must be <= 1/(10 f_sw_boost) in switched mode"
                              : "scenario.dt must be <= 1/(10 f_sw_inv) in averaged mode");
    }
    ratio_for(1.0 / controller.rate_voltage_loop, h, "1/rate_voltage_loop");
    ratio_for(1.0 / controller.rate_current_loop, h, "1/rate_current_loop");
    ratio_for(controller.mppt_period, h, "mppt_period");
    ratio_for(plant.grid_period(), h, "the grid period");
    if (decimation < 1) throw ConfigError("scenario.decimation must be >= 1");
    if (!(tail_span > 0.0)) throw ConfigError("scenario.tail_span must be positive");
    if (initial_state) {
        const PlantState& s = *initial_state;
        if (!std::isfinite(s.x1) || !std::isfinite(s.x2) || !std::isfinite(s.x3) || !std::isfinite(s.x4) ||
            s.x1 < 0.0 || s.x3 < 0.0) {
            throw ConfigError("scenario.initial_state must be finite with x1, x3 >= 0");
        }
    }
}

SimLog run(const Scenario& sc) {
    sc.validate();
    const double dt = sc.effective_dt();
    const PlantParams& plant = sc.plant;
    const ControllerConfig cfg = sc.effective_controller();

    SimLog log;
    log.dt = dt;
    log.decimation = sc.decimation;
    log.v_dc_ref = cfg.v_dc_ref;
    log.grid_freq = plant.grid_freq;
    if (sc.schedule.empty()) return log;

    const PVArray arr = sc.array();
    const std::size_t r_mppt = ratio_for(cfg.mppt_period, dt, "mppt_period");
    const std::size_t r_v = ratio_for(1.0 / cfg.rate_voltage_loop, dt, "1/rate_voltage_loop");
    const std::size_t r_i = ratio_for(1.0 / cfg.rate_current_loop, dt, "1/rate_current_loop");
    const std::size_t spp = ratio_for(plant.grid_period(), dt, "the grid period");

    PlantState s = sc.initial(arr);
    MpptState mppt;
    mppt.v_ref = s.x1;
    VoltageLoop vloop(cfg, plant);
    DcLinkLoop dloop(cfg, plant);
    GridCurrentLoop gloop(cfg, plant);
    LyapunovProbe probe;

    ControlInputs u;
    double x1_ref = mppt.v_ref;
    double beta = 0.0;
    double x4_ref = 0.0;
    bool u1_sat = false, u2_sat = false, beta_sat = false, low_dc = false;

    const std::size_t total_steps = steps_for(sc.total_duration(), dt);
    const std::size_t reserve = total_steps / sc.decimation + total_steps / spp + 2;
    for (auto* col : {&log.time, &log.x1, &log.x2, &log.x3, &log.x4, &log.u1, &log.u2, &log.beta, &log.x1_ref,
                      &log.x4_ref, &log.i_pv, &log.p_pv, &log.v_g, &log.lyap_v1, &log.lyap_v2, &log.lyap_v3}) {
        col->reserve(reserve);
    }

    double cum = 0.0;
    std::size_t n = 0;
    for (std::size_t c = 0; c < sc.schedule.size(); ++c) {
        const ScheduleSegment& seg = sc.schedule[c];
        cum += seg.duration;
        const std::size_t n_start = n;
        const std::size_t n_end = steps_for(cum, dt);

        CaseRecord rec;
        rec.index = c;
        rec.t_start = static_cast<double>(n_start) * dt;
        rec.t_end = static_cast<double>(n_end) * dt;
        rec.env = {seg.irradiance, seg.temperature};
        rec.mpp = mpp_oracle(arr, rec.env);
        const PVCurve curve(arr, rec.env);
        const Integrator integ{plant, curve};
        log.events.push_back({rec.t_start, EventKind::EnvironmentChange, c});

        const std::size_t len = n_end - n_start;
        AnalysisCapture& cap = rec.capture;
        cap.fs = 1.0 / dt;
        cap.samples_per_period = spp;
        const std::size_t cap_len = spp * (cap.settle_periods + cap.metric_periods);
        const bool capturing = len >= cap_len;
        const std::size_t cap_start = capturing ? n_end - cap_len : n_end;
        const std::size_t metric_start = cap_start + spp * cap.settle_periods;
        if (capturing) {
            cap.t0 = static_cast<double>(cap_start) * dt;
            cap.state.reserve(cap_len);
            cap.v_g.reserve(cap_len);
            cap.i_pv.reserve(cap_len);
            cap.x4_ref.reserve(cap_len);
        }
        const std::size_t tail_steps = std::min(len, steps_for(sc.tail_span, dt));
        const std::size_t tail_start = n_end - tail_steps;
        rec.tail_span = static_cast<double>(tail_steps) * dt;
        double tail_acc = 0.0;

        for (; n < n_end; ++n) {
            const double t = static_cast<double>(n) * dt;
            const double i_meas = curve.current(s.x1);
            const double v_g = grid_voltage(t, plant);
            bool held = false;

            if (n % r_mppt == 0) x1_ref = pno_update(s.x1, i_meas, mppt, cfg, curve.v_oc());

            if (n % r_v == 0) {
                const VoltageLoop::Output out = vloop.step(s, i_meas, x1_ref);
                u.u1 = out.u1;
                held = held || out.held;
                if (out.saturated) {
                    ++log.totals.u1_saturated_steps;
                    if (!u1_sat) log.events.push_back({t, EventKind::VoltageLoopSaturated, c});
                }
                u1_sat = out.saturated;
                probe.observe_voltage_loop(vloop);
                if (n >= metric_start && capturing && vloop.steps() >= 2) cap.dv1.push_back(probe.sample().dv1);
            }

            if (n % r_i == 0) {
                const auto sat_before = dloop.events().saturations;
                beta = dloop.step(s.x3, cfg.v_dc_ref);
                const bool bsat = dloop.events().saturations != sat_before;
                if (bsat) {
                    ++log.totals.beta_saturated_steps;
                    if (!beta_sat) log.events.push_back({t, EventKind::BetaSaturated, c});
                }
                beta_sat = bsat;

                const GridCurrentLoop::Output out = gloop.step(s, v_g, beta);
                u.u2 = out.u2;
                x4_ref = out.x4_ref;
                held = held || out.held;
                if (out.saturated) {
                    ++log.totals.u2_saturated_steps;
                    if (!u2_sat) log.events.push_back({t, EventKind::GridLoopSaturated, c});
                }
                u2_sat = out.saturated;
                probe.observe_grid_loop(gloop);
                if (n >= metric_start && capturing && gloop.steps() >= 2) cap.dv3.push_back(probe.sample().dv3);
            }

            if (held) {
                ++log.totals.low_dc_link_steps;
                if (!low_dc) log.events.push_back({t, EventKind::LowDcLink, c});
            }
            if (n % r_v == 0 || n % r_i == 0) low_dc = held;

            if (n % sc.decimation == 0 || n % spp == 0) {
                log.time.push_back(t);
                log.x1.push_back(s.x1);
                log.x2.push_back(s.x2);
                log.x3.push_back(s.x3);
                log.x4.push_back(s.x4);
                log.u1.push_back(u.u1);
                log.u2.push_back(u.u2);
                log.beta.push_back(beta);
                log.x1_ref.push_back(x1_ref);
                log.x4_ref.push_back(x4_ref);
                log.i_pv.push_back(i_meas);
                log.p_pv.push_back(s.x1 * i_meas);
                log.v_g.push_back(v_g);
                log.lyap_v1.push_back(vloop.v1());
                log.lyap_v2.push_back(vloop.v2());
                log.lyap_v3.push_back(gloop.v3());
            }
            if (n >= cap_start) {
                cap.state.push_back(s);
                cap.v_g.push_back(v_g);
                cap.i_pv.push_back(i_meas);
                cap.x4_ref.push_back(x4_ref);
            }
            if (n >= tail_start) tail_acc += s.x1 * i_meas;

            s = sc.fidelity == Fidelity::Averaged ? integ.rk4(s, u, t, dt) : integ.euler(s, u, t, dt);
            s.x1 = std::max(s.x1, 0.0);
            s.x3 = std::max(s.x3, 0.0);
            if (diverged(s)) {
                throw DivergenceError("plant state diverged", t + dt);
            }
        }
        rec.p_pv_tail_mean = tail_steps > 0 ? tail_acc / static_cast<double>(tail_steps) : 0.0;
        log.cases.push_back(std::move(rec));
    }
    return log;
}

Comparison run_comparison(const Scenario& sc) {
    Scenario fo = sc;
    fo.mode = ControllerMode::FractionalOrder;
    Scenario io = sc;
    io.mode = ControllerMode::IntegerOrder;
    Comparison out;
    out.fo = run(fo);
    out.io = run(io);
    for (std::size_t c = 0; c < out.fo.cases.size(); ++c) {
        if (!out.fo.cases[c].capture.complete() || !out.io.cases[c].capture.complete()) continue;
        out.cases.push_back({summarize_case(out.fo, c), summarize_case(out.io, c)});
    }
    return out;
}

std::vector<SettleResult> settle_detect(const SimLog& log, double band_frac) {
    if (log.empty()) throw MetricError("settle_detect needs a non-empty log");
    if (!(band_frac > 0.0)) throw MetricError("settle band must be positive");
    const double band = band_frac * log.v_dc_ref;
    const double period = 1.0 / log.grid_freq;
    std::vector<SettleResult> out;
    std::size_t row = 0;
    for (const CaseRecord& rec : log.cases) {
        SettleResult r;
        r.case_index = rec.index;
        bool have_start = false;
        double start = 0.0;
        for (; row < log.size() && log.time[row] < rec.t_end - 0.5 * log.dt; ++row) {
            if (r.settled) continue;
            const double t = log.time[row];
            if (std::abs(log.x3[row] - log.v_dc_ref) > band) {
                have_start = false;
                continue;
            }
            if (!have_start) {
                have_start = true;
                start = t;
            }
            if (t - start >= period - 0.5 * log.dt) {
                r.settled = true;
                r.settling_time = t - rec.t_start;
            }
        }
        out.push_back(r);
    }
    return out;
}

} // namespace fogrid

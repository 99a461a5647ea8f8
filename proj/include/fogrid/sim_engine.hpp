#pragma once

#include "fogrid/controllers.hpp"
#include "fogrid/metrics.hpp"
#include "fogrid/power_stage.hpp"
#include "fogrid/pv_model.hpp"
#include "fogrid/sim_log.hpp"

#include <optional>
#include <vector>

namespace fogrid {

enum class Fidelity { Averaged, Switched };

struct ScheduleSegment {
    double duration = 0.0;  // s
    double irradiance = 1000.0;
    double temperature = 25.0;

    friend bool operator==(const ScheduleSegment&, const ScheduleSegment&) = default;
};

struct Scenario {
    std::vector<ScheduleSegment> schedule;
    PanelDatasheet datasheet;
    FitOptions fit;
    int n_series_panels = 7;
    int n_parallel_strings = 1;
    PlantParams plant;
    ControllerConfig controller;
    ControllerMode mode = ControllerMode::FractionalOrder;
    Fidelity fidelity = Fidelity::Averaged;
    std::optional<double> dt;                  // default depends on fidelity
    std::optional<PlantState> initial_state;   // default: x1 = 0.9 V_oc, x3 = v_dc_ref
    std::size_t decimation = 10;
    double tail_span = 0.1;  // s, window for the per-case mean PV power

    double effective_dt() const noexcept;
    PVArray array() const;
    ControllerConfig effective_controller() const { return controller.with_mode(mode); }
    PlantState initial(const PVArray& array) const;
    double total_duration() const noexcept;

    // Throws ConfigError naming the violated field.
    void validate() const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

inline constexpr double kDefaultDtAveraged = 1e-6;
inline constexpr double kDefaultDtSwitched = 1e-7;

// Deterministic fixed-step closed-loop run. RK4 on the averaged model,
// forward Euler on the switched one. Throws DivergenceError if any state
// leaves [-1e6, 1e6].
SimLog run(const Scenario& sc);

struct CasePair {
    CaseSummary fo;
    CaseSummary io;
};

struct Comparison {
    SimLog fo;
    SimLog io;
    std::vector<CasePair> cases;
};

// Runs the scenario once per controller mode and pairs the per-case summaries.
Comparison run_comparison(const Scenario& sc);

struct SettleResult {
    std::size_t case_index = 0;
    bool settled = false;
    double settling_time = 0.0;  // from case start, includes the confirming period
};

// Per case, the first point from which x3 stays within band_frac of
// v_dc_ref for one full grid period. Throws MetricError on an empty log.
std::vector<SettleResult> settle_detect(const SimLog& log, double band_frac);

} // namespace fogrid

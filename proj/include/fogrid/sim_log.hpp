#pragma once

#include "fogrid/power_stage.hpp"
#include "fogrid/pv_model.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fogrid {

enum class EventKind {
    EnvironmentChange,
    VoltageLoopSaturated,  // u1 entered its clamp
    GridLoopSaturated,     // u2 entered its clamp
    BetaSaturated,         // DC-link loop hit the current limit
    LowDcLink,             // a loop held its output because x3 was below the floor
};

const char* event_kind_name(EventKind k) noexcept;

struct LogEvent {
    double time = 0.0;
    EventKind kind = EventKind::EnvironmentChange;
    std::size_t case_index = 0;

    friend bool operator==(const LogEvent&, const LogEvent&) = default;
};

// Undecimated record of the tail of one case: the last
// (1 + metric periods) grid periods at the integration step. The leading
// period gates settling, the rest feeds the metrics.
struct AnalysisCapture {
    double t0 = 0.0;
    double fs = 0.0;
    std::size_t samples_per_period = 0;
    std::size_t settle_periods = 1;
    std::size_t metric_periods = 5;
    std::vector<PlantState> state;
    std::vector<double> v_g;
    std::vector<double> i_pv;
    std::vector<double> x4_ref;
    // Finite-difference Lyapunov derivatives at controller rate, metric
    // periods only.
    std::vector<double> dv1;
    std::vector<double> dv3;

    bool complete() const noexcept {
        return samples_per_period > 0 &&
               state.size() == samples_per_period * (settle_periods + metric_periods);
    }
    std::size_t metric_offset() const noexcept { return samples_per_period * settle_periods; }

    friend bool operator==(const AnalysisCapture&, const AnalysisCapture&) = default;
};

struct CaseRecord {
    std::size_t index = 0;
    double t_start = 0.0;
    double t_end = 0.0;
    EnvironmentInput env;
    MppPoint mpp;
    double p_pv_tail_mean = 0.0;  // mean PV power over the final tail_span seconds
    double tail_span = 0.0;
    AnalysisCapture capture;

    friend bool operator==(const CaseRecord&, const CaseRecord&) = default;
};

struct EventTotals {
    std::uint64_t u1_saturated_steps = 0;
    std::uint64_t u2_saturated_steps = 0;
    std::uint64_t beta_saturated_steps = 0;
    std::uint64_t low_dc_link_steps = 0;

    friend bool operator==(const EventTotals&, const EventTotals&) = default;
};

// Column-oriented simulation record. Rows are kept every `decimation` steps
// and at every grid-period boundary.
struct SimLog {
    double dt = 0.0;
    std::size_t decimation = 1;
    double v_dc_ref = 0.0;
    double grid_freq = 0.0;

    std::vector<double> time;
    std::vector<double> x1, x2, x3, x4;
    std::vector<double> u1, u2, beta;
    std::vector<double> x1_ref, x4_ref;
    std::vector<double> i_pv, p_pv, v_g;
    std::vector<double> lyap_v1, lyap_v2, lyap_v3;

    std::vector<LogEvent> events;
    EventTotals totals;
    std::vector<CaseRecord> cases;

    std::size_t size() const noexcept { return time.size(); }
    bool empty() const noexcept { return time.empty(); }

    friend bool operator==(const SimLog&, const SimLog&) = default;
};

} // namespace fogrid

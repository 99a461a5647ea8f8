#pragma once

#include "fogrid/sim_log.hpp"

#include <complex>
#include <cstddef>
#include <span>
#include <string>

namespace fogrid {

struct AnalysisWindow {
    std::span<const double> samples;
    double fs = 0.0;       // Hz
    double f0 = 50.0;      // Hz
    int n_periods = 5;

    std::size_t expected_length() const noexcept;
    // Throws MetricError on a non-integer-period or too-short window.
    void validate() const;
};

inline constexpr int kDefaultHarmonics = 50;

// DFT coefficient of harmonic k scaled to an RMS phasor.
std::complex<double> harmonic_phasor(const AnalysisWindow& w, int k);

// Percent ratio of the RMS of harmonics 2..n_harmonics to the fundamental.
double thd(const AnalysisWindow& w, int n_harmonics = kDefaultHarmonics);

double power_factor(const AnalysisWindow& v, const AnalysisWindow& i);

struct PowerPair {
    double p = 0.0;  // W
    double q = 0.0;  // VAR, positive for lagging current
};

PowerPair real_reactive_power(const AnalysisWindow& v, const AnalysisWindow& i);

double efficiency(double p_grid, double p_pv);

struct CaseSummary {
    std::size_t case_id = 0;
    double thd_pct = 0.0;
    double pf = 0.0;
    double p_real = 0.0;
    double q_reactive = 0.0;
    double p_pv = 0.0;
    double efficiency_pct = 0.0;
    double loss_pct = 0.0;
    double p_pv_tail = 0.0;
    double p_mpp = 0.0;
    bool settled = false;
};

// Metrics over the final metric periods of one case. Throws MetricError if
// the case has no complete capture.
CaseSummary summarize_case(const SimLog& log, std::size_t case_index, double band_frac = 0.02);

} // namespace fogrid

#include "fogrid/metrics.hpp"

#include "fogrid/error.hpp"
#include "fogrid/simd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace fogrid {

namespace {

double mean_of(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double rms_of(std::span<const double> x) {
    return std::sqrt(simd::dot(x.data(), x.data(), x.size()) / static_cast<double>(x.size()));
}

// Evaluates DFT bins k * n_periods for k in [k_lo, k_hi] with the
// dispatched dot kernel against one shared twiddle table.
class HarmonicBank {
public:
    explicit HarmonicBank(const AnalysisWindow& w) : w_(w), n_(w.samples.size()),
                                                      cos_tab_(n_), sin_tab_(n_), basis_(n_) {
        for (std::size_t j = 0; j < n_; ++j) {
            const double th = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n_);
            cos_tab_[j] = std::cos(th);
            sin_tab_[j] = std::sin(th);
        }
    }

    std::complex<double> phasor(int k) {
        const std::size_t m = static_cast<std::size_t>(k) * static_cast<std::size_t>(w_.n_periods) % n_;
        std::size_t idx = 0;
        for (std::size_t j = 0; j < n_; ++j) {
            basis_[j] = cos_tab_[idx];
            idx += m;
            if (idx >= n_) idx -= n_;
        }
        const double re = simd::dot(w_.samples.data(), basis_.data(), n_);
        idx = 0;
        for (std::size_t j = 0; j < n_; ++j) {
            basis_[j] = sin_tab_[idx];
            idx += m;
            if (idx >= n_) idx -= n_;
        }
        const double im = -simd::dot(w_.samples.data(), basis_.data(), n_);
        return std::complex<double>(re, im) * (std::numbers::sqrt2 / static_cast<double>(n_));
    }

private:
    const AnalysisWindow& w_;
    std::size_t n_;
    std::vector<double> cos_tab_, sin_tab_, basis_;
};

void require_pair(const AnalysisWindow& v, const AnalysisWindow& i) {
    v.validate();
    i.validate();
    if (v.samples.size() != i.samples.size() || v.fs != i.fs || v.f0 != i.f0) {
        throw MetricError("voltage and current windows are not aligned");
    }
}

} // namespace

std::size_t AnalysisWindow::expected_length() const noexcept {
    return static_cast<std::size_t>(std::llround(n_periods * fs / f0));
}

void AnalysisWindow::validate() const {
    if (!(fs > 0.0) || !(f0 > 0.0)) throw MetricError("window needs positive fs and f0");
    if (n_periods < 5) throw MetricError("window must span at least 5 fundamental periods");
    if (samples.empty()) throw MetricError("window is empty");
    if (samples.size() != expected_length()) {
        throw MetricError("window length does not match an integer number of periods");
    }
}

std::complex<double> harmonic_phasor(const AnalysisWindow& w, int k) {
    w.validate();
    HarmonicBank bank(w);
    return bank.phasor(k);
}

double thd(const AnalysisWindow& w, int n_harmonics) {
    w.validate();
    if (n_harmonics < 2) throw MetricError("thd needs at least the second harmonic");
    if (w.fs < 2.0 * n_harmonics * w.f0) {
        throw MetricError("sample rate too low for the requested harmonic count");
    }
    HarmonicBank bank(w);
    const double fund = std::abs(bank.phasor(1));
    const double total = rms_of(w.samples);
    if (!(fund > 1e-12) || fund < 1e-6 * total) {
        throw MetricError("fundamental is below the noise floor; THD undefined");
    }
    double acc = 0.0;
    for (int k = 2; k <= n_harmonics; ++k) acc += std::norm(bank.phasor(k));
    return 100.0 * std::sqrt(acc) / fund;
}

double power_factor(const AnalysisWindow& v, const AnalysisWindow& i) {
    require_pair(v, i);
    const double vr = rms_of(v.samples);
    const double ir = rms_of(i.samples);
    if (!(vr > 0.0) || !(ir > 0.0)) throw MetricError("zero RMS; power factor undefined");
    const double p = simd::dot(v.samples.data(), i.samples.data(), v.samples.size()) /
                     static_cast<double>(v.samples.size());
    return std::clamp(p / (vr * ir), -1.0, 1.0);
}

PowerPair real_reactive_power(const AnalysisWindow& v, const AnalysisWindow& i) {
    require_pair(v, i);
    if (!(rms_of(v.samples) > 0.0) || !(rms_of(i.samples) > 0.0)) {
        throw MetricError("zero RMS; power undefined");
    }
    PowerPair out;
    out.p = simd::dot(v.samples.data(), i.samples.data(), v.samples.size()) /
            static_cast<double>(v.samples.size());
    const std::complex<double> v1 = harmonic_phasor(v, 1);
    const std::complex<double> i1 = harmonic_phasor(i, 1);
    out.q = std::imag(v1 * std::conj(i1));
    return out;
}

double efficiency(double p_grid, double p_pv) {
    if (!(p_pv > 0.0)) throw MetricError("efficiency undefined for non-positive PV power");
    return 100.0 * p_grid / p_pv;
}

CaseSummary summarize_case(const SimLog& log, std::size_t case_index, double band_frac) {
    if (case_index >= log.cases.size()) throw MetricError("case index out of range");
    const CaseRecord& rec = log.cases[case_index];
    const AnalysisCapture& cap = rec.capture;
    if (!cap.complete()) throw MetricError("case is too short for a complete analysis window");

    const std::size_t off = cap.metric_offset();
    const std::size_t n = cap.state.size() - off;
    std::vector<double> i_g(n), p_pv(n);
    for (std::size_t k = 0; k < n; ++k) {
        const PlantState& s = cap.state[off + k];
        i_g[k] = s.x4;
        p_pv[k] = s.x1 * cap.i_pv[off + k];
    }
    const int periods = static_cast<int>(cap.metric_periods);
    const AnalysisWindow vw{std::span<const double>(cap.v_g).subspan(off), cap.fs, log.grid_freq, periods};
    const AnalysisWindow iw{i_g, cap.fs, log.grid_freq, periods};

    CaseSummary out;
    out.case_id = case_index + 1;
    out.thd_pct = thd(iw);
    out.pf = power_factor(vw, iw);
    const PowerPair pq = real_reactive_power(vw, iw);
    out.p_real = pq.p;
    out.q_reactive = pq.q;
    out.p_pv = mean_of(p_pv);
    out.efficiency_pct = efficiency(out.p_real, out.p_pv);
    out.loss_pct = 100.0 - out.efficiency_pct;
    out.p_pv_tail = rec.p_pv_tail_mean;
    out.p_mpp = rec.mpp.p_mpp;

    const double band = band_frac * log.v_dc_ref;
    out.settled = std::all_of(cap.state.begin(), cap.state.begin() + static_cast<std::ptrdiff_t>(off),
                              [&](const PlantState& s) { return std::abs(s.x3 - log.v_dc_ref) <= band; });
    return out;
}

} // namespace fogrid

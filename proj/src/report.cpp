#include "fogrid/report.hpp"

#include "fogrid/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace fogrid {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    return out;
}

void close_out(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// ---- SVG line charts ----------------------------------------------------

struct Series {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
};

struct Figure {
    std::string title;
    std::string x_label = "time (s)";
    std::string y_label;
    std::vector<Series> series;
};

// Min/max envelope per pixel column so long traces stay small on disk.
Series envelope(const Series& s, std::size_t columns) {
    if (s.x.size() <= 2 * columns) return s;
    Series out{s.label, s.color, {}, {}};
    const std::size_t per = (s.x.size() + columns - 1) / columns;
    for (std::size_t b = 0; b < s.x.size(); b += per) {
        const std::size_t e = std::min(s.x.size(), b + per);
        auto [lo, hi] = std::minmax_element(s.y.begin() + static_cast<std::ptrdiff_t>(b),
                                            s.y.begin() + static_cast<std::ptrdiff_t>(e));
        const bool lo_first = lo < hi;
        out.x.push_back(s.x[b]);
        out.y.push_back(lo_first ? *lo : *hi);
        out.x.push_back(s.x[e - 1]);
        out.y.push_back(lo_first ? *hi : *lo);
    }
    return out;
}

double nice_step(double span, int target) {
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double r = raw / mag;
    return (r < 1.5 ? 1.0 : r < 3.0 ? 2.0 : r < 7.0 ? 5.0 : 10.0) * mag;
}

std::string tick_label(double v, double step) {
    const int decimals = std::max(0, static_cast<int>(std::ceil(-std::log10(step))));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, std::abs(v) < step * 1e-9 ? 0.0 : v);
    return buf;
}

void write_svg(const Figure& fig, const fs::path& path) {
    constexpr double W = 900, H = 480, L = 80, R = 20, T = 40, B = 60;
    const double pw = W - L - R, ph = H - T - B;

    std::vector<Series> ser;
    for (const auto& s : fig.series) ser.push_back(envelope(s, static_cast<std::size_t>(pw)));
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : ser) {
        for (double v : s.x) { x0 = std::min(x0, v); x1 = std::max(x1, v); }
        for (double v : s.y) {
            if (!std::isfinite(v)) continue;
            y0 = std::min(y0, v);
            y1 = std::max(y1, v);
        }
    }
    if (!std::isfinite(x0)) { x0 = 0; x1 = 1; }
    if (!std::isfinite(y0)) { y0 = 0; y1 = 1; }
    if (x1 <= x0) x1 = x0 + 1;
    if (y1 - y0 < 1e-12 * std::max(1.0, std::abs(y0))) { y0 -= 0.5; y1 += 0.5; }
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;

    auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return T + (y1 - y) / (y1 - y0) * ph; };

    std::ofstream out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << fig.title << "</text>\n";

    const double xs = nice_step(x1 - x0, 8), ys = nice_step(y1 - y0, 6);
    for (double v = std::ceil(x0 / xs) * xs; v <= x1 + 1e-12; v += xs) {
        out << "<line x1=\"" << px(v) << "\" y1=\"" << T << "\" x2=\"" << px(v) << "\" y2=\"" << T + ph
            << "\" stroke=\"#e0e0e0\"/>\n";
        out << "<text x=\"" << px(v) << "\" y=\"" << T + ph + 16 << "\" text-anchor=\"middle\">"
            << tick_label(v, xs) << "</text>\n";
    }
    for (double v = std::ceil(y0 / ys) * ys; v <= y1 + 1e-12; v += ys) {
        out << "<line x1=\"" << L << "\" y1=\"" << py(v) << "\" x2=\"" << L + pw << "\" y2=\"" << py(v)
            << "\" stroke=\"#e0e0e0\"/>\n";
        out << "<text x=\"" << L - 6 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">" << tick_label(v, ys)
            << "</text>\n";
    }
    out << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">" << fig.x_label
        << "</text>\n";
    out << "<text transform=\"translate(18," << T + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
        << fig.y_label << "</text>\n";

    for (std::size_t k = 0; k < ser.size(); ++k) {
        const Series& s = ser[k];
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.y[i])) continue;
            out << fmt("%.2f", px(s.x[i])) << ',' << fmt("%.2f", py(s.y[i])) << ' ';
        }
        out << "\"/>\n";
        const double ly = T + 14 + 16 * static_cast<double>(k);
        out << "<line x1=\"" << L + pw - 150 << "\" y1=\"" << ly << "\" x2=\"" << L + pw - 125 << "\" y2=\"" << ly
            << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << L + pw - 120 << "\" y=\"" << ly + 4 << "\">" << s.label << "</text>\n";
    }
    out << "</svg>\n";
    close_out(out, path);
}

const char* kFoColor = "#1f77b4";
const char* kIoColor = "#d62728";
const char* kRefColor = "#2ca02c";

// Last few grid periods of the whole run, for the current-tracking figure.
std::size_t tail_begin(const SimLog& log, double span) {
    const double t_end = log.time.empty() ? 0.0 : log.time.back();
    return static_cast<std::size_t>(
        std::lower_bound(log.time.begin(), log.time.end(), t_end - span) - log.time.begin());
}

std::vector<double> slice(const std::vector<double>& v, std::size_t from) {
    return {v.begin() + static_cast<std::ptrdiff_t>(from), v.end()};
}

} // namespace

// ---- CSV --------------------------------------------------------------------

const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols = {"time_s", "x1_v",    "x2_a",    "x3_v",  "x4_a", "u1",
                                                  "u2",     "beta",    "x1ref_v", "x4ref_a", "ipv_a", "ppv_w",
                                                  "vg_v",   "V1",      "V2",      "V3"};
    return cols;
}

void write_csv(const SimLog& log, std::ostream& out) {
    const auto& cols = csv_columns();
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
    out << '\n';
    const std::vector<const std::vector<double>*> data = {
        &log.time, &log.x1, &log.x2, &log.x3, &log.x4, &log.u1, &log.u2, &log.beta,
        &log.x1_ref, &log.x4_ref, &log.i_pv, &log.p_pv, &log.v_g, &log.lyap_v1, &log.lyap_v2, &log.lyap_v3};
    char buf[32];
    for (std::size_t r = 0; r < log.size(); ++r) {
        for (std::size_t c = 0; c < data.size(); ++c) {
            std::snprintf(buf, sizeof buf, "%.9g", (*data[c])[r]);
            if (c) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

void write_csv_file(const SimLog& log, const fs::path& path) {
    std::ofstream out = open_out(path);
    write_csv(log, out);
    close_out(out, path);
}

// ---- report -----------------------------------------------------------------

const std::vector<ReferenceThd>& reference_thd() {
    static const std::vector<ReferenceThd> ref = {{4.05, 5.00}, {4.19, 5.62}, {4.56, 6.42}};
    return ref;
}

ReportTable build_report(const SimLog* fo, const SimLog* io) {
    ReportTable table;
    const std::size_t n = std::max(fo ? fo->cases.size() : 0, io ? io->cases.size() : 0);
    const auto& ref = reference_thd();
    for (std::size_t c = 0; c < n; ++c) {
        ReportRow row;
        row.case_id = c + 1;
        if (fo && c < fo->cases.size() && fo->cases[c].capture.complete()) row.fo = summarize_case(*fo, c);
        if (io && c < io->cases.size() && io->cases[c].capture.complete()) row.io = summarize_case(*io, c);
        if (!row.fo && !row.io) continue;
        if (row.fo) {
            row.fo_ieee_pass = row.fo->thd_pct < kIeeeThdLimit;
            row.fo_reference_match = c < ref.size() && std::abs(row.fo->thd_pct - ref[c].fo) <= kReferenceMatchBand;
        }
        if (row.io) {
            row.io_ieee_pass = row.io->thd_pct < kIeeeThdLimit;
            row.io_reference_match = c < ref.size() && std::abs(row.io->thd_pct - ref[c].io) <= kReferenceMatchBand;
        }
        table.rows.push_back(row);
    }
    return table;
}

std::string format_report_text(const ReportTable& table) {
    std::ostringstream out;
    auto cell = [](const std::optional<CaseSummary>& s, double CaseSummary::*field, const char* f) {
        return s ? fmt(f, (*s).*field) : std::string("-");
    };
    auto flag = [](const std::optional<CaseSummary>& s, bool v) { return s ? (v ? "pass" : "FAIL") : "-"; };
    auto match = [](const std::optional<CaseSummary>& s, bool v) { return s ? (v ? "yes" : "no") : "-"; };
    char line[512];
    std::snprintf(line, sizeof line, "%-5s %-9s %9s %9s %9s %9s %9s %9s %8s %8s %8s %6s %8s\n", "case", "ctrl",
                  "THD %", "PF", "P (W)", "Q (VAR)", "Ppv (W)", "eta %", "loss %", "IEEE5%", "ref.THD", "match",
                  "settled");
    out << line;
    const auto& ref = reference_thd();
    for (const ReportRow& r : table.rows) {
        for (int which = 0; which < 2; ++which) {
            const auto& s = which == 0 ? r.fo : r.io;
            if (!s) continue;
            const double ref_thd = r.case_id - 1 < ref.size()
                                       ? (which == 0 ? ref[r.case_id - 1].fo : ref[r.case_id - 1].io)
                                       : NAN;
            std::snprintf(line, sizeof line, "%-5zu %-9s %9s %9s %9s %9s %9s %9s %8s %8s %8s %6s %8s\n", r.case_id,
                          which == 0 ? "FO" : "IO", cell(s, &CaseSummary::thd_pct, "%.3f").c_str(),
                          cell(s, &CaseSummary::pf, "%.5f").c_str(), cell(s, &CaseSummary::p_real, "%.1f").c_str(),
                          cell(s, &CaseSummary::q_reactive, "%.1f").c_str(),
                          cell(s, &CaseSummary::p_pv, "%.1f").c_str(),
                          cell(s, &CaseSummary::efficiency_pct, "%.3f").c_str(),
                          cell(s, &CaseSummary::loss_pct, "%.3f").c_str(),
                          flag(s, which == 0 ? r.fo_ieee_pass : r.io_ieee_pass),
                          std::isnan(ref_thd) ? "-" : fmt("%.2f", ref_thd).c_str(),
                          match(s, which == 0 ? r.fo_reference_match : r.io_reference_match),
                          s->settled ? "yes" : "no");
            out << line;
        }
    }
    return out.str();
}

std::string format_report_csv(const ReportTable& table) {
    std::ostringstream out;
    out << "case,controller,thd_pct,pf,p_real_w,q_reactive_var,p_pv_w,efficiency_pct,loss_pct,ieee_5pct_pass,"
           "reference_thd_pct,reference_match,settled\n";
    const auto& ref = reference_thd();
    for (const ReportRow& r : table.rows) {
        for (int which = 0; which < 2; ++which) {
            const auto& s = which == 0 ? r.fo : r.io;
            if (!s) continue;
            const std::string ref_thd =
                r.case_id - 1 < ref.size()
                    ? fmt("%.2f", which == 0 ? ref[r.case_id - 1].fo : ref[r.case_id - 1].io)
                    : "";
            char line[512];
            std::snprintf(line, sizeof line, "%zu,%s,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%d,%s,%d,%d\n", r.case_id,
                          which == 0 ? "fo" : "io", s->thd_pct, s->pf, s->p_real, s->q_reactive, s->p_pv,
                          s->efficiency_pct, s->loss_pct, which == 0 ? r.fo_ieee_pass : r.io_ieee_pass,
                          ref_thd.c_str(), which == 0 ? r.fo_reference_match : r.io_reference_match, s->settled);
            out << line;
        }
    }
    return out.str();
}

// ---- trends and plots -----------------------------------------------------

PeriodTrend period_trends(const SimLog& log) {
    PeriodTrend tr;
    if (log.empty()) return tr;
    const double period = 1.0 / log.grid_freq;
    const double w = 2.0 * std::numbers::pi * log.grid_freq;
    std::size_t i = 0;
    while (i < log.size()) {
        const double t0 = log.time[i];
        std::size_t j = i;
        double sp = 0, sv2 = 0, si2 = 0, sppv = 0;
        std::complex<double> vph, iph;
        while (j < log.size() && log.time[j] < t0 + period - 0.5 * log.dt) {
            const double v = log.v_g[j], c = log.x4[j];
            const std::complex<double> e = std::polar(1.0, -w * log.time[j]);
            sp += v * c;
            sv2 += v * v;
            si2 += c * c;
            sppv += log.p_pv[j];
            vph += v * e;
            iph += c * e;
            ++j;
        }
        const double n = static_cast<double>(j - i);
        const bool full = j < log.size() || log.time.back() + log.dt * static_cast<double>(log.decimation) >=
                                                t0 + period - 0.5 * log.dt;
        if (full && n > 1) {
            const double p = sp / n;
            const double vr = std::sqrt(sv2 / n), ir = std::sqrt(si2 / n);
            tr.t.push_back(t0 + 0.5 * period);
            tr.p_grid.push_back(p);
            // Phasor product scaled to RMS: 2/n^2 * V conj(I) with 1/sqrt2 per phasor.
            tr.q_grid.push_back(std::imag(vph * std::conj(iph)) * 2.0 / (n * n));
            tr.pf.push_back(vr > 0 && ir > 0 ? std::clamp(p / (vr * ir), -1.0, 1.0) : NAN);
            const double ppv = sppv / n;
            tr.efficiency_pct.push_back(ppv > 0 ? 100.0 * p / ppv : NAN);
        }
        i = j;
    }
    return tr;
}

std::vector<fs::path> write_plots(const SimLog* fo, const SimLog* io, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

    std::vector<std::pair<const SimLog*, std::pair<std::string, std::string>>> runs;
    if (fo) runs.push_back({fo, {"FO", kFoColor}});
    if (io) runs.push_back({io, {"IO", kIoColor}});

    auto signal_figure = [&](const std::string& title, const std::string& ylabel,
                             const std::vector<double> SimLog::*field) {
        Figure f{title, "time (s)", ylabel, {}};
        for (const auto& [log, style] : runs) f.series.push_back({style.first, style.second, log->time, log->*field});
        return f;
    };

    std::vector<std::pair<std::string, Figure>> figs;
    figs.push_back({"fig_mppt_reference.svg", signal_figure("P&O reference voltage", "x1* (V)", &SimLog::x1_ref)});
    figs.push_back({"fig_pv_power.svg", signal_figure("PV power", "P_pv (W)", &SimLog::p_pv)});
    figs.push_back({"fig_boost_current.svg", signal_figure("Boost inductor current", "x2 (A)", &SimLog::x2)});
    figs.push_back({"fig_pv_voltage.svg", signal_figure("PV voltage", "x1 (V)", &SimLog::x1)});

    Figure grid{"Grid current and reference (final periods)", "time (s)", "current (A)", {}};
    for (const auto& [log, style] : runs) {
        const std::size_t b = tail_begin(*log, 3.0 / log->grid_freq);
        grid.series.push_back({style.first + " x4", style.second, slice(log->time, b), slice(log->x4, b)});
        grid.series.push_back({style.first + " x4*", kRefColor, slice(log->time, b), slice(log->x4_ref, b)});
    }
    figs.push_back({"fig_grid_current.svg", grid});

    std::vector<std::pair<std::string, PeriodTrend>> trends;
    for (const auto& [log, style] : runs) trends.push_back({style.first, period_trends(*log)});
    auto trend_figure = [&](const std::string& title, const std::string& ylabel,
                            const std::vector<double> PeriodTrend::*field) {
        Figure f{title, "time (s)", ylabel, {}};
        for (std::size_t k = 0; k < trends.size(); ++k) {
            f.series.push_back({trends[k].first, runs[k].second.second, trends[k].second.t, trends[k].second.*field});
        }
        return f;
    };
    figs.push_back({"fig_real_power.svg", trend_figure("Real power to grid", "P (W)", &PeriodTrend::p_grid)});
    figs.push_back({"fig_reactive_power.svg", trend_figure("Reactive power", "Q (VAR)", &PeriodTrend::q_grid)});
    figs.push_back({"fig_power_factor.svg", trend_figure("Power factor", "PF", &PeriodTrend::pf)});
    figs.push_back({"fig_efficiency.svg", trend_figure("System efficiency", "efficiency (%)", &PeriodTrend::efficiency_pct)});

    std::vector<fs::path> written;
    for (const auto& [name, fig] : figs) {
        const fs::path p = dir / name;
        write_svg(fig, p);
        written.push_back(p);
    }
    return written;
}

// ---- checks -----------------------------------------------------------------

std::vector<CheckOutcome> check_run(const SimLog* fo, const SimLog* io, const ReportTable& table) {
    std::vector<CheckOutcome> out;
    auto add = [&](std::string id, bool pass, std::string detail) {
        out.push_back({std::move(id), pass, std::move(detail)});
    };
    for (const SimLog* log : {fo, io}) {
        if (!log) continue;
        const char* tag = log == fo ? "fo" : "io";
        for (const CaseRecord& c : log->cases) {
            const double ratio = c.mpp.p_mpp > 0 ? c.p_pv_tail_mean / c.mpp.p_mpp : 0.0;
            add(std::string("mppt_tracking.") + tag + ".case" + std::to_string(c.index + 1), ratio >= 0.985,
                fmt("%.4f of oracle", ratio));
        }
    }
    for (const ReportRow& r : table.rows) {
        const std::string cs = ".case" + std::to_string(r.case_id);
        if (r.fo) {
            add("settled.fo" + cs, r.fo->settled, r.fo->settled ? "x3 in band" : "x3 outside 2% band");
            add("pf_min.fo" + cs, r.fo->pf >= 0.995, fmt("pf %.5f", r.fo->pf));
            add("efficiency_band.fo" + cs, r.fo->efficiency_pct >= 92.0 && r.fo->efficiency_pct <= 97.0,
                fmt("%.3f %%", r.fo->efficiency_pct));
            if (r.case_id == 1) add("ieee_thd.fo.case1", r.fo_ieee_pass, fmt("thd %.3f %%", r.fo->thd_pct));
        }
        if (r.fo && r.io) {
            add("thd_order" + cs, r.fo->thd_pct < r.io->thd_pct,
                fmt("fo %.4f", r.fo->thd_pct) + fmt(" io %.4f", r.io->thd_pct));
            add("pf_order" + cs, r.fo->pf >= r.io->pf, fmt("fo %.6f", r.fo->pf) + fmt(" io %.6f", r.io->pf));
            add("loss_order" + cs, r.fo->loss_pct <= r.io->loss_pct,
                fmt("fo %.4f", r.fo->loss_pct) + fmt(" io %.4f", r.io->loss_pct));
        }
    }
    return out;
}

std::string format_check_json(const std::vector<CheckOutcome>& checks) {
    nlohmann::json j;
    j["passed"] = std::all_of(checks.begin(), checks.end(), [](const CheckOutcome& c) { return c.pass; });
    nlohmann::json fails = nlohmann::json::array();
    nlohmann::json all = nlohmann::json::array();
    for (const auto& c : checks) {
        all.push_back({{"id", c.id}, {"pass", c.pass}, {"detail", c.detail}});
        if (!c.pass) fails.push_back(c.id);
    }
    j["failures"] = fails;
    j["checks"] = all;
    return j.dump(2) + "\n";
}

} // namespace fogrid

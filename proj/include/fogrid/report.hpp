#pragma once

#include "fogrid/metrics.hpp"
#include "fogrid/sim_engine.hpp"
#include "fogrid/sim_log.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fogrid {

// Column set of the per-run signal CSV. Bump kCsvSchemaVersion when it changes.
inline constexpr int kCsvSchemaVersion = 1;
const std::vector<std::string>& csv_columns();

void write_csv(const SimLog& log, std::ostream& out);
void write_csv_file(const SimLog& log, const std::filesystem::path& path);

// Reference THD figures (percent) the report compares against, per case.
struct ReferenceThd {
    double fo = 0.0;
    double io = 0.0;
};
const std::vector<ReferenceThd>& reference_thd();

inline constexpr double kIeeeThdLimit = 5.0;       // percent
inline constexpr double kReferenceMatchBand = 1.5;  // percentage points

struct ReportRow {
    std::size_t case_id = 0;
    std::optional<CaseSummary> fo;
    std::optional<CaseSummary> io;
    bool fo_ieee_pass = false;
    bool io_ieee_pass = false;
    bool fo_reference_match = false;
    bool io_reference_match = false;
};

struct ReportTable {
    std::vector<ReportRow> rows;
};

// Either log may be absent for a single-mode run. Cases without a complete
// analysis window are skipped.
ReportTable build_report(const SimLog* fo, const SimLog* io);
std::string format_report_text(const ReportTable& table);
std::string format_report_csv(const ReportTable& table);

// Per grid period trends computed from the decimated rows.
struct PeriodTrend {
    std::vector<double> t;       // period midpoint
    std::vector<double> p_grid;  // W
    std::vector<double> q_grid;  // VAR
    std::vector<double> pf;
    std::vector<double> efficiency_pct;
};
PeriodTrend period_trends(const SimLog& log);

// Nine SVG figures; returns the written paths.
std::vector<std::filesystem::path> write_plots(const SimLog* fo, const SimLog* io,
                                               const std::filesystem::path& dir);

struct CheckOutcome {
    std::string id;
    bool pass = false;
    std::string detail;
};

// Output-level pass/fail bands evaluated from finished runs.
std::vector<CheckOutcome> check_run(const SimLog* fo, const SimLog* io, const ReportTable& table);
std::string format_check_json(const std::vector<CheckOutcome>& checks);

} // namespace fogrid

// fogrid: run the grid-tied PV simulation from the command line.
//
//   fogrid run --scenario paper --controller both --out results --csv --plots --report --check
//   fogrid scenario paper > my_scenario.json

#include "fogrid/error.hpp"
#include "fogrid/report.hpp"
#include "fogrid/scenario_io.hpp"
#include "fogrid/sim_engine.hpp"
#include "fogrid/simd.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace fogrid;

namespace {

enum ExitCode { kOk = 0, kCheckFailed = 1, kUsage = 2, kRuntime = 3 };

struct RunRequest {
    std::string scenario = "paper";
    std::string controller = "both";
    std::string fidelity;
    std::optional<double> dt;
    std::string out_dir;
    bool csv = false;
    bool plots = false;
    bool report = false;
    bool check = false;
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

int do_run(const RunRequest& req) {
    Scenario sc = load_scenario(req.scenario);
    if (req.fidelity == "switched") sc.fidelity = Fidelity::Switched;
    else if (req.fidelity == "averaged") sc.fidelity = Fidelity::Averaged;
    if (req.dt) sc.dt = *req.dt;
    sc.validate();

    const fs::path out = req.out_dir;
    if (req.csv || req.plots || req.report || req.check) {
        std::error_code ec;
        fs::create_directories(out, ec);
        if (ec) throw IoError("cannot create output directory '" + out.string() + "': " + ec.message());
    }

    std::optional<SimLog> fo, io;
    const auto t0 = std::chrono::steady_clock::now();
    if (req.controller == "both") {
        Comparison cmp = run_comparison(sc);
        fo = std::move(cmp.fo);
        io = std::move(cmp.io);
    } else if (req.controller == "io") {
        sc.mode = ControllerMode::IntegerOrder;
        io = run(sc);
    } else {
        sc.mode = ControllerMode::FractionalOrder;
        fo = run(sc);
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::fprintf(stderr, "simulated %.3f s (%s, dt %g s, %s kernels) in %.2f s\n", sc.total_duration(),
                 fidelity_name(sc.fidelity), sc.effective_dt(), std::string(simd::isa_name(simd::active_isa())).c_str(), elapsed);

    const SimLog* fo_p = fo ? &*fo : nullptr;
    const SimLog* io_p = io ? &*io : nullptr;
    const ReportTable table = build_report(fo_p, io_p);
    std::cout << format_report_text(table);

    if (req.csv) {
        if (fo_p) write_csv_file(*fo_p, out / "signals_fo.csv");
        if (io_p) write_csv_file(*io_p, out / "signals_io.csv");
    }
    if (req.plots) write_plots(fo_p, io_p, out);
    if (req.report) {
        write_text(out / "report.txt", format_report_text(table));
        write_text(out / "report.csv", format_report_csv(table));
    }
    if (req.check) {
        const auto checks = check_run(fo_p, io_p, table);
        const std::string json = format_check_json(checks);
        write_text(out / "check.json", json);
        bool ok = true;
        for (const auto& c : checks) {
            if (!c.pass) {
                ok = false;
                std::cerr << "FAIL " << c.id << " " << c.detail << "\n";
            }
        }
        return ok ? kOk : kCheckFailed;
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grid-tied PV inverter simulation with fractional-order control"};
    app.require_subcommand(1);

    RunRequest req;
    if (const char* env = std::getenv("FOGRID_OUT_DIR")) req.out_dir = env;
    if (req.out_dir.empty()) req.out_dir = "fogrid_out";

    CLI::App* run_cmd = app.add_subcommand("run", "Simulate a scenario");
    run_cmd->add_option("--scenario", req.scenario, "Builtin name (paper, ideal-stc) or JSON file")
        ->capture_default_str();
    run_cmd->add_option("--controller", req.controller, "fo, io or both")
        ->check(CLI::IsMember({"fo", "io", "both"}))
        ->capture_default_str();
    run_cmd->add_option("--fidelity", req.fidelity, "averaged or switched (default from scenario)")
        ->check(CLI::IsMember({"averaged", "switched"}));
    run_cmd->add_option("--dt", req.dt, "Integration step in seconds");
    run_cmd->add_option("--out", req.out_dir, "Output directory (default $FOGRID_OUT_DIR or ./fogrid_out)");
    run_cmd->add_flag("--csv", req.csv, "Write per-run signal CSVs");
    run_cmd->add_flag("--plots", req.plots, "Write SVG figures");
    run_cmd->add_flag("--report", req.report, "Write report.txt and report.csv");
    run_cmd->add_flag("--check", req.check, "Evaluate pass/fail bands; nonzero exit on failure");

    std::string scenario_name = "paper";
    CLI::App* show_cmd = app.add_subcommand("scenario", "Print a scenario as JSON");
    show_cmd->add_option("name", scenario_name, "Builtin name or JSON file")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (*show_cmd) {
            std::cout << serialize_scenario(load_scenario(scenario_name));
            return kOk;
        }
        return do_run(req);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ConfigError& e) {
        std::cerr << "invalid scenario: " << e.what() << "\n";
        return kUsage;
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << " at t = " << e.time() << " s\n";
        return kRuntime;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
}

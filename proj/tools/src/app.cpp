#include "ssinit_tools/app.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <ostream>

#include "CLI11.hpp"
#include "ssinit_tools/run.hpp"

namespace ssinit::cli {

namespace {

struct RunArgs {
    std::string config;
    std::string scenario;
    std::string mode;
    std::optional<double> load;
    std::string warm_start;
    std::optional<double> lambda_step;
    std::optional<double> tol;
    std::string report;
    std::string csv;
    std::optional<double> verify_horizon;
    bool sweep = false;
    bool direct = false;
    bool timings = false;
    bool quiet = false;
};

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

RunConfig prepare(const RunArgs& a) {
    RunConfig c = load_config(a.config);
    if (!a.scenario.empty()) c.plant.scenario = parse_scenario(a.scenario);
    if (!a.mode.empty()) c.mode = parse_mode(a.mode);
    if (a.load) apply_load(c, *a.load);
    if (a.lambda_step) {
        c.homotopy.initial_step = *a.lambda_step;
        c.homotopy.validate();
    }
    if (a.tol) {
        c.solver.residual_tol = *a.tol;
        c.solver.validate();
    }
    if (a.verify_horizon) {
        if (!(*a.verify_horizon >= 0.0)) throw ConfigError("--verify-horizon must be nonnegative");
        c.verify.horizon = *a.verify_horizon;
    }
    return c;
}

int emit(const RunResult& res, const std::string& report_path, const std::string& csv_path, bool quiet,
         std::ostream& out, std::ostream& err) {
    if (!res.report.is_null()) {
        if (!report_path.empty()) {
            write_file(report_path, res.report.dump(2) + "\n");
            std::filesystem::path csv = csv_path.empty() ? std::filesystem::path(report_path).replace_extension(".csv")
                                                         : std::filesystem::path(csv_path);
            write_file(csv, solution_csv(res.report));
        }
        if (!quiet) out << summary(res.report);
    }
    if (res.exit_code != Success) err << "error: " << res.message << "\n";
    return res.exit_code;
}

int run_command(const RunArgs& a, std::ostream& out, std::ostream& err) {
    RunConfig config;
    RunOptions options;
    try {
        config = prepare(a);
        if (!a.warm_start.empty()) options.warm_start = snapshot_from_report(read_json(a.warm_start));
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    options.direct = a.direct;
    options.timings = a.timings;

    if (!a.sweep) return emit(run(config, options), a.report, a.csv, a.quiet, out, err);

    std::vector<std::future<RunResult>> jobs;
    for (Scenario s : all_scenarios) {
        RunConfig c = config;
        c.plant.scenario = s;
        jobs.push_back(std::async(std::launch::async, [c = std::move(c), options] { return run(c, options); }));
    }
    int code = Success;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        const Scenario s = all_scenarios[k];
        const RunResult res = jobs[k].get();
        std::string report;
        if (!a.report.empty()) {
            std::filesystem::path p(a.report);
            const auto ext = p.extension().string();
            report = (p.parent_path() / (p.stem().string() + "." + std::string(short_name(s)) + (ext.empty() ? ".json" : ext))).string();
        }
        if (!a.quiet) out << "== " << short_name(s) << "\n";
        try {
            code = std::max(code, emit(res, report, "", a.quiet, out, err));
        } catch (const std::exception& e) {
            err << "error: " << e.what() << "\n";
            code = std::max(code, exit_code_for(e));
        }
    }
    return code;
}

}  // namespace

int main_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Steady-state initialization of thermo-fluid plant models by homotopy continuation", "ssinit"};
    app.set_version_flag("--version", tool_version);
    app.require_subcommand(1);

    RunArgs a;
    CLI::App* run_cmd = app.add_subcommand("run", "Initialize a plant configuration and write a report");
    run_cmd->add_option("config", a.config, "Configuration file (JSON)")->required();
    run_cmd->add_option("--scenario", a.scenario, "steady-on|steady-off|smallsig-on|smallsig-off|sim-on|sim-off");
    run_cmd->add_option("--mode", a.mode, "fwd|bwd for every paired boundary block");
    run_cmd->add_option("--load", a.load, "Off-design target as a fraction of y_des for the load outputs");
    run_cmd->add_option("--warm-start", a.warm_start, "Report whose solution seeds the start values");
    run_cmd->add_option("--lambda-step", a.lambda_step, "Initial homotopy step");
    run_cmd->add_option("--tol", a.tol, "Scaled residual tolerance");
    run_cmd->add_option("--report", a.report, "Report path (JSON); the solution table also goes to .csv");
    run_cmd->add_option("--csv", a.csv, "Solution table path (CSV)");
    run_cmd->add_option("--verify-horizon", a.verify_horizon, "Implicit Euler verification horizon in seconds");
    run_cmd->add_flag("--sweep", a.sweep, "Run all six scenarios concurrently");
    run_cmd->add_flag("--direct", a.direct, "Try lambda = 1 from the start values first");
    run_cmd->add_flag("--timings", a.timings, "Include wall-clock timings in the report");
    run_cmd->add_flag("-q,--quiet", a.quiet, "No summary on standard output");

    std::string export_path;
    CLI::App* export_cmd = app.add_subcommand("export-demo", "Write the demo plant configuration");
    export_cmd->add_option("path", export_path, "Output file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Success;
    } catch (const CLI::CallForVersion&) {
        out << tool_version << "\n";
        return Success;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return ConfigFailure;
    }

    if (export_cmd->parsed()) {
        try {
            write_file(export_path, config_to_json(demo_config()).dump(2) + "\n");
        } catch (const std::exception& e) {
            err << "error: " << e.what() << "\n";
            return exit_code_for(e);
        }
        return Success;
    }
    return run_command(a, out, err);
}

}  // namespace ssinit::cli

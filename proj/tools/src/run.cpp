#include "ssinit_tools/run.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>

#include "ssinit/structure.hpp"

namespace ssinit::cli {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

json blt_json(const BltOrdering& blt, const FlatProblem& p) {
    json hist = json::object();
    for (const auto& [size, count] : blt.histogram()) hist[std::to_string(size)] = count;
    json tearing = json::array();
    for (std::size_t k = 0; k < blt.components.size(); ++k) {
        const auto& c = blt.components[k];
        if (!c.torn()) continue;
        json names = json::array();
        for (VarId v : c.tearing_variables) names.push_back(p.variables[v.index()].name);
        tearing.push_back({{"component", k}, {"size", c.size()}, {"tearing_variables", std::move(names)}});
    }
    return {{"components", blt.components.size()},
            {"max_size", blt.max_size()},
            {"histogram", std::move(hist)},
            {"tearing", std::move(tearing)}};
}

json trace_json(const HomotopyTrace& tr) {
    json steps = json::array();
    for (const auto& s : tr.steps) {
        steps.push_back({{"lambda", s.lambda},
                         {"iterations", s.iterations},
                         {"max_component_iterations", s.max_component_iterations},
                         {"damping_events", s.damping_events},
                         {"residual_norm", s.residual_norm}});
    }
    json rejected = json::array();
    for (const auto& r : tr.rejected) rejected.push_back({{"lambda", r.lambda}, {"reason", r.reason}});
    return {{"direct", tr.direct}, {"steps", std::move(steps)}, {"rejected", std::move(rejected)}};
}

json blocks_json(const FlatModel& flat, const std::vector<double>& v) {
    json inputs = json::object();
    for (const auto& [name, b] : flat.input_blocks) {
        inputs[name] = {{"u_out", v[b.u_out.index()]},
                        {"u_in", v[b.u_in.index()]},
                        {"u_des_calc", v[b.u_des_calc.index()]},
                        {"u_offdes_calc", v[b.u_offdes_calc.index()]}};
    }
    json outputs = json::object();
    for (const auto& [name, b] : flat.output_blocks) {
        outputs[name] = {{"y_in", v[b.y_in.index()]},
                         {"y_out", v[b.y_out.index()]},
                         {"y_des_calc", v[b.y_des_calc.index()]},
                         {"y_offdes_calc", v[b.y_offdes_calc.index()]}};
    }
    return {{"inputs", std::move(inputs)}, {"outputs", std::move(outputs)}};
}

}  // namespace

int exit_code_for(const std::exception& e) noexcept {
    if (dynamic_cast<const ConfigError*>(&e) != nullptr) return ConfigFailure;
    if (dynamic_cast<const StructuralSingularity*>(&e) != nullptr) return StructuralFailure;
    if (dynamic_cast<const MappingError*>(&e) != nullptr) return WarmStartFailure;
    if (dynamic_cast<const VerificationError*>(&e) != nullptr) return VerificationFailure;
    if (dynamic_cast<const ModelError*>(&e) != nullptr) return ConfigFailure;
    if (dynamic_cast<const ConvergenceFailure*>(&e) != nullptr || dynamic_cast<const HomotopyStalled*>(&e) != nullptr ||
        dynamic_cast<const EvaluationError*>(&e) != nullptr || dynamic_cast<const DomainError*>(&e) != nullptr)
        return ConvergenceFailureCode;
    return ConfigFailure;
}

void apply_load(RunConfig& config, double load) {
    if (!(load > 0.0)) throw ConfigError("--load must be positive");
    if (config.load_outputs.empty()) throw ConfigError("--load given but the config lists no load_outputs");
    for (const auto& name : config.load_outputs) {
        OutputBlock* b = config.plant.output(name);
        if (b == nullptr) throw ConfigError("load output '" + name + "' is not an output block");
        b->y_offdes = load * b->y_des;
    }
}

RunResult run(const RunConfig& config, const RunOptions& options) {
    RunResult result;
    const auto t_start = Clock::now();
    PlantGraph plant = config.plant;
    if (config.mode) plant.set_backward(*config.mode == BlockMode::Backward);
    try {
        auto t0 = Clock::now();
        const FlatModel flat = flatten(plant);
        FlatProblem problem = assemble_initialization_problem(flat.model);
        const double t_flatten = seconds_since(t0);

        std::size_t warm = 0;
        if (options.warm_start) warm = warm_start_backward(*options.warm_start, problem);

        t0 = Clock::now();
        const HomotopyTrace trace =
            continuation(problem, config.homotopy, config.solver, {.direct = options.direct || options.warm_start});
        const double t_solve = seconds_since(t0);

        std::vector<double> values = resolved_values(problem, trace.solution());
        hold_inputs(plant, flat, values);
        const ConservationReport cons = check_conservation(plant, flat, values);

        json& r = result.report;
        r["schema"] = report_schema;
        r["tool_version"] = tool_version;
        r["scenario"] = short_name(plant.scenario);
        r["mode"] = config.mode ? (*config.mode == BlockMode::Backward ? "bwd" : "fwd") : "config";
        r["problem"] = {{"variables", flat.model.variables().size()},
                        {"equations", flat.model.equations().size()},
                        {"unknowns", problem.size()},
                        {"unknowns_before_elimination", problem.unknowns_before_elimination},
                        {"eliminated", problem.eliminated.size()},
                        {"connections", flat.connections.size()},
                        {"connection_equations", flat.connection_equations},
                        {"simulation_unknowns", flat.simulation_size},
                        {"warm_started", warm}};
        r["blt"] = {{"lambda0", blt_json(trace.blt_simplified, problem)},
                    {"lambda1", blt_json(trace.blt_full, problem)}};
        r["homotopy"] = trace_json(trace);
        r["conservation"] = {{"connection", cons.connection},
                             {"hx_closure", cons.hx_closure},
                             {"atom_balance", cons.atom_balance},
                             {"fraction_sum", cons.fraction_sum},
                             {"min_fraction", cons.min_fraction}};
        r["blocks"] = blocks_json(flat, values);

        t0 = Clock::now();
        json verification = {{"horizon", config.verify.horizon},
                             {"dt", config.verify.dt},
                             {"max_drift", config.verify.max_drift}};
        try {
            const auto vr =
                verify_steady_state(flat.model, values, config.verify.horizon, config.verify.dt, config.solver);
            verification["drift"] = vr.drift;
            verification["worst_state"] = vr.worst_state;
            verification["steps"] = vr.steps;
            verification["newton_iterations"] = vr.newton_iterations;
            if (vr.drift > config.verify.max_drift) {
                std::ostringstream os;
                os << "verification drift " << vr.drift << " exceeds " << config.verify.max_drift << " (worst state "
                   << vr.worst_state << ")";
                result.exit_code = VerificationFailure;
                result.message = os.str();
            }
        } catch (const VerificationError& e) {
            verification["error"] = e.what();
            result.exit_code = VerificationFailure;
            result.message = e.what();
        }
        const double t_verify = seconds_since(t0);
        verification["passed"] = result.exit_code == Success;
        r["verification"] = std::move(verification);

        json solution = json::array();
        for (std::size_t i = 0; i < values.size(); ++i) {
            const auto& d = flat.model.variables()[i];
            solution.push_back({{"name", d.name}, {"value", values[i]}, {"unit", d.unit}});
        }
        r["solution"] = std::move(solution);
        if (options.timings) {
            r["timings"] = {{"flatten_s", t_flatten},
                            {"continuation_s", t_solve},
                            {"verification_s", t_verify},
                            {"total_s", seconds_since(t_start)}};
        }
    } catch (const std::exception& e) {
        result.exit_code = exit_code_for(e);
        result.message = e.what();
        result.report = json();
    }
    return result;
}

Snapshot snapshot_from_report(const nlohmann::json& report) {
    if (!report.is_object() || !report.contains("solution") || !report.at("solution").is_array())
        throw ConfigError("warm-start report has no solution table");
    Snapshot snap;
    try {
        for (const auto& row : report.at("solution")) snap[row.at("name").get<std::string>()] = row.at("value").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("warm-start report has a malformed solution table: ") + e.what());
    }
    return snap;
}

std::string solution_csv(const nlohmann::json& report) {
    std::string out = "name,value,unit\n";
    char buf[64];
    for (const auto& row : report.at("solution")) {
        std::snprintf(buf, sizeof buf, "%.17g", row.at("value").get<double>());
        out += "\"" + row.at("name").get<std::string>() + "\"," + buf + "," + row.at("unit").get<std::string>() + "\n";
    }
    return out;
}

std::string summary(const nlohmann::json& r) {
    std::ostringstream os;
    const auto& p = r.at("problem");
    const auto& b0 = r.at("blt").at("lambda0");
    const auto& b1 = r.at("blt").at("lambda1");
    os << "scenario " << r.at("scenario").get<std::string>() << ", mode " << r.at("mode").get<std::string>() << "\n";
    os << "unknowns " << p.at("unknowns") << " (of " << p.at("variables") << " variables, " << p.at("equations")
       << " equations)\n";
    os << "BLT lambda=0: " << b0.at("components") << " components, max " << b0.at("max_size") << "; lambda=1: "
       << b1.at("components") << " components, max " << b1.at("max_size") << "\n";
    os << "lambda trace:";
    for (const auto& s : r.at("homotopy").at("steps")) os << " " << s.at("lambda").get<double>();
    os << "\n";
    for (const auto& [name, b] : r.at("blocks").at("inputs").items())
        os << "  input  " << name << " = " << b.at("u_out").get<double>() << "\n";
    for (const auto& [name, b] : r.at("blocks").at("outputs").items())
        os << "  output " << name << " = " << b.at("y_in").get<double>() << "\n";
    const auto& v = r.at("verification");
    if (v.contains("drift")) os << "verification drift " << v.at("drift").get<double>() << "\n";
    return os.str();
}

}  // namespace ssinit::cli

#include "ssinit/boundary.hpp"

#include <algorithm>
#include <cmath>

namespace ssinit {

namespace {

struct ScenarioName {
    Scenario scenario;
    std::string_view full;
    std::string_view brief;
};

constexpr ScenarioName scenario_names[] = {
    {Scenario::SteadyStateOnDesign, "SteadyStateOnDesign", "steady-on"},
    {Scenario::SteadyStateOffDesign, "SteadyStateOffDesign", "steady-off"},
    {Scenario::SmallSignalOnDesign, "SmallSignalOnDesign", "smallsig-on"},
    {Scenario::SmallSignalOffDesign, "SmallSignalOffDesign", "smallsig-off"},
    {Scenario::SimulationOnDesign, "SimulationOnDesign", "sim-on"},
    {Scenario::SimulationOffDesign, "SimulationOffDesign", "sim-off"},
};

/// Backward mode in an off-design scenario selects the OFF rows; forward blocks always use the ON rows.
bool off_row(BlockMode mode, Scenario s) { return mode == BlockMode::Backward && off_design(s); }

}  // namespace

std::string_view to_string(Scenario s) noexcept {
    for (const auto& n : scenario_names)
        if (n.scenario == s) return n.full;
    return "?";
}

std::string_view short_name(Scenario s) noexcept {
    for (const auto& n : scenario_names)
        if (n.scenario == s) return n.brief;
    return "?";
}

Scenario parse_scenario(std::string_view name) {
    for (const auto& n : scenario_names)
        if (n.full == name || n.brief == name) return n.scenario;
    throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

std::string_view to_string(BlockMode m) noexcept { return m == BlockMode::Forward ? "fwd" : "bwd"; }

BlockMode parse_mode(std::string_view name) {
    if (name == "fwd" || name == "FWD" || name == "forward") return BlockMode::Forward;
    if (name == "bwd" || name == "BWD" || name == "backward") return BlockMode::Backward;
    throw ConfigError("unknown block mode '" + std::string(name) + "'");
}

ScenarioFamily family(Scenario s) noexcept {
    switch (s) {
        case Scenario::SteadyStateOnDesign:
        case Scenario::SteadyStateOffDesign: return ScenarioFamily::SteadyState;
        case Scenario::SmallSignalOnDesign:
        case Scenario::SmallSignalOffDesign: return ScenarioFamily::SmallSignal;
        case Scenario::SimulationOnDesign:
        case Scenario::SimulationOffDesign: break;
    }
    return ScenarioFamily::Simulation;
}

bool off_design(Scenario s) noexcept {
    return s == Scenario::SteadyStateOffDesign || s == Scenario::SmallSignalOffDesign ||
           s == Scenario::SimulationOffDesign;
}

std::vector<BlockEquation> emit_equations(const InputBlock& block, Scenario scenario) {
    const bool off = off_row(block.mode, scenario);
    const std::string calc = off ? "u_offdes,calc" : "u_des,calc";
    std::vector<BlockEquation> eqs;
    switch (family(scenario)) {
        case ScenarioFamily::SteadyState: eqs.push_back({"u_out = " + calc, false}); break;
        case ScenarioFamily::SmallSignal: eqs.push_back({"u_in = (u_out - " + calc + ")/u_norm", false}); break;
        case ScenarioFamily::Simulation:
            eqs.push_back({"u_out = if initial() then " + calc + " else " +
                               (block.normalize ? calc + " + u_norm*u_in" : std::string("u_in")),
                           false});
            break;
    }
    if (block.mode == BlockMode::Forward) {
        eqs.push_back({"u_des,calc = u_des", true});
        eqs.push_back({"u_offdes,calc = u_des", true});
    } else if (off) {
        eqs.push_back({"u_des,calc = u_des", true});
    } else {
        eqs.push_back({"u_offdes,calc = u_des", true});
    }
    return eqs;
}

std::vector<BlockEquation> emit_equations(const OutputBlock& block, Scenario scenario) {
    const bool off = off_row(block.mode, scenario);
    const std::string calc = off ? "y_offdes,calc" : "y_des,calc";
    const bool normalized = family(scenario) == ScenarioFamily::SmallSignal ||
                            (family(scenario) == ScenarioFamily::Simulation && block.normalize);
    std::vector<BlockEquation> eqs;
    eqs.push_back({normalized ? "y_out = (y_in - " + calc + ")/y_norm" : std::string("y_out = y_in"), false});
    if (block.mode == BlockMode::Backward) {
        eqs.push_back({off ? "y_in = homotopy(y_offdes, y_des)" : "y_in = y_des", true});
    }
    eqs.push_back({"y_des,calc = y_des", true});
    eqs.push_back({off ? "y_offdes,calc = y_offdes" : "y_offdes,calc = y_des", true});
    return eqs;
}

InputBlockVars add_block(Model& model, const InputBlock& block, Scenario scenario, VarId actuator,
                         double actuator_nominal) {
    if (!(block.u_norm > 0.0)) throw ModelError("input block '" + block.name + "': u_norm must be positive");
    const double nom = std::max(actuator_nominal, 1e-12);
    const ScenarioFamily fam = family(scenario);
    const bool off = off_row(block.mode, scenario);
    const std::string& n = block.name;
    const double u_in_start =
        fam == ScenarioFamily::SmallSignal || (fam == ScenarioFamily::Simulation && block.normalize) ? 0.0
                                                                                                      : block.u_des;
    InputBlockVars v;
    v.u_out = actuator;
    v.u_in = model.add_variable({.name = n + ".u_in",
                                 .nominal = fam == ScenarioFamily::SmallSignal ? 1.0 : nom,
                                 .start = u_in_start,
                                 .role = VariableRole::FixedParameter,
                                 .kind = VariableKind::Signal});
    v.u_des_calc = model.add_variable({.name = n + ".u_des_calc",
                                       .nominal = nom,
                                       .start = block.u_des,
                                       .role = VariableRole::UnknownParameter,
                                       .kind = VariableKind::Signal});
    v.u_offdes_calc = model.add_variable({.name = n + ".u_offdes_calc",
                                          .nominal = nom,
                                          .start = block.u_des,
                                          .role = VariableRole::UnknownParameter,
                                          .kind = VariableKind::Signal});
    const VarId calc = off ? v.u_offdes_calc : v.u_des_calc;
    const VarId u_out = v.u_out;
    const VarId u_in = v.u_in;
    const double u_norm = block.u_norm;
    switch (fam) {
        case ScenarioFamily::SteadyState:
            model.add_equation(n + ".equation", [=](const EvalContext& c) { return c(u_out) - c(calc); },
                               EquationPhase::Both, nom);
            break;
        case ScenarioFamily::SmallSignal:
            model.add_equation(
                n + ".equation", [=](const EvalContext& c) { return (c(u_in) - (c(u_out) - c(calc)) / u_norm) * u_norm; },
                EquationPhase::Both, nom);
            break;
        case ScenarioFamily::Simulation:
            model.add_equation(n + ".equation", [=](const EvalContext& c) { return c(u_out) - c(calc); },
                               EquationPhase::InitialOnly, nom);
            if (block.normalize) {
                model.add_equation(
                    n + ".equation.simulation",
                    [=](const EvalContext& c) { return c(u_out) - (c(calc) + u_norm * c(u_in)); },
                    EquationPhase::SimulationOnly, nom);
            } else {
                model.add_equation(n + ".equation.simulation",
                                   [=](const EvalContext& c) { return c(u_out) - c(u_in); },
                                   EquationPhase::SimulationOnly, nom);
            }
            break;
    }
    const double u_des = block.u_des;
    const VarId des = v.u_des_calc;
    const VarId offdes = v.u_offdes_calc;
    const auto fix = [&](const std::string& name, VarId var) {
        model.add_equation(name, [=](const EvalContext& c) { return c(var) - u_des; }, EquationPhase::InitialOnly,
                           nom);
    };
    if (block.mode == BlockMode::Forward || off) fix(n + ".initial.u_des_calc", des);
    if (block.mode == BlockMode::Forward || !off) fix(n + ".initial.u_offdes_calc", offdes);
    return v;
}

OutputBlockVars add_block(Model& model, const OutputBlock& block, Scenario scenario, VarId sensor,
                          double sensor_nominal) {
    if (!(block.y_norm > 0.0)) throw ModelError("output block '" + block.name + "': y_norm must be positive");
    const double nom = std::max(sensor_nominal, 1e-12);
    const ScenarioFamily fam = family(scenario);
    const bool off = off_row(block.mode, scenario);
    const bool normalized = fam == ScenarioFamily::SmallSignal || (fam == ScenarioFamily::Simulation && block.normalize);
    const std::string& n = block.name;
    OutputBlockVars v;
    v.y_in = sensor;
    v.y_out = model.add_variable({.name = n + ".y_out",
                                  .nominal = normalized ? 1.0 : nom,
                                  .start = normalized ? 0.0 : block.y_des,
                                  .kind = VariableKind::Signal});
    v.y_des_calc = model.add_variable({.name = n + ".y_des_calc",
                                       .nominal = nom,
                                       .start = block.y_des,
                                       .role = VariableRole::UnknownParameter,
                                       .kind = VariableKind::Signal});
    v.y_offdes_calc = model.add_variable({.name = n + ".y_offdes_calc",
                                          .nominal = nom,
                                          .start = off ? block.y_offdes : block.y_des,
                                          .role = VariableRole::UnknownParameter,
                                          .kind = VariableKind::Signal});
    const VarId y_in = v.y_in;
    const VarId y_out = v.y_out;
    const VarId calc = off ? v.y_offdes_calc : v.y_des_calc;
    const double y_norm = block.y_norm;
    if (normalized) {
        model.add_equation(
            n + ".equation", [=](const EvalContext& c) { return (c(y_out) - (c(y_in) - c(calc)) / y_norm) * y_norm; },
            EquationPhase::Both, nom);
    } else {
        model.add_equation(n + ".equation", [=](const EvalContext& c) { return c(y_out) - c(y_in); },
                           EquationPhase::Both, nom);
    }
    const double y_des = block.y_des;
    const double y_offdes = block.y_offdes;
    if (block.mode == BlockMode::Backward) {
        if (off) {
            model.add_equation(
                n + ".initial.y_in", [=](const EvalContext& c) { return c(y_in) - c.homotopy(y_offdes, y_des); },
                EquationPhase::InitialOnly, nom);
        } else {
            model.add_equation(n + ".initial.y_in", [=](const EvalContext& c) { return c(y_in) - y_des; },
                               EquationPhase::InitialOnly, nom);
        }
    }
    const VarId des = v.y_des_calc;
    const VarId offdes = v.y_offdes_calc;
    model.add_equation(n + ".initial.y_des_calc", [=](const EvalContext& c) { return c(des) - y_des; },
                       EquationPhase::InitialOnly, nom);
    const double offdes_value = off ? y_offdes : y_des;
    model.add_equation(n + ".initial.y_offdes_calc", [=](const EvalContext& c) { return c(offdes) - offdes_value; },
                       EquationPhase::InitialOnly, nom);
    return v;
}

BalanceReport validate_balance(const std::vector<InputBlock>& inputs, const std::vector<OutputBlock>& outputs,
                               Scenario scenario) {
    (void)scenario;
    BalanceReport r;
    std::map<std::string, const OutputBlock*> by_name;
    for (const auto& o : outputs) {
        if (!by_name.emplace(o.name, &o).second) throw BalanceError("duplicate output block '" + o.name + "'");
    }
    std::map<std::string, std::string> partner_of_output;
    for (const auto& in : inputs) {
        r.initial_equations += in.mode == BlockMode::Forward ? 2 : 1;
        if (in.mode == BlockMode::Forward) {
            if (in.partner.empty()) {
                ++r.unpaired_inputs;
            } else {
                auto it = by_name.find(in.partner);
                if (it == by_name.end())
                    throw BalanceError("input block '" + in.name + "' names unknown partner '" + in.partner + "'");
                if (it->second->mode != BlockMode::Forward)
                    throw BalanceError("input block '" + in.name + "' is forward but its partner '" + in.partner +
                                       "' is backward");
                if (!partner_of_output.emplace(in.partner, in.name).second)
                    throw BalanceError("output block '" + in.partner + "' is paired twice");
                ++r.forward_pairs;
            }
            continue;
        }
        if (in.partner.empty()) throw BalanceError("backward input block '" + in.name + "' has no paired output");
        auto it = by_name.find(in.partner);
        if (it == by_name.end())
            throw BalanceError("backward input block '" + in.name + "' names unknown partner '" + in.partner + "'");
        if (it->second->mode != BlockMode::Backward)
            throw BalanceError("backward input block '" + in.name + "' is paired with forward output '" + in.partner +
                               "'");
        if (!partner_of_output.emplace(in.partner, in.name).second)
            throw BalanceError("output block '" + in.partner + "' is paired twice");
        ++r.backward_pairs;
    }
    for (const auto& o : outputs) {
        r.initial_equations += o.mode == BlockMode::Forward ? 2 : 3;
        if (o.mode == BlockMode::Backward && partner_of_output.count(o.name) == 0)
            throw BalanceError("backward output block '" + o.name + "' has no paired input");
        if (partner_of_output.count(o.name) == 0) ++r.unpaired_outputs;
    }
    return r;
}

std::size_t warm_start_backward(const Snapshot& forward, FlatProblem& problem) {
    std::vector<std::string> orphans;
    std::size_t copied = 0;
    for (VarId v : problem.unknowns) {
        const auto& name = problem.variables[v.index()].name;
        auto it = forward.find(name);
        if (it == forward.end()) {
            orphans.push_back(name);
            continue;
        }
        problem.values[v.index()] = it->second;
        ++copied;
    }
    if (copied == 0) throw MappingError("warm start: no unknown of the problem appears in the snapshot", orphans);
    if (!orphans.empty()) {
        std::string list;
        for (std::size_t i = 0; i < orphans.size() && i < 5; ++i) list += (i ? ", " : "") + orphans[i];
        if (orphans.size() > 5) list += ", ...";
        throw MappingError("warm start: " + std::to_string(orphans.size()) + " unknowns missing from snapshot: " + list,
                           orphans);
    }
    return copied;
}

}  // namespace ssinit

#pragma once

// System boundary initialization blocks: input and output blocks whose
// equations and initial equations depend on the scenario and the
// forward/backward mode.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ssinit/eqsys.hpp"

namespace ssinit {

enum class Scenario {
    SteadyStateOnDesign,
    SteadyStateOffDesign,
    SmallSignalOnDesign,
    SmallSignalOffDesign,
    SimulationOnDesign,
    SimulationOffDesign,
};

inline constexpr Scenario all_scenarios[] = {
    Scenario::SteadyStateOnDesign, Scenario::SteadyStateOffDesign, Scenario::SmallSignalOnDesign,
    Scenario::SmallSignalOffDesign, Scenario::SimulationOnDesign,  Scenario::SimulationOffDesign,
};

enum class ScenarioFamily { SteadyState, SmallSignal, Simulation };

enum class BlockMode { Forward, Backward };

std::string_view to_string(Scenario s) noexcept;
/// Short command-line name: steady-on, steady-off, smallsig-on, smallsig-off, sim-on, sim-off.
std::string_view short_name(Scenario s) noexcept;
/// Accepts short and full names; throws ConfigError otherwise.
Scenario parse_scenario(std::string_view name);
std::string_view to_string(BlockMode m) noexcept;
BlockMode parse_mode(std::string_view name);

ScenarioFamily family(Scenario s) noexcept;
bool off_design(Scenario s) noexcept;

struct InputBlock {
    std::string name;
    /// Actuator signal driven by u_out, as "component.signal".
    std::string actuator;
    BlockMode mode = BlockMode::Forward;
    double u_des = 0.0;
    double u_norm = 1.0;
    /// Normalized input in Simulation scenarios.
    bool normalize = false;
    /// Output block paired with this one in backward mode.
    std::string partner;
};

struct OutputBlock {
    std::string name;
    /// Sensor signal read as y_in, as "component.signal".
    std::string sensor;
    BlockMode mode = BlockMode::Forward;
    double y_des = 0.0;
    double y_offdes = 0.0;
    double y_norm = 1.0;
    bool normalize = false;
};

struct BlockEquation {
    std::string text;
    /// Initial equation (active only during initialization).
    bool initial = false;

    friend bool operator==(const BlockEquation&, const BlockEquation&) = default;
};

/// Equations and initial equations of a block in a scenario, as written in the boundary tables.
std::vector<BlockEquation> emit_equations(const InputBlock& block, Scenario scenario);
std::vector<BlockEquation> emit_equations(const OutputBlock& block, Scenario scenario);

struct InputBlockVars {
    VarId u_out;
    VarId u_in;
    VarId u_des_calc;
    VarId u_offdes_calc;
};

struct OutputBlockVars {
    VarId y_in;
    VarId y_out;
    VarId y_des_calc;
    VarId y_offdes_calc;
};

/// Adds the block variables and equations to a model; u_out is the actuator variable itself.
InputBlockVars add_block(Model& model, const InputBlock& block, Scenario scenario, VarId actuator,
                         double actuator_nominal = 1.0);
/// y_in is the sensor variable itself.
OutputBlockVars add_block(Model& model, const OutputBlock& block, Scenario scenario, VarId sensor,
                          double sensor_nominal = 1.0);

struct BalanceReport {
    std::size_t initial_equations = 0;
    std::size_t forward_pairs = 0;
    std::size_t backward_pairs = 0;
    std::size_t unpaired_inputs = 0;
    std::size_t unpaired_outputs = 0;
};

/// Checks backward pairing and counts the initial equations contributed by the blocks.
/// Throws BalanceError naming an unpaired backward block.
BalanceReport validate_balance(const std::vector<InputBlock>& inputs, const std::vector<OutputBlock>& outputs,
                               Scenario scenario);

using Snapshot = std::map<std::string, double>;

/// Copies snapshot values into the start values of the problem's unknowns, matched by name.
/// Throws MappingError listing unknowns missing from the snapshot, or when nothing matches.
std::size_t warm_start_backward(const Snapshot& forward, FlatProblem& problem);

}  // namespace ssinit

#pragma once

// Component graph with directed fluid connections and boundary blocks,
// flattened into a single Model; plus the built-in demo oxy-fuel plant.

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssinit/boundary.hpp"
#include "ssinit/components.hpp"

namespace ssinit {

/// Outlet to inlet, both written "component.port".
struct Connection {
    std::string from;
    std::string to;
};

struct PlantGraph {
    std::shared_ptr<const media::SpeciesTable> species;
    std::vector<ComponentPtr> components;
    std::vector<Connection> connections;
    /// Design stream of each port, keyed "component.port".
    std::map<std::string, StreamState> design;
    std::vector<InputBlock> inputs;
    std::vector<OutputBlock> outputs;
    Scenario scenario = Scenario::SteadyStateOnDesign;

    template <class C, class... Args>
    const C& emplace(Args&&... args) {
        auto c = std::make_shared<const C>(std::forward<Args>(args)...);
        const C& ref = *c;
        components.push_back(std::move(c));
        return ref;
    }
    /// Adds a connection and, when given, records the design stream on both ends.
    void connect(const std::string& from, const std::string& to, std::optional<StreamState> stream = std::nullopt);
    const Component* find(const std::string& name) const;
    InputBlock* input(const std::string& name);
    OutputBlock* output(const std::string& name);
    /// Sets the mode of every block taking part in a pair with a backward-capable partner.
    void set_backward(bool backward);
};

/// Splits the connection ending at `to` with a homotopy decoupler whose design values
/// come from the connection's design stream.
void insert_decoupler(PlantGraph& graph, const std::string& to, const std::string& name);

struct FlatModel {
    Model model;
    std::map<std::string, FluidPort> ports;
    /// Component inputs and outputs, keyed "component.signal".
    std::map<std::string, VarId> signals;
    std::map<std::string, InputBlockVars> input_blocks;
    std::map<std::string, OutputBlockVars> output_blocks;
    std::vector<Connection> connections;
    std::size_t connection_equations = 0;
    BalanceReport balance;
    std::size_t initialization_size = 0;
    std::size_t simulation_size = 0;
};

/// Contributes every component, adds connection aliases (p, w, h, X per connection) and the
/// boundary blocks, fixes unbound inputs to their defaults and checks squareness of both phases.
/// Throws ModelError on dangling or duplicate connections, BalanceError on unpaired backward
/// blocks and StructuralSingularity on a non-square phase.
FlatModel flatten(const PlantGraph& plant);

/// Conservation residuals of a converged solution (one value per model variable).
struct ConservationReport {
    /// Largest scaled p/w/h/X mismatch across a connection.
    double connection = 0.0;
    /// Largest |hot enthalpy-flow drop - cold gain| / duty over heat exchangers.
    double hx_closure = 0.0;
    /// Largest relative C/H/O/N imbalance over combustors.
    double atom_balance = 0.0;
    /// Largest |sum X - 1| over ports.
    double fraction_sum = 0.0;
    /// Smallest mass fraction seen at any port.
    double min_fraction = 1.0;
    std::string worst_connection;
    std::string worst_hx;
    std::string worst_combustor;
};

ConservationReport check_conservation(const PlantGraph& plant, const FlatModel& flat, std::span<const double> values);

/// Sets each Simulation-family input connector so that the simulation-phase input equation
/// reproduces the initialized actuator value.
void hold_inputs(const PlantGraph& plant, const FlatModel& flat, std::vector<double>& values);

// ---------------------------------------------------------------------------
// Demo plant.

struct DemoDesign {
    std::shared_ptr<const media::SpeciesTable> species;
    /// Design stream of every port, keyed "component.port".
    std::map<std::string, StreamState> streams;
    double fuel_flow = 0.012;
    double moderator_flow = 0.2;
    double current = 1e5;
    double cell_voltage = 0.0;
    double stack_power = 0.0;
    double turbine_power = 0.0;
    double compressor_power = 0.0;
    double combustor_temperature = 0.0;
    double condensate = 0.0;
    double recuperator_duty = 0.0;
    int loop_iterations = 0;
    FuelCellParams fuel_cell;
    HxParams recuperator;
    TurbineParams turbine;
    CompressorParams compressor;
    IntercoolerParams intercooler;
    CondenserParams condenser;
    CombustorParams combustor;
    std::map<std::string, PressureLossParams> losses;
};

/// Sequential design of the demo cycle with a fixed-point iteration on the recuperator loop.
DemoDesign design_demo_point();

/// Demo oxy-fuel cycle with forward boundary blocks on fuel flow, moderator flow and stack current.
PlantGraph build_demo_plant(const DemoDesign& design);
PlantGraph build_demo_plant();

}  // namespace ssinit

#pragma once

// Component library. Each component declares fluid ports and signals and
// contributes variables and equations (simulation, initial, homotopy) to a Model.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ssinit/eqsys.hpp"
#include "ssinit/media.hpp"

namespace ssinit {

enum class PortDirection { Inlet, Outlet };

/// Design or guess values of a stream: pressure, mass flow, temperature, full mass fractions.
struct StreamState {
    double p = media::p_ref;
    double w = 1.0;
    double T = 300.0;
    std::vector<double> X;
};

/// Port variables; X holds the S-1 independent mass fractions, the last species closes the sum.
struct FluidPort {
    std::string name;
    PortDirection direction = PortDirection::Inlet;
    VarId p;
    VarId w;
    VarId h;
    std::vector<VarId> X;
};

/// Full mass-fraction vector of a port as seen by a residual.
std::vector<double> fractions(const EvalContext& c, const std::vector<VarId>& X);

/// Namespaced variable and equation factory handed to components.
class Builder {
public:
    Builder(Model& model, std::shared_ptr<const media::SpeciesTable> species, std::string prefix,
            std::map<std::string, StreamState> design = {});

    Model& model() noexcept { return model_; }
    const media::SpeciesTable& species() const noexcept { return *species_; }
    /// Shared table for capture by residual closures.
    const std::shared_ptr<const media::SpeciesTable>& species_ptr() const noexcept { return species_; }
    std::size_t independent() const noexcept { return species_->size() - 1; }
    const std::string& prefix() const noexcept { return prefix_; }
    std::string qualify(std::string_view local) const;

    VarId add(std::string_view local, VariableDescriptor d);
    std::size_t equation(std::string_view local, Residual r, EquationPhase phase = EquationPhase::Both,
                         double nominal = 1.0, StructureTag tag = {});
    std::size_t alias(std::string_view local, VarId a, VarId b, EquationPhase phase = EquationPhase::Both);
    std::size_t fix(std::string_view local, VarId v, double value, EquationPhase phase = EquationPhase::Both);

    /// Design stream of a port, or a default stream when none is known.
    StreamState design(const std::string& port) const;
    bool has_design(const std::string& port) const { return design_.count(port) != 0; }

    /// Fresh p, w, h, X variables started from the port's design stream.
    FluidPort port(const std::string& local, PortDirection direction);
    /// Composition variables named `<local>.X[species]`.
    std::vector<VarId> composition(std::string_view local, const std::vector<double>& start,
                                   VariableRole role = VariableRole::Algebraic);

private:
    Model& model_;
    std::shared_ptr<const media::SpeciesTable> species_;
    std::string prefix_;
    std::map<std::string, StreamState> design_;
};

struct Contribution {
    std::map<std::string, FluidPort> ports;
    /// Actuator signals with their default values when no input block drives them.
    std::map<std::string, std::pair<VarId, double>> inputs;
    std::map<std::string, VarId> outputs;
};

struct PortSpec {
    std::string name;
    PortDirection direction;
};

class Component {
public:
    explicit Component(std::string name) : name_(std::move(name)) {}
    virtual ~Component() = default;

    const std::string& name() const noexcept { return name_; }
    virtual std::string_view type() const noexcept = 0;
    virtual std::vector<PortSpec> ports() const = 0;
    virtual Contribution contribute(Builder& b) const = 0;

private:
    std::string name_;
};

using ComponentPtr = std::shared_ptr<const Component>;

// ---------------------------------------------------------------------------
// Closed-form physics shared by residuals and tests.

struct TurbineParams {
    double K_t = 1.0;
    double eta_is = 0.9;
    double w_nom = 1.0;
    double p_nom = 1e5;

    void validate() const;
};

/// Stodola ellipse law blended with its linear simplification.
double turbine_flow(double p_in, double rho_in, double beta, const TurbineParams& params, double lambda);

enum class LossLaw { QuadraticWithHomotopy, AlwaysLinear };

struct PressureLossParams {
    double dp_nom = 1e3;
    double w_nom = 1.0;
    double rho_nom = 1.0;
    LossLaw law = LossLaw::QuadraticWithHomotopy;

    void validate() const;
};

double pressure_loss(double w, double rho, const PressureLossParams& params, double lambda);

/// gamma_nom (w/w_nom)^0.8 (p/p_nom)^0.5 with |w|.
double heat_transfer_coefficient(double gamma_nom, double w, double w_nom, double p, double p_nom);

struct DecouplerParams {
    double h_des = 0.0;
    std::vector<double> X_des;

    void validate() const;
};

struct DecouplerOutlet {
    double h;
    std::vector<double> X;
};

DecouplerOutlet decoupler_outlet(double h_in, const std::vector<double>& X_in, const DecouplerParams& params,
                                 double lambda);

struct CondenserParams {
    double volume = 0.05;
    media::SaturationCurve saturation = media::SaturationCurve::water();
    double T_out = 303.15;

    void validate() const;
};

struct CondenserSplit {
    /// Gas leaving per unit of inlet mass flow at lambda = 1.
    double gas_fraction;
    /// Condensate per unit of inlet mass flow.
    double liquid_fraction;
    std::vector<double> X_out;
};

/// Raoult flash of the inlet mixture at (p, T_out).
CondenserSplit condenser_split(double p, const std::vector<double>& X_in, const CondenserParams& params,
                               const media::SpeciesTable& table);

/// Gas-side outlet flow of the condenser, w_in - homotopy(w_liquid, 0).
double condenser_gas_flow(double w_in, double liquid_fraction, double lambda);

/// Species mass flows after complete combustion of the mixed inlet streams.
/// Throws ModelError when oxygen is sub-stoichiometric.
std::vector<double> complete_combustion(const std::vector<double>& species_flows, const media::SpeciesTable& table);

/// Atom flows (C, H, O, N) in mol/s of a species mass-flow vector.
std::array<double, 4> atom_flows(const std::vector<double>& species_flows, const media::SpeciesTable& table);

// ---------------------------------------------------------------------------
// Fuel-cell electrochemistry (pressures in Pa, temperatures in K, current densities in A/m^2).

namespace electrochem {

inline constexpr int electrons = 2;

/// Nernst open-circuit potential of H2 + 1/2 O2 -> H2O.
double open_circuit_potential(double T, double p_H2, double p_H2O, double p_O2);

double exchange_current(double T_pen, double k, double Ea);

/// Explicit activation overpotential, inverse of Butler-Volmer for alpha = 0.5.
double activation_loss(double j, double j0, double T, double alpha);

/// Linearized activation overpotential at T_nom.
double activation_loss_linear(double j, double j0, double T_nom, double alpha);

/// Butler-Volmer current density for an overpotential.
double butler_volmer(double e_act, double j0, double T_pen, double alpha);

/// Species pressure at the triple phase boundary; reactants fall and products rise with j.
double tpb_pressure(double p, double p_i, double T, double diffusion, double j, bool product);

double concentration_loss(double T, double p_H2, double p_H2O, double p_O2, double p_H2_tpb, double p_H2O_tpb,
                          double p_O2_tpb);

/// Lumped rate k0 exp(-Ea/RT) (p1 p2 - products/K_eq) in mol/s; pressures in bar.
double reaction_rate(const media::ReactionParams& r, double T, double p1, double p2, double products);

}  // namespace electrochem

// ---------------------------------------------------------------------------
// Components.

struct SourceParams {
    double w = 1.0;
    double T = 300.0;
    std::vector<double> X;
};

class FluidSource final : public Component {
public:
    FluidSource(std::string name, SourceParams params) : Component(std::move(name)), params_(std::move(params)) {}
    std::string_view type() const noexcept override { return "source"; }
    std::vector<PortSpec> ports() const override { return {{"out", PortDirection::Outlet}}; }
    Contribution contribute(Builder& b) const override;
    const SourceParams& params() const noexcept { return params_; }

private:
    SourceParams params_;
};

class FluidSink final : public Component {
public:
    FluidSink(std::string name, double p) : Component(std::move(name)), p_(p) {}
    std::string_view type() const noexcept override { return "sink"; }
    std::vector<PortSpec> ports() const override { return {{"in", PortDirection::Inlet}}; }
    Contribution contribute(Builder& b) const override;
    double pressure() const noexcept { return p_; }

private:
    double p_;
};

class PressureLoss final : public Component {
public:
    PressureLoss(std::string name, PressureLossParams params) : Component(std::move(name)), params_(params) {}
    std::string_view type() const noexcept override { return "pressure_loss"; }
    std::vector<PortSpec> ports() const override {
        return {{"in", PortDirection::Inlet}, {"out", PortDirection::Outlet}};
    }
    Contribution contribute(Builder& b) const override;
    const PressureLossParams& params() const noexcept { return params_; }

private:
    PressureLossParams params_;
};

class Decoupler final : public Component {
public:
    Decoupler(std::string name, DecouplerParams params) : Component(std::move(name)), params_(std::move(params)) {}
    std::string_view type() const noexcept override { return "decoupler"; }
    std::vector<PortSpec> ports() const override {
        return {{"in", PortDirection::Inlet}, {"out", PortDirection::Outlet}};
    }
    Contribution contribute(Builder& b) const override;
    const DecouplerParams& params() const noexcept { return params_; }

private:
    DecouplerParams params_;
};

struct CompressorParams {
    double beta = 4.0;
    double eta_is = 0.85;
};

/// Fixed pressure ratio and isentropic efficiency.
class Compressor final : public Component {
public:
    Compressor(std::string name, CompressorParams params) : Component(std::move(name)), params_(params) {}
    std::string_view type() const noexcept override { return "compressor"; }
    std::vector<PortSpec> ports() const override {
        return {{"in", PortDirection::Inlet}, {"out", PortDirection::Outlet}};
    }
    Contribution contribute(Builder& b) const override;
    const CompressorParams& params() const noexcept { return params_; }

private:
    CompressorParams params_;
};

class Turbine final : public Component {
public:
    Turbine(std::string name, TurbineParams params) : Component(std::move(name)), params_(params) {}
    std::string_view type() const noexcept override { return "turbine"; }
    std::vector<PortSpec> ports() const override {
        return {{"in", PortDirection::Inlet}, {"out", PortDirection::Outlet}};
    }
    Contribution contribute(Builder& b) const override;
    const TurbineParams& params() const noexcept { return params_; }

private:
    TurbineParams params_;
};

struct IntercoolerParams {
    double volume = 0.05;
    double T_out = 320.0;
};

/// 0D volume with dynamic mass balance and fixed outlet temperature.
class Intercooler final : public Component {
public:
    Intercooler(std::string name, IntercoolerParams params) : Component(std::move(name)), params_(params) {}
    std::string_view type() const noexcept override { return "intercooler"; }
    std::vector<PortSpec> ports() const override {
        return {{"in", PortDirection::Inlet}, {"out", PortDirection::Outlet}};
    }
    Contribution contribute(Builder& b) const override;
    const IntercoolerParams& params() const noexcept { return params_; }

    /// Mass stored at pressure p for the given composition.
    double stored_mass(double p, const std::vector<double>& X, const media::SpeciesTable& table) const;

private:
    IntercoolerParams params_;
};

/// Flash tank with Raoult condensation at a fixed outlet temperature.
class Condenser final : public Component {
public:
    Condenser(std::string name, CondenserParams params) : Component(std::move(name)), params_(params) {}
    std::string_view type() const noexcept override { return "condenser"; }
    std::vector<PortSpec> ports() const override {
        return {{"in", PortDirection::Inlet}, {"out", PortDirection::Outlet}};
    }
    Contribution contribute(Builder& b) const override;
    const CondenserParams& params() const noexcept { return params_; }

private:
    CondenserParams params_;
};

struct CombustorParams {
    double volume = 0.05;
    int inlets = 2;
};

/// 0D volume with complete combustion of every inlet stream.
class Combustor final : public Component {
public:
    Combustor(std::string name, CombustorParams params) : Component(std::move(name)), params_(params) {}
    std::string_view type() const noexcept override { return "combustor"; }
    std::vector<PortSpec> ports() const override;
    Contribution contribute(Builder& b) const override;
    const CombustorParams& params() const noexcept { return params_; }

private:
    CombustorParams params_;
};

/// Adiabatic mixing of two streams without storage.
class Mixer final : public Component {
public:
    explicit Mixer(std::string name) : Component(std::move(name)) {}
    std::string_view type() const noexcept override { return "mixer"; }
    std::vector<PortSpec> ports() const override {
        return {{"in1", PortDirection::Inlet}, {"in2", PortDirection::Inlet}, {"out", PortDirection::Outlet}};
    }
    Contribution contribute(Builder& b) const override;
};

/// Splits a stream with a fixed fraction to out1.
class Splitter final : public Component {
public:
    Splitter(std::string name, double fraction) : Component(std::move(name)), fraction_(fraction) {}
    std::string_view type() const noexcept override { return "splitter"; }
    std::vector<PortSpec> ports() const override {
        return {{"in", PortDirection::Inlet}, {"out1", PortDirection::Outlet}, {"out2", PortDirection::Outlet}};
    }
    Contribution contribute(Builder& b) const override;
    double fraction() const noexcept { return fraction_; }

private:
    double fraction_;
};

struct ChannelParams {
    /// Per volume.
    double volume = 0.01;
    /// Heat-transfer surface per volume.
    double surface = 1.0;
    double gamma_nom = 100.0;
    double w_nom = 1.0;
    double p_nom = 1e5;
    /// Lumped loss at each module inlet.
    PressureLossParams inlet_loss{};
};

struct HxParams {
    int modules = 2;
    int volumes = 3;
    ChannelParams hot;
    ChannelParams cold;
    /// Wall heat capacity per volume, J/K.
    double wall_capacity = 2e4;

    void validate() const;
};

/// Counter-flow heat exchanger: modules of finite volumes on each side with a shared wall.
/// Hot volume k faces cold volume (modules*volumes - 1 - k).
class HeatExchanger final : public Component {
public:
    HeatExchanger(std::string name, HxParams params) : Component(std::move(name)), params_(params) {}
    std::string_view type() const noexcept override { return "heat_exchanger"; }
    std::vector<PortSpec> ports() const override {
        return {{"hot_in", PortDirection::Inlet},
                {"hot_out", PortDirection::Outlet},
                {"cold_in", PortDirection::Inlet},
                {"cold_out", PortDirection::Outlet}};
    }
    Contribution contribute(Builder& b) const override;
    const HxParams& params() const noexcept { return params_; }

private:
    HxParams params_;
};

struct ElectrodeParams {
    /// Exchange-current factor k^el of j0 = R T/(n F) k exp(-Ea/(R T)).
    double k = 1e9;
    double Ea = 1e5;
};

struct FuelCellParams {
    int volumes = 5;
    /// Active area per volume, m^2.
    double area = 5.0;
    ChannelParams anode;
    ChannelParams cathode;
    double R_ohm = 2e-5;
    ElectrodeParams anode_electrode;
    ElectrodeParams cathode_electrode;
    double alpha = 0.5;
    /// tau/(D_eff p_el) lumps for H2, H2O (anode) and O2 (cathode).
    double diffusion_H2 = 1e-4;
    double diffusion_H2O = 1e-4;
    double diffusion_O2 = 1e-4;
    double T_nom = 1100.0;
    /// Simplified polarization E = a I + b.
    double a = -2e-6;
    double b = 0.95;
    /// PEN heat capacity per volume, J/K.
    double pen_capacity = 5e3;
    media::ReactionParams reforming = media::steam_reforming();
    media::ReactionParams shift = media::water_gas_shift();
    /// Design partial pressures (Pa) held constant at lambda = 0.
    double p_H2_des = 1e5;
    double p_H2O_des = 1e5;
    double p_O2_des = 2e4;
    /// Design current density for the frozen concentration loss.
    double j_des = 4000.0;

    void validate() const;
};

/// Co-flow 1D solid oxide fuel cell with internal reforming.
class FuelCell final : public Component {
public:
    FuelCell(std::string name, FuelCellParams params) : Component(std::move(name)), params_(std::move(params)) {}
    std::string_view type() const noexcept override { return "fuel_cell"; }
    std::vector<PortSpec> ports() const override {
        return {{"anode_in", PortDirection::Inlet},
                {"anode_out", PortDirection::Outlet},
                {"cathode_in", PortDirection::Inlet},
                {"cathode_out", PortDirection::Outlet}};
    }
    Contribution contribute(Builder& b) const override;
    const FuelCellParams& params() const noexcept { return params_; }

    /// Open-circuit potential with design partial pressures at T_nom.
    double frozen_ocp() const;
    /// Concentration loss with design partial pressures at T_nom for current density j.
    double frozen_concentration_loss(double j) const;

private:
    FuelCellParams params_;
};

}  // namespace ssinit

#pragma once

// Finite-volume building blocks shared by the heat exchanger, fuel cell,
// combustor and storage components.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ssinit/components.hpp"

namespace ssinit::detail {

struct PressureState {
    VarId p;
    VarId dp;
};

/// Pressure state with its derivative and the initial equation der(p) = 0.
PressureState pressure_state(Builder& b, const std::string& local, double p_start);

/// Generic state with its derivative and the initial equation der(x) = 0.
std::pair<VarId, VarId> state(Builder& b, const std::string& local, VariableDescriptor d);

struct VolumeState {
    VarId T;
    VarId dT;
    std::vector<VarId> X;
    std::vector<VarId> dX;
    VarId dM;
    VarId dU;
    VarId h_out;
    VarId w_out;
};

VolumeState volume_state(Builder& b, const std::string& local, double T, const std::vector<double>& X, double w);

struct Inflow {
    VarId w;
    VarId h;
    std::vector<VarId> X;
};

struct VolumeBalance {
    std::string local;
    double volume = 1.0;
    PressureState pressure;
    /// Single inflow without sources: enables the alias eliminations of steady state.
    std::optional<Inflow> simple;
    /// Net mass inflow excluding the outlet.
    std::function<double(const EvalContext&)> mass;
    /// Net species inflow excluding the outlet, full species vector.
    std::function<std::vector<double>(const EvalContext&)> species;
    /// Net enthalpy inflow including heat and source terms, excluding the outlet.
    std::function<double(const EvalContext&)> energy;
    double w_nominal = 1.0;
    double energy_nominal = 1e5;
};

/// Mass, energy and species balances of a mixing volume in state-derivative form.
void volume_equations(Builder& b, const VolumeBalance& vb, const VolumeState& s);

/// Lumped pressure loss p_up - p_down = dp(w) with density from the upstream stream.
void loss_equation(Builder& b, const std::string& local, VarId p_up, VarId p_down, const Inflow& in,
                   const PressureLossParams& params);

struct VolumeSources {
    std::function<double(const EvalContext&)> mass;
    std::function<void(const EvalContext&, std::vector<double>&)> species;
    /// Enthalpy carried by the sources, given the volume temperature.
    std::function<double(const EvalContext&, double)> energy;
};

struct Channel {
    std::string local;
    ChannelParams params;
    int modules = 1;
    int volumes = 1;
    Inflow inlet;
    VarId p_inlet;
    std::vector<PressureState> pressures;
    std::vector<VolumeState> cells;
    std::vector<VarId> Q;

    std::size_t size() const noexcept { return cells.size(); }
    const PressureState& pressure_of(std::size_t k) const { return pressures[k / static_cast<std::size_t>(volumes)]; }
    Inflow inflow(std::size_t k) const;
    FluidPort outlet(const std::string& name) const;
};

/// Variables of a channel of modules x volumes, started by interpolating between the inlet and outlet designs.
Channel channel_variables(Builder& b, const std::string& local, const FluidPort& inlet, const ChannelParams& params,
                          int modules, int volumes, const StreamState& in, const StreamState& out);

/// Channel balances with heat Q_k = gamma S (T_surface,k - T_k) into volume k.
void channel_equations(Builder& b, const Channel& c, const std::vector<VarId>& surface,
                       const std::vector<VolumeSources>& sources = {});

}  // namespace ssinit::detail

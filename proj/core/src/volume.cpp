#include "volume.hpp"

#include <algorithm>
#include <cmath>

namespace ssinit::detail {

PressureState pressure_state(Builder& b, const std::string& local, double p_start) {
    auto [p, dp] = state(b, local + ".p", {.nominal = std::max(p_start, 1e3),
                                           .start = p_start,
                                           .min = 1.0,
                                           .kind = VariableKind::Pressure,
                                           .unit = "Pa"});
    return {p, dp};
}

std::pair<VarId, VarId> state(Builder& b, const std::string& local, VariableDescriptor d) {
    const std::string unit = d.unit;
    const double nominal = d.nominal;
    d.role = VariableRole::State;
    const VarId x = b.add(local, std::move(d));
    const VarId dx = b.add("der(" + local + ")", {.nominal = nominal * 1e-2,
                                                   .start = 0.0,
                                                   .kind = VariableKind::Derivative,
                                                   .unit = unit.empty() ? "1/s" : unit + "/s",
                                                   .derivative_of = x});
    b.fix("steady(" + local + ")", dx, 0.0, EquationPhase::InitialOnly);
    return {x, dx};
}

VolumeState volume_state(Builder& b, const std::string& local, double T, const std::vector<double>& X, double w) {
    VolumeState s;
    std::tie(s.T, s.dT) = state(b, local + ".T", {.nominal = std::max(T, 300.0),
                                                  .start = T,
                                                  .min = 150.0,
                                                  .max = 4000.0,
                                                  .kind = VariableKind::Temperature,
                                                  .unit = "K"});
    const auto& table = b.species();
    for (std::size_t i = 0; i < b.independent(); ++i) {
        auto [x, dx] = state(b, local + ".X[" + table[i].name + "]", {.nominal = 1.0,
                                                                      .start = std::clamp(X.at(i), 0.0, 1.0),
                                                                      .min = 0.0,
                                                                      .max = 1.0,
                                                                      .kind = VariableKind::Composition});
        s.X.push_back(x);
        s.dX.push_back(dx);
    }
    const double wn = std::max(std::abs(w), 1e-3);
    s.dM = b.add(local + ".dM", {.nominal = wn, .kind = VariableKind::Derivative, .unit = "kg/s"});
    const double h = media::enthalpy(T, X, table);
    s.dU = b.add(local + ".dU", {.nominal = std::max(std::abs(h) * wn, 1e3), .kind = VariableKind::Derivative, .unit = "W"});
    s.h_out = b.add(local + ".h", {.nominal = std::max(std::abs(h), 1e5),
                                   .start = h,
                                   .kind = VariableKind::Enthalpy,
                                   .unit = "J/kg"});
    s.w_out = b.add(local + ".w_out", {.nominal = wn,
                                       .start = std::max(w, 0.0),
                                       .min = 0.0,
                                       .kind = VariableKind::MassFlow,
                                       .unit = "kg/s"});
    return s;
}

void volume_equations(Builder& b, const VolumeBalance& vb, const VolumeState& s) {
    const auto tbl = b.species_ptr();
    const auto& table = *tbl;
    const std::size_t K = b.independent();
    const double V = vb.volume;
    const auto pressure = vb.pressure;
    const std::string& n = vb.local;

    std::vector<VarId> rates{s.dT, pressure.dp};
    rates.insert(rates.end(), s.dX.begin(), s.dX.end());

    if (vb.simple) {
        const Inflow in = *vb.simple;
        b.equation(n + ".mass",
                   [=](const EvalContext& c) { return c(s.dM) - (c(in.w) - c(s.w_out)); },
                   EquationPhase::Both, vb.w_nominal, tag::ZeroDerivativeAlias{s.dM, in.w, s.w_out});
    } else {
        b.equation(n + ".mass", [=](const EvalContext& c) { return c(s.dM) - (vb.mass(c) - c(s.w_out)); },
                   EquationPhase::Both, vb.w_nominal);
    }

    b.equation(
        n + ".mass_state",
        [=](const EvalContext& c) {
            const auto& table = *tbl;
            const double p = c(pressure.p);
            const double T = c(s.T);
            const auto X = fractions(c, s.X);
            const double nm = media::specific_moles(X, table);
            const double v = media::R * T * nm / p;
            const double MS = table[K].molar_mass;
            double dv = media::R * nm / p * c(s.dT) - v / p * c(pressure.dp);
            for (std::size_t i = 0; i < K; ++i)
                dv += media::R * T / p * (1.0 / table[i].molar_mass - 1.0 / MS) * c(s.dX[i]);
            return c(s.dM) + V / (v * v) * dv;
        },
        EquationPhase::Both, vb.w_nominal, tag::DerivativeLinear{s.dM, rates});

    std::vector<VarId> energy_inputs = rates;
    energy_inputs.push_back(s.dM);
    b.equation(
        n + ".energy_state",
        [=](const EvalContext& c) {
            const auto& table = *tbl;
            const double p = c(pressure.p);
            const double T = c(s.T);
            const auto X = fractions(c, s.X);
            const double nm = media::specific_moles(X, table);
            const double M = V * p / (media::R * T * nm);
            const double u = media::enthalpy(T, X, table) - media::R * T * nm;
            const double uS = media::species_enthalpy(K, T, table) - media::R * T / table[K].molar_mass;
            double du = (media::cp_mix(X, table) - media::R * nm) * c(s.dT);
            for (std::size_t i = 0; i < K; ++i) {
                const double ui = media::species_enthalpy(i, T, table) - media::R * T / table[i].molar_mass;
                du += (ui - uS) * c(s.dX[i]);
            }
            return c(s.dU) - (M * du + c(s.dM) * u);
        },
        EquationPhase::Both, vb.energy_nominal, tag::DerivativeLinear{s.dU, energy_inputs});

    b.equation(
        n + ".energy", [=](const EvalContext& c) { return c(s.dU) - (vb.energy(c) - c(s.w_out) * c(s.h_out)); },
        EquationPhase::Both, vb.energy_nominal);

    b.equation(
        n + ".enthalpy",
        [=](const EvalContext& c) { return c(s.h_out) - media::enthalpy(c(s.T), fractions(c, s.X), *tbl); },
        EquationPhase::Both, 1e5);

    for (std::size_t i = 0; i < K; ++i) {
        const std::string xi = n + ".species[" + table[i].name + "]";
        if (vb.simple) {
            const Inflow in = *vb.simple;
            b.equation(
                xi,
                [=](const EvalContext& c) {
                    const auto& table = *tbl;
                    const double p = c(pressure.p);
                    const double T = c(s.T);
                    const double M = V * p / (media::R * T * media::specific_moles(fractions(c, s.X), table));
                    return M * c(s.dX[i]) - c(in.w) * (c(in.X[i]) - c(s.X[i]));
                },
                EquationPhase::SimulationOnly, vb.w_nominal);
            b.alias(xi + ".initial", s.X[i], in.X[i], EquationPhase::InitialOnly);
        } else {
            b.equation(
                xi,
                [=](const EvalContext& c) {
                    const auto& table = *tbl;
                    const double p = c(pressure.p);
                    const double T = c(s.T);
                    const double M = V * p / (media::R * T * media::specific_moles(fractions(c, s.X), table));
                    const auto m = vb.species(c);
                    double total = 0.0;
                    for (double mi : m) total += mi;
                    return M * c(s.dX[i]) - (m[i] - c(s.X[i]) * total);
                },
                EquationPhase::SimulationOnly, vb.w_nominal);
            b.equation(
                xi + ".initial",
                [=](const EvalContext& c) {
                    const auto m = vb.species(c);
                    double total = 0.0;
                    for (double mi : m) total += mi;
                    return m[i] - c(s.X[i]) * total;
                },
                EquationPhase::InitialOnly, vb.w_nominal);
        }
    }
}

void loss_equation(Builder& b, const std::string& local, VarId p_up, VarId p_down, const Inflow& in,
                   const PressureLossParams& params) {
    params.validate();
    const auto tbl = b.species_ptr();
    if (params.law == LossLaw::AlwaysLinear) {
        b.equation(
            local,
            [=](const EvalContext& c) { return c(p_up) - c(p_down) - params.dp_nom / params.w_nom * c(in.w); },
            EquationPhase::Both, params.dp_nom);
        return;
    }
    b.equation(
        local,
        [=](const EvalContext& c) {
            const auto& table = *tbl;
            const double dp = c.homotopy(
                [&] {
                    const double p = c(p_up);
                    const auto X = fractions(c, in.X);
                    const double T = media::temperature(c(in.h), X, table);
                    return pressure_loss(c(in.w), media::density(p, T, X, table), params, 1.0);
                },
                [&] { return pressure_loss(c(in.w), params.rho_nom, params, 0.0); });
            return c(p_up) - c(p_down) - dp;
        },
        EquationPhase::Both, params.dp_nom);
}

Inflow Channel::inflow(std::size_t k) const {
    if (k == 0) return inlet;
    const auto& prev = cells[k - 1];
    return {prev.w_out, prev.h_out, prev.X};
}

FluidPort Channel::outlet(const std::string& name) const {
    return {name, PortDirection::Outlet, pressures.back().p, cells.back().w_out, cells.back().h_out, cells.back().X};
}

Channel channel_variables(Builder& b, const std::string& local, const FluidPort& inlet, const ChannelParams& params,
                          int modules, int volumes, const StreamState& in, const StreamState& out) {
    if (modules < 1 || volumes < 1) throw ModelError(b.qualify(local) + ": needs at least one module and volume");
    Channel c;
    c.local = local;
    c.params = params;
    c.modules = modules;
    c.volumes = volumes;
    c.inlet = {inlet.w, inlet.h, inlet.X};
    c.p_inlet = inlet.p;
    for (int m = 0; m < modules; ++m) {
        const double f = static_cast<double>(m + 1) / modules;
        c.pressures.push_back(pressure_state(b, local + ".m" + std::to_string(m + 1), in.p + f * (out.p - in.p)));
    }
    const int n = modules * volumes;
    for (int k = 0; k < n; ++k) {
        const double f = static_cast<double>(k + 1) / n;
        std::vector<double> X(in.X.size());
        double sum = 0.0;
        for (std::size_t i = 0; i < X.size(); ++i) {
            X[i] = std::max(0.0, in.X[i] + f * (out.X[i] - in.X[i]));
            sum += X[i];
        }
        for (double& x : X) x /= sum;
        const double T = in.T + f * (out.T - in.T);
        const double w = in.w + f * (out.w - in.w);
        const std::string v = local + ".v" + std::to_string(k + 1);
        c.cells.push_back(volume_state(b, v, T, X, w));
        c.Q.push_back(b.add(v + ".Q", {.nominal = std::max(params.gamma_nom * params.surface * 10.0, 1.0),
                                       .kind = VariableKind::HeatFlow,
                                       .unit = "W"}));
    }
    return c;
}

void channel_equations(Builder& b, const Channel& c, const std::vector<VarId>& surface,
                       const std::vector<VolumeSources>& sources) {
    const ChannelParams params = c.params;
    for (int m = 0; m < c.modules; ++m) {
        const VarId up = m == 0 ? c.p_inlet : c.pressures[m - 1].p;
        loss_equation(b, c.local + ".m" + std::to_string(m + 1) + ".inlet_loss", up, c.pressures[m].p,
                      c.inflow(static_cast<std::size_t>(m * c.volumes)), params.inlet_loss);
    }
    const double wn = params.w_nom;
    for (std::size_t k = 0; k < c.size(); ++k) {
        const std::string v = c.local + ".v" + std::to_string(k + 1);
        const Inflow in = c.inflow(k);
        const auto& s = c.cells[k];
        const VarId Q = c.Q[k];
        const VarId Ts = surface.at(k);
        const VarId p = c.pressure_of(k).p;
        b.equation(
            v + ".heat",
            [=](const EvalContext& ctx) {
                const double gamma =
                    heat_transfer_coefficient(params.gamma_nom, ctx(in.w), params.w_nom, ctx(p), params.p_nom);
                return ctx(Q) - gamma * params.surface * (ctx(Ts) - ctx(s.T));
            },
            EquationPhase::Both, std::max(params.gamma_nom * params.surface * 10.0, 1.0));

        VolumeBalance vb;
        vb.local = v;
        vb.volume = params.volume;
        vb.pressure = c.pressure_of(k);
        vb.w_nominal = wn;
        vb.energy_nominal = std::max(wn * 1e5, 1.0);
        const VolumeSources* src = k < sources.size() ? &sources[k] : nullptr;
        if (src == nullptr || (!src->mass && !src->species && !src->energy)) {
            vb.simple = in;
            vb.energy = [=](const EvalContext& ctx) { return ctx(in.w) * ctx(in.h) + ctx(Q); };
        } else {
            const VolumeSources sv = *src;
            vb.mass = [=](const EvalContext& ctx) { return ctx(in.w) + (sv.mass ? sv.mass(ctx) : 0.0); };
            vb.species = [=](const EvalContext& ctx) {
                auto X = fractions(ctx, in.X);
                const double w = ctx(in.w);
                for (double& x : X) x *= w;
                if (sv.species) sv.species(ctx, X);
                return X;
            };
            vb.energy = [=](const EvalContext& ctx) {
                return ctx(in.w) * ctx(in.h) + ctx(Q) + (sv.energy ? sv.energy(ctx, ctx(s.T)) : 0.0);
            };
        }
        volume_equations(b, vb, s);
    }
}

}  // namespace ssinit::detail

#include <algorithm>
#include <cmath>

#include "ssinit/components.hpp"
#include "volume.hpp"

namespace ssinit {

namespace {

using detail::Inflow;

void pass_composition(Builder& b, const FluidPort& in, const FluidPort& out) {
    for (std::size_t i = 0; i < in.X.size(); ++i)
        b.alias("X[" + b.species()[i].name + "]", out.X[i], in.X[i]);
}

double design_enthalpy(const Builder& b, const std::string& port) {
    const StreamState s = b.design(port);
    return media::enthalpy(s.T, s.X, b.species());
}

}  // namespace

Contribution FluidSource::contribute(Builder& b) const {
    const auto& table = b.species();
    if (params_.X.size() != table.size()) throw ModelError(b.prefix() + ": composition size mismatch");
    FluidPort out = b.port("out", PortDirection::Outlet);
    b.fix("h", out.h, media::enthalpy(params_.T, params_.X, table));
    for (std::size_t i = 0; i < out.X.size(); ++i) b.fix("X[" + table[i].name + "]", out.X[i], params_.X[i]);
    Contribution c;
    c.inputs["w"] = {out.w, params_.w};
    c.ports["out"] = std::move(out);
    return c;
}

Contribution FluidSink::contribute(Builder& b) const {
    if (!(p_ > 0.0)) throw ModelError(b.prefix() + ": sink pressure must be positive");
    FluidPort in = b.port("in", PortDirection::Inlet);
    b.fix("p", in.p, p_);
    Contribution c;
    c.outputs["w"] = in.w;
    c.ports["in"] = std::move(in);
    return c;
}

Contribution PressureLoss::contribute(Builder& b) const {
    params_.validate();
    FluidPort in = b.port("in", PortDirection::Inlet);
    FluidPort out = b.port("out", PortDirection::Outlet);
    b.alias("w", out.w, in.w);
    b.alias("h", out.h, in.h);
    pass_composition(b, in, out);
    detail::loss_equation(b, "dp", in.p, out.p, Inflow{in.w, in.h, in.X}, params_);
    Contribution c;
    c.ports["in"] = std::move(in);
    c.ports["out"] = std::move(out);
    return c;
}

Contribution Decoupler::contribute(Builder& b) const {
    params_.validate();
    const auto& table = b.species();
    if (params_.X_des.size() != table.size()) throw ModelError(b.prefix() + ": design composition size mismatch");
    FluidPort in = b.port("in", PortDirection::Inlet);
    FluidPort out = b.port("out", PortDirection::Outlet);
    b.alias("w", out.w, in.w);
    b.alias("p", out.p, in.p);
    const double h_des = params_.h_des;
    b.equation(
        "h", [=](const EvalContext& c) { return c(out.h) - c.homotopy([&] { return c(in.h); }, h_des); },
        EquationPhase::Both, std::max(std::abs(h_des), 1e5));
    for (std::size_t i = 0; i < out.X.size(); ++i) {
        const double x_des = params_.X_des[i];
        const VarId xi = in.X[i];
        const VarId xo = out.X[i];
        b.equation(
            "X[" + table[i].name + "]",
            [=](const EvalContext& c) { return c(xo) - c.homotopy([&] { return c(xi); }, x_des); });
    }
    Contribution c;
    c.ports["in"] = std::move(in);
    c.ports["out"] = std::move(out);
    return c;
}

Contribution Compressor::contribute(Builder& b) const {
    if (!(params_.beta >= 1.0)) throw ModelError(b.prefix() + ": pressure ratio must be at least 1");
    if (!(params_.eta_is > 0.0 && params_.eta_is <= 1.0)) throw ModelError(b.prefix() + ": eta_is must lie in (0, 1]");
    const auto tbl = b.species_ptr();
    FluidPort in = b.port("in", PortDirection::Inlet);
    FluidPort out = b.port("out", PortDirection::Outlet);
    b.alias("w", out.w, in.w);
    pass_composition(b, in, out);
    const double beta = params_.beta;
    const double eta = params_.eta_is;
    b.equation(
        "pressure_ratio", [=](const EvalContext& c) { return c(out.p) - beta * c(in.p); }, EquationPhase::Both,
        std::max(b.design("out").p, 1e3));
    b.equation(
        "work",
        [=](const EvalContext& c) {
            const auto X = fractions(c, in.X);
            const double h_in = c(in.h);
            const double T_in = media::temperature(h_in, X, *tbl);
            const double h_is = media::enthalpy(media::isentropic_temperature(T_in, 1.0, beta, X, *tbl), X, *tbl);
            return c(out.h) - (h_in + (h_is - h_in) / eta);
        },
        EquationPhase::Both, 1e5);
    const StreamState d = b.design("in");
    const double w_nom = std::max(d.w, 1e-3);
    const VarId P = b.add("power", {.nominal = w_nom * 1e5, .kind = VariableKind::Power, .unit = "W"});
    b.equation(
        "power", [=](const EvalContext& c) { return c(P) - c(in.w) * (c(out.h) - c(in.h)); }, EquationPhase::Both,
        w_nom * 1e5);
    Contribution c;
    c.outputs["power"] = P;
    c.ports["in"] = std::move(in);
    c.ports["out"] = std::move(out);
    return c;
}

Contribution Turbine::contribute(Builder& b) const {
    params_.validate();
    const auto tbl = b.species_ptr();
    FluidPort in = b.port("in", PortDirection::Inlet);
    FluidPort out = b.port("out", PortDirection::Outlet);
    b.alias("w", out.w, in.w);
    pass_composition(b, in, out);
    const TurbineParams tp = params_;
    b.equation(
        "stodola",
        [=](const EvalContext& c) {
            const double w = c.homotopy(
                [&] {
                    const double p_in = c(in.p);
                    const auto X = fractions(c, in.X);
                    const double T_in = media::temperature(c(in.h), X, *tbl);
                    return turbine_flow(p_in, media::density(p_in, T_in, X, *tbl), p_in / c(out.p), tp, 1.0);
                },
                [&] { return tp.w_nom / tp.p_nom * c(in.p); });
            return c(in.w) - w;
        },
        EquationPhase::Both, tp.w_nom);
    b.equation(
        "expansion",
        [=](const EvalContext& c) {
            const auto X = fractions(c, in.X);
            const double h_in = c(in.h);
            const double T_in = media::temperature(h_in, X, *tbl);
            const double T_is = media::isentropic_temperature(T_in, c(in.p), c(out.p), X, *tbl);
            const double h_is = media::enthalpy(T_is, X, *tbl);
            return c(out.h) - (h_in - tp.eta_is * (h_in - h_is));
        },
        EquationPhase::Both, 1e5);
    const StreamState d = b.design("in");
    const VarId P = b.add("power", {.nominal = tp.w_nom * 1e5, .kind = VariableKind::Power, .unit = "W"});
    b.equation(
        "power", [=](const EvalContext& c) { return c(P) - c(in.w) * (c(in.h) - c(out.h)); }, EquationPhase::Both,
        tp.w_nom * 1e5);
    const VarId T_in = b.add("T_in", {.nominal = std::max(d.T, 300.0),
                                      .start = d.T,
                                      .kind = VariableKind::Temperature,
                                      .unit = "K"});
    b.equation(
        "T_in", [=](const EvalContext& c) { return c(T_in) - media::temperature(c(in.h), fractions(c, in.X), *tbl); },
        EquationPhase::Both, 100.0);
    Contribution c;
    c.outputs["power"] = P;
    c.outputs["T_in"] = T_in;
    c.ports["in"] = std::move(in);
    c.ports["out"] = std::move(out);
    return c;
}

double Intercooler::stored_mass(double p, const std::vector<double>& X, const media::SpeciesTable& table) const {
    return params_.volume * media::density(p, params_.T_out, X, table);
}

Contribution Intercooler::contribute(Builder& b) const {
    if (!(params_.volume > 0.0) || !(params_.T_out > 0.0))
        throw ModelError(b.prefix() + ": volume and outlet temperature must be positive");
    const auto tbl = b.species_ptr();
    const StreamState d_in = b.design("in");
    const auto pressure = detail::pressure_state(b, "gas", d_in.p);
    FluidPort in = b.port("in", PortDirection::Inlet);
    FluidPort out = b.port("out", PortDirection::Outlet);
    b.alias("p_in", in.p, pressure.p);
    b.alias("p_out", out.p, pressure.p);
    pass_composition(b, in, out);
    const double wn = std::max(d_in.w, 1e-3);
    const VarId dM = b.add("gas.dM", {.nominal = wn, .kind = VariableKind::Derivative, .unit = "kg/s"});
    b.equation(
        "mass", [=](const EvalContext& c) { return c(dM) - (c(in.w) - c(out.w)); }, EquationPhase::Both, wn,
        tag::ZeroDerivativeAlias{dM, in.w, out.w});
    const double V = params_.volume;
    const double T = params_.T_out;
    b.equation(
        "mass_state",
        [=](const EvalContext& c) {
            const double n = media::specific_moles(fractions(c, out.X), *tbl);
            return c(dM) - V / (media::R * T * n) * c(pressure.dp);
        },
        EquationPhase::Both, wn, tag::DerivativeLinear{dM, {pressure.dp}});
    b.equation(
        "temperature", [=](const EvalContext& c) { return c(out.h) - media::enthalpy(T, fractions(c, out.X), *tbl); },
        EquationPhase::Both, 1e5);
    const VarId Q = b.add("Q", {.nominal = wn * 1e5, .kind = VariableKind::HeatFlow, .unit = "W"});
    b.equation(
        "heat", [=](const EvalContext& c) { return c(Q) - (c(in.w) * c(in.h) - c(out.w) * c(out.h)); },
        EquationPhase::Both, wn * 1e5);
    Contribution c;
    c.outputs["Q"] = Q;
    c.ports["in"] = std::move(in);
    c.ports["out"] = std::move(out);
    return c;
}

Contribution Condenser::contribute(Builder& b) const {
    params_.validate();
    const auto tbl = b.species_ptr();
    const auto& table = *tbl;
    const std::size_t iw = table.index_of("H2O");
    const StreamState d_in = b.design("in");
    const auto pressure = detail::pressure_state(b, "gas", d_in.p);
    FluidPort in = b.port("in", PortDirection::Inlet);
    FluidPort out = b.port("out", PortDirection::Outlet);
    b.alias("p_in", in.p, pressure.p);
    b.alias("p_out", out.p, pressure.p);
    const CondenserParams cp = params_;
    const double wn = std::max(d_in.w, 1e-3);

    const VarId w_liq = b.add("w_liquid", {.nominal = wn * 0.1, .kind = VariableKind::MassFlow, .unit = "kg/s"});
    b.equation(
        "flash",
        [=](const EvalContext& c) {
            const auto s = condenser_split(c(pressure.p), fractions(c, in.X), cp, *tbl);
            return c(w_liq) - c(in.w) * s.liquid_fraction;
        },
        EquationPhase::Both, wn);
    for (std::size_t i = 0; i < in.X.size(); ++i) {
        const VarId xo = out.X[i];
        b.equation("X[" + table[i].name + "]", [=](const EvalContext& c) {
            const auto s = condenser_split(c(pressure.p), fractions(c, in.X), cp, *tbl);
            return c(xo) - s.X_out[i];
        });
    }
    const VarId dM = b.add("gas.dM", {.nominal = wn, .kind = VariableKind::Derivative, .unit = "kg/s"});
    b.equation(
        "mass",
        [=](const EvalContext& c) {
            return c(dM) - (c(in.w) - c(out.w) - c.homotopy([&] { return c(w_liq); }, 0.0));
        },
        EquationPhase::Both, wn);
    const double V = cp.volume;
    const double T = cp.T_out;
    b.equation(
        "mass_state",
        [=](const EvalContext& c) {
            const double n = media::specific_moles(fractions(c, out.X), *tbl);
            return c(dM) - V / (media::R * T * n) * c(pressure.dp);
        },
        EquationPhase::Both, wn, tag::DerivativeLinear{dM, {pressure.dp}});
    b.equation(
        "temperature", [=](const EvalContext& c) { return c(out.h) - media::enthalpy(T, fractions(c, out.X), *tbl); },
        EquationPhase::Both, 1e5);
    const double h_liq = media::species_enthalpy(iw, T, table);
    const VarId Q = b.add("Q", {.nominal = wn * 1e5, .kind = VariableKind::HeatFlow, .unit = "W"});
    b.equation(
        "heat",
        [=](const EvalContext& c) {
            return c(Q) - (c(in.w) * c(in.h) - c(out.w) * c(out.h) - c(w_liq) * h_liq);
        },
        EquationPhase::Both, wn * 1e5);
    Contribution c;
    c.outputs["w_liquid"] = w_liq;
    c.outputs["Q"] = Q;
    c.ports["in"] = std::move(in);
    c.ports["out"] = std::move(out);
    return c;
}

std::vector<PortSpec> Combustor::ports() const {
    std::vector<PortSpec> p;
    for (int k = 1; k <= params_.inlets; ++k) p.push_back({"in" + std::to_string(k), PortDirection::Inlet});
    p.push_back({"out", PortDirection::Outlet});
    return p;
}

Contribution Combustor::contribute(Builder& b) const {
    if (params_.inlets < 1) throw ModelError(b.prefix() + ": needs at least one inlet");
    if (!(params_.volume > 0.0)) throw ModelError(b.prefix() + ": volume must be positive");
    const auto tbl = b.species_ptr();
    const StreamState d = b.design("out");
    const auto pressure = detail::pressure_state(b, "gas", d.p);
    std::vector<FluidPort> inlets;
    Contribution c;
    for (int k = 1; k <= params_.inlets; ++k) {
        const std::string name = "in" + std::to_string(k);
        FluidPort in = b.port(name, PortDirection::Inlet);
        b.alias(name + ".p", in.p, pressure.p);
        inlets.push_back(in);
        c.ports[name] = std::move(in);
    }
    const auto s = detail::volume_state(b, "gas", d.T, d.X, d.w);
    detail::VolumeBalance vb;
    vb.local = "gas";
    vb.volume = params_.volume;
    vb.pressure = pressure;
    vb.w_nominal = std::max(d.w, 1e-3);
    vb.energy_nominal = std::max(d.w * 1e5, 1.0);
    vb.mass = [=](const EvalContext& ctx) {
        double w = 0.0;
        for (const auto& in : inlets) w += ctx(in.w);
        return w;
    };
    vb.species = [=](const EvalContext& ctx) {
        std::vector<double> m(tbl->size(), 0.0);
        for (const auto& in : inlets) {
            const auto X = fractions(ctx, in.X);
            const double w = ctx(in.w);
            for (std::size_t i = 0; i < m.size(); ++i) m[i] += w * X[i];
        }
        return complete_combustion(m, *tbl);
    };
    vb.energy = [=](const EvalContext& ctx) {
        double H = 0.0;
        for (const auto& in : inlets) H += ctx(in.w) * ctx(in.h);
        return H;
    };
    detail::volume_equations(b, vb, s);
    c.outputs["T"] = s.T;
    c.ports["out"] = FluidPort{b.qualify("out"), PortDirection::Outlet, pressure.p, s.w_out, s.h_out, s.X};
    return c;
}

Contribution Mixer::contribute(Builder& b) const {
    const auto& table = b.species();
    FluidPort in1 = b.port("in1", PortDirection::Inlet);
    FluidPort in2 = b.port("in2", PortDirection::Inlet);
    FluidPort out = b.port("out", PortDirection::Outlet);
    b.alias("p1", in1.p, out.p);
    b.alias("p2", in2.p, out.p);
    const double wn = std::max(b.design("out").w, 1e-3);
    b.equation(
        "mass", [=](const EvalContext& c) { return c(out.w) - c(in1.w) - c(in2.w); }, EquationPhase::Both, wn);
    b.equation(
        "energy",
        [=](const EvalContext& c) {
            return c(out.w) * c(out.h) - c(in1.w) * c(in1.h) - c(in2.w) * c(in2.h);
        },
        EquationPhase::Both, wn * std::max(std::abs(design_enthalpy(b, "out")), 1e5));
    for (std::size_t i = 0; i < out.X.size(); ++i) {
        b.equation(
            "X[" + table[i].name + "]",
            [=](const EvalContext& c) {
                return c(out.w) * c(out.X[i]) - c(in1.w) * c(in1.X[i]) - c(in2.w) * c(in2.X[i]);
            },
            EquationPhase::Both, wn);
    }
    Contribution c;
    c.ports["in1"] = std::move(in1);
    c.ports["in2"] = std::move(in2);
    c.ports["out"] = std::move(out);
    return c;
}

Contribution Splitter::contribute(Builder& b) const {
    if (!(fraction_ >= 0.0 && fraction_ <= 1.0)) throw ModelError(b.prefix() + ": split fraction must lie in [0, 1]");
    FluidPort in = b.port("in", PortDirection::Inlet);
    FluidPort out1 = b.port("out1", PortDirection::Outlet);
    FluidPort out2 = b.port("out2", PortDirection::Outlet);
    for (const FluidPort* o : {&out1, &out2}) {
        const std::string tag = o == &out1 ? "1" : "2";
        b.alias("p" + tag, o->p, in.p);
        b.alias("h" + tag, o->h, in.h);
        for (std::size_t i = 0; i < in.X.size(); ++i)
            b.alias("X" + tag + "[" + b.species()[i].name + "]", o->X[i], in.X[i]);
    }
    const double f = fraction_;
    const double wn = std::max(b.design("in").w, 1e-3);
    b.equation(
        "split", [=](const EvalContext& c) { return c(out1.w) - f * c(in.w); }, EquationPhase::Both, wn);
    b.equation(
        "mass", [=](const EvalContext& c) { return c(out2.w) - (c(in.w) - c(out1.w)); }, EquationPhase::Both, wn);
    Contribution c;
    c.ports["in"] = std::move(in);
    c.ports["out1"] = std::move(out1);
    c.ports["out2"] = std::move(out2);
    return c;
}

}  // namespace ssinit

#include <algorithm>
#include <cmath>

#include "ssinit/components.hpp"
#include "volume.hpp"

namespace ssinit {

namespace {

struct SpeciesIndex {
    std::size_t CH4, H2, H2O, CO, CO2, O2;
};

SpeciesIndex index(const media::SpeciesTable& t) {
    return {t.index_of("CH4"), t.index_of("H2"), t.index_of("H2O"),
            t.index_of("CO"),  t.index_of("CO2"), t.index_of("O2")};
}

std::vector<double> stoichiometry(const media::ReactionParams& r, const media::SpeciesTable& t) {
    std::vector<double> nu(t.size(), 0.0);
    for (const auto& [name, coeff] : r.stoichiometry) nu[t.index_of(name)] += coeff;
    return nu;
}

/// Partial pressures in Pa of a channel volume.
std::vector<double> partial_pressures(const EvalContext& c, const std::vector<VarId>& X, VarId p,
                                      const media::SpeciesTable& t) {
    auto Y = media::mole_fractions(fractions(c, X), t);
    const double pv = c(p);
    for (double& y : Y) y *= pv;
    return Y;
}

}  // namespace

void FuelCellParams::validate() const {
    if (volumes < 1) throw ModelError("fuel cell: needs at least one volume");
    if (!(area > 0.0)) throw ModelError("fuel cell: active area must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ModelError("fuel cell: alpha must lie in (0, 1)");
    if (!(a < 0.0)) throw ModelError("fuel cell: simplified polarization slope a must be negative");
    if (!(b > 0.0)) throw ModelError("fuel cell: simplified polarization intercept b must be positive");
    if (!(R_ohm >= 0.0)) throw ModelError("fuel cell: R_ohm must be nonnegative");
    if (!(T_nom > 0.0) || !(pen_capacity > 0.0)) throw ModelError("fuel cell: T_nom and PEN capacity must be positive");
    if (!(anode_electrode.k > 0.0) || !(cathode_electrode.k > 0.0))
        throw ModelError("fuel cell: exchange-current factors must be positive");
    if (!(diffusion_H2 >= 0.0) || !(diffusion_H2O >= 0.0) || !(diffusion_O2 >= 0.0))
        throw ModelError("fuel cell: diffusion lumps must be nonnegative");
    if (!(p_H2_des > 0.0) || !(p_H2O_des > 0.0) || !(p_O2_des > 0.0))
        throw ModelError("fuel cell: design partial pressures must be positive");
    media::validate(reforming);
    media::validate(shift);
}

double FuelCell::frozen_ocp() const {
    return electrochem::open_circuit_potential(params_.T_nom, params_.p_H2_des, params_.p_H2O_des, params_.p_O2_des);
}

double FuelCell::frozen_concentration_loss(double j) const {
    const auto& f = params_;
    const double pa = f.anode.p_nom;
    const double pc = f.cathode.p_nom;
    return electrochem::concentration_loss(
        f.T_nom, f.p_H2_des, f.p_H2O_des, f.p_O2_des,
        electrochem::tpb_pressure(pa, f.p_H2_des, f.T_nom, f.diffusion_H2, j, false),
        electrochem::tpb_pressure(pa, f.p_H2O_des, f.T_nom, f.diffusion_H2O, j, true),
        electrochem::tpb_pressure(pc, f.p_O2_des, f.T_nom, f.diffusion_O2, j, false));
}

Contribution FuelCell::contribute(Builder& b) const {
    params_.validate();
    const auto tbl = b.species_ptr();
    const auto& table = *tbl;
    const SpeciesIndex ix = index(table);
    const FuelCellParams fp = params_;
    const int N = fp.volumes;
    const double A = fp.area;

    FluidPort anode_in = b.port("anode_in", PortDirection::Inlet);
    FluidPort cathode_in = b.port("cathode_in", PortDirection::Inlet);
    const StreamState da_in = b.design("anode_in");
    const StreamState dc_in = b.design("cathode_in");
    const StreamState da_out = b.has_design("anode_out") ? b.design("anode_out") : da_in;
    const StreamState dc_out = b.has_design("cathode_out") ? b.design("cathode_out") : dc_in;
    const auto anode = detail::channel_variables(b, "anode", anode_in, fp.anode, 1, N, da_in, da_out);
    const auto cathode = detail::channel_variables(b, "cathode", cathode_in, fp.cathode, 1, N, dc_in, dc_out);

    const double I_des = fp.j_des * A * N;
    const double E_des = fp.b + fp.a * I_des;
    const VarId I = b.add("I", {.nominal = I_des, .start = I_des, .kind = VariableKind::Current, .unit = "A"});
    const VarId E = b.add("E", {.nominal = 1.0, .start = E_des, .kind = VariableKind::Voltage, .unit = "V"});
    const VarId P = b.add("P", {.nominal = std::max(I_des * E_des, 1.0),
                                .start = I_des * E_des,
                                .kind = VariableKind::Power,
                                .unit = "W"});

    const double M_H2 = table[ix.H2].molar_mass;
    const double M_H2O = table[ix.H2O].molar_mass;
    const double M_O2 = table[ix.O2].molar_mass;
    const auto nu_smr = stoichiometry(fp.reforming, table);
    const auto nu_wgs = stoichiometry(fp.shift, table);
    const double rate_nom = std::max(I_des / (2.0 * media::F) / N, 1e-6);
    const double ocp_frozen = frozen_ocp();

    std::vector<VarId> pen(N), I_k(N), r_smr(N), r_wgs(N);
    std::vector<detail::VolumeSources> anode_src(N), cathode_src(N);
    for (int k = 0; k < N; ++k) {
        const std::string v = "v" + std::to_string(k + 1);
        const double Ta = b.model().variable(anode.cells[k].T).start;
        const double Tc = b.model().variable(cathode.cells[k].T).start;
        VarId dpen;
        std::tie(pen[k], dpen) = detail::state(b, "pen." + v + ".T", {.nominal = std::max(fp.T_nom, 300.0),
                                                                      .start = 0.5 * (Ta + Tc),
                                                                      .min = 150.0,
                                                                      .max = 4000.0,
                                                                      .kind = VariableKind::Temperature,
                                                                      .unit = "K"});
        I_k[k] = b.add("pen." + v + ".I", {.nominal = I_des / N,
                                           .start = I_des / N,
                                           .kind = VariableKind::Current,
                                           .unit = "A"});
        const VarId ocp = b.add("pen." + v + ".E_ocp", {.nominal = 1.0, .start = ocp_frozen,
                                                        .kind = VariableKind::Voltage, .unit = "V"});
        const VarId e_act = b.add("pen." + v + ".e_act", {.nominal = 0.1, .kind = VariableKind::Voltage, .unit = "V"});
        const VarId e_conc = b.add("pen." + v + ".e_conc", {.nominal = 0.1, .kind = VariableKind::Voltage, .unit = "V"});
        r_smr[k] = b.add("anode." + v + ".r_reforming", {.nominal = rate_nom, .unit = "mol/s"});
        r_wgs[k] = b.add("anode." + v + ".r_shift", {.nominal = rate_nom, .unit = "mol/s"});

        const VarId Ik = I_k[k];
        const VarId Tpen = pen[k];
        const auto& ac = anode.cells[k];
        const auto& cc = cathode.cells[k];
        const VarId pa = anode.pressure_of(k).p;
        const VarId pc = cathode.pressure_of(k).p;
        const VarId rs = r_smr[k];
        const VarId rw = r_wgs[k];

        b.equation(
            "pen." + v + ".voltage",
            [=](const EvalContext& c) {
                return c(E) - c.homotopy(
                                  [&] { return c(ocp) - fp.R_ohm * c(Ik) / A - c(e_conc) - c(e_act); },
                                  [&] { return fp.b + fp.a * N * c(Ik); });
            });
        b.equation("pen." + v + ".ocp", [=](const EvalContext& c) {
            return c(ocp) - c.homotopy(
                                [&] {
                                    const auto pp_a = partial_pressures(c, ac.X, pa, *tbl);
                                    const auto pp_c = partial_pressures(c, cc.X, pc, *tbl);
                                    return electrochem::open_circuit_potential(c(Tpen), pp_a[ix.H2], pp_a[ix.H2O],
                                                                               pp_c[ix.O2]);
                                },
                                ocp_frozen);
        });
        b.equation(
            "pen." + v + ".activation",
            [=](const EvalContext& c) {
                const double j = c(Ik) / A;
                const double act = c.homotopy(
                    [&] {
                        const double T = c(Tpen);
                        return electrochem::activation_loss(
                                   j, electrochem::exchange_current(T, fp.anode_electrode.k, fp.anode_electrode.Ea), T,
                                   fp.alpha) +
                               electrochem::activation_loss(
                                   j, electrochem::exchange_current(T, fp.cathode_electrode.k, fp.cathode_electrode.Ea),
                                   T, fp.alpha);
                    },
                    [&] {
                        const double T = fp.T_nom;
                        return electrochem::activation_loss_linear(
                                   j, electrochem::exchange_current(T, fp.anode_electrode.k, fp.anode_electrode.Ea), T,
                                   fp.alpha) +
                               electrochem::activation_loss_linear(
                                   j, electrochem::exchange_current(T, fp.cathode_electrode.k, fp.cathode_electrode.Ea),
                                   T, fp.alpha);
                    });
                return c(e_act) - act;
            },
            EquationPhase::Both, 0.1);
        const FuelCell self(name(), fp);
        b.equation(
            "pen." + v + ".concentration",
            [=](const EvalContext& c) {
                const double j = c(Ik) / A;
                const double conc = c.homotopy(
                    [&] {
                        const double T = c(Tpen);
                        const auto pp_a = partial_pressures(c, ac.X, pa, *tbl);
                        const auto pp_c = partial_pressures(c, cc.X, pc, *tbl);
                        const double p_a = c(pa);
                        const double p_c = c(pc);
                        return electrochem::concentration_loss(
                            T, pp_a[ix.H2], pp_a[ix.H2O], pp_c[ix.O2],
                            electrochem::tpb_pressure(p_a, pp_a[ix.H2], T, fp.diffusion_H2, j, false),
                            electrochem::tpb_pressure(p_a, pp_a[ix.H2O], T, fp.diffusion_H2O, j, true),
                            electrochem::tpb_pressure(p_c, pp_c[ix.O2], T, fp.diffusion_O2, j, false));
                    },
                    [&] { return self.frozen_concentration_loss(j); });
                return c(e_conc) - conc;
            },
            EquationPhase::Both, 0.1);

        const auto rate = [=](const media::ReactionParams& r, bool reforming) {
            return [=](const EvalContext& c) {
                const auto pp = partial_pressures(c, ac.X, pa, *tbl);
                const auto bar = [&](std::size_t i) { return pp[i] / 1e5; };
                const auto evaluate = [&](double T) {
                    return reforming ? electrochem::reaction_rate(r, T, bar(ix.CH4), bar(ix.H2O),
                                                                  bar(ix.CO) * std::pow(bar(ix.H2), 3))
                                     : electrochem::reaction_rate(r, T, bar(ix.CO), bar(ix.H2O),
                                                                  bar(ix.CO2) * bar(ix.H2));
                };
                return c.homotopy([&] { return evaluate(c(ac.T)); }, [&] { return evaluate(fp.T_nom); });
            };
        };
        const VarId rvar_s = rs;
        const VarId rvar_w = rw;
        const auto smr = rate(fp.reforming, true);
        const auto wgs = rate(fp.shift, false);
        b.equation(
            "anode." + v + ".reforming", [=](const EvalContext& c) { return c(rvar_s) - smr(c); },
            EquationPhase::Both, rate_nom);
        b.equation(
            "anode." + v + ".shift", [=](const EvalContext& c) { return c(rvar_w) - wgs(c); }, EquationPhase::Both,
            rate_nom);

        anode_src[k].mass = [=](const EvalContext& c) { return (M_H2O - M_H2) * c(Ik) / (2.0 * media::F); };
        anode_src[k].species = [=](const EvalContext& c, std::vector<double>& m) {
            const double n_el = c(Ik) / (2.0 * media::F);
            const double a = c(rs);
            const double w = c(rw);
            for (std::size_t i = 0; i < m.size(); ++i) m[i] += (*tbl)[i].molar_mass * (nu_smr[i] * a + nu_wgs[i] * w);
            m[ix.H2] -= M_H2 * n_el;
            m[ix.H2O] += M_H2O * n_el;
        };
        anode_src[k].energy = [=](const EvalContext& c, double T) {
            const double n_el = c(Ik) / (2.0 * media::F);
            return n_el * (M_H2O * media::species_enthalpy(ix.H2O, T, *tbl) -
                           M_H2 * media::species_enthalpy(ix.H2, T, *tbl));
        };
        cathode_src[k].mass = [=](const EvalContext& c) { return -M_O2 * c(Ik) / (4.0 * media::F); };
        cathode_src[k].species = [=](const EvalContext& c, std::vector<double>& m) {
            m[ix.O2] -= M_O2 * c(Ik) / (4.0 * media::F);
        };
        cathode_src[k].energy = [=](const EvalContext& c, double T) {
            return -M_O2 * c(Ik) / (4.0 * media::F) * media::species_enthalpy(ix.O2, T, *tbl);
        };

        const VarId Qa = anode.Q[k];
        const VarId Qc = cathode.Q[k];
        const double C = fp.pen_capacity;
        const auto ha = anode_src[k].energy;
        const auto hc = cathode_src[k].energy;
        b.equation(
            "pen." + v + ".energy",
            [=](const EvalContext& c) {
                return C * c(dpen) + c(Qa) + c(Qc) + ha(c, c(ac.T)) + hc(c, c(cc.T)) + c(E) * c(Ik);
            },
            EquationPhase::Both, std::max(I_des / N, 1.0));
    }
    detail::channel_equations(b, anode, pen, anode_src);
    detail::channel_equations(b, cathode, pen, cathode_src);

    b.equation(
        "current",
        [=](const EvalContext& c) {
            double sum = 0.0;
            for (VarId v : I_k) sum += c(v);
            return sum - c(I);
        },
        EquationPhase::Both, I_des);
    b.equation(
        "power", [=](const EvalContext& c) { return c(P) - c(E) * c(I); }, EquationPhase::Both,
        std::max(I_des * E_des, 1.0));

    Contribution c;
    c.inputs["I"] = {I, I_des};
    c.outputs["E"] = E;
    c.outputs["P"] = P;
    c.ports["anode_out"] = anode.outlet(b.qualify("anode_out"));
    c.ports["cathode_out"] = cathode.outlet(b.qualify("cathode_out"));
    c.ports["anode_in"] = std::move(anode_in);
    c.ports["cathode_in"] = std::move(cathode_in);
    return c;
}

}  // namespace ssinit

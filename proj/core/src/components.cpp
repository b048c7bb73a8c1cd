#include "ssinit/components.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ssinit/errors.hpp"

namespace ssinit {

std::vector<double> fractions(const EvalContext& c, const std::vector<VarId>& X) {
    std::vector<double> full(X.size() + 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        full[i] = c(X[i]);
        sum += full[i];
    }
    full.back() = 1.0 - sum;
    return full;
}

Builder::Builder(Model& model, std::shared_ptr<const media::SpeciesTable> species, std::string prefix,
                 std::map<std::string, StreamState> design)
    : model_(model), species_(std::move(species)), prefix_(std::move(prefix)), design_(std::move(design)) {
    if (!species_ || species_->size() < 2) throw ModelError("component '" + prefix_ + "' needs at least two species");
}

std::string Builder::qualify(std::string_view local) const {
    std::string out = prefix_;
    if (!out.empty()) out += '.';
    out += local;
    return out;
}

VarId Builder::add(std::string_view local, VariableDescriptor d) {
    d.name = qualify(local);
    return model_.add_variable(std::move(d));
}

std::size_t Builder::equation(std::string_view local, Residual r, EquationPhase phase, double nominal,
                              StructureTag tag) {
    return model_.add_equation(qualify(local), std::move(r), phase, nominal, std::move(tag));
}

std::size_t Builder::alias(std::string_view local, VarId a, VarId b, EquationPhase phase) {
    return model_.add_alias(qualify(local), a, b, phase);
}

std::size_t Builder::fix(std::string_view local, VarId v, double value, EquationPhase phase) {
    return model_.add_fix(qualify(local), v, value, phase);
}

StreamState Builder::design(const std::string& port) const {
    auto it = design_.find(port);
    StreamState s = it != design_.end() ? it->second : StreamState{};
    if (s.X.size() != species_->size()) {
        s.X.assign(species_->size(), 0.0);
        s.X.back() = 1.0;
    }
    return s;
}

std::vector<VarId> Builder::composition(std::string_view local, const std::vector<double>& start, VariableRole role) {
    std::vector<VarId> X;
    X.reserve(independent());
    for (std::size_t i = 0; i < independent(); ++i) {
        VariableDescriptor d;
        d.nominal = 1.0;
        d.start = std::clamp(start.at(i), 0.0, 1.0);
        d.min = 0.0;
        d.max = 1.0;
        d.role = role;
        d.kind = VariableKind::Composition;
        X.push_back(add(std::string(local) + ".X[" + (*species_)[i].name + "]", std::move(d)));
    }
    return X;
}

FluidPort Builder::port(const std::string& local, PortDirection direction) {
    const StreamState s = design(local);
    FluidPort port;
    port.name = qualify(local);
    port.direction = direction;
    port.p = add(local + ".p", {.nominal = std::max(s.p, 1e3),
                                .start = s.p,
                                .min = 1.0,
                                .kind = VariableKind::Pressure,
                                .unit = "Pa"});
    port.w = add(local + ".w", {.nominal = std::max(std::abs(s.w), 1e-3),
                                .start = std::max(s.w, 0.0),
                                .min = 0.0,
                                .kind = VariableKind::MassFlow,
                                .unit = "kg/s"});
    const double h = media::enthalpy(s.T, s.X, *species_);
    port.h = add(local + ".h", {.nominal = std::max(std::abs(h), 1e5),
                                .start = h,
                                .kind = VariableKind::Enthalpy,
                                .unit = "J/kg"});
    port.X = composition(local, s.X);
    return port;
}

// ---------------------------------------------------------------------------

void TurbineParams::validate() const {
    if (!(K_t > 0.0)) throw ModelError("turbine: K_t must be positive");
    if (!(eta_is > 0.0 && eta_is <= 1.0)) throw ModelError("turbine: eta_is must lie in (0, 1]");
    if (!(w_nom > 0.0) || !(p_nom > 0.0)) throw ModelError("turbine: w_nom and p_nom must be positive");
}

double turbine_flow(double p_in, double rho_in, double beta, const TurbineParams& params, double lambda) {
    if (beta < 1.0) throw DomainError("turbine: pressure ratio below 1 (reverse flow)");
    if (!(p_in > 0.0) || !(rho_in > 0.0)) throw DomainError("turbine: nonpositive inlet pressure or density");
    const double actual = params.K_t * std::sqrt(p_in * rho_in) * std::sqrt(1.0 - 1.0 / (beta * beta));
    const double simplified = params.w_nom / params.p_nom * p_in;
    return homotopy_combine(actual, simplified, lambda);
}

void PressureLossParams::validate() const {
    if (!(dp_nom > 0.0) || !(w_nom > 0.0)) throw ModelError("pressure loss: dp_nom and w_nom must be positive");
    if (!(rho_nom > 0.0)) throw ModelError("pressure loss: rho_nom must be positive");
}

double pressure_loss(double w, double rho, const PressureLossParams& params, double lambda) {
    const double linear = params.dp_nom / params.w_nom * w;
    if (params.law == LossLaw::AlwaysLinear) return linear;
    if (!(rho > 0.0)) throw DomainError("pressure loss: nonpositive density");
    const double r = w / params.w_nom;
    const double quadratic = params.dp_nom * r * std::abs(r) * params.rho_nom / rho;
    return homotopy_combine(quadratic, linear, lambda);
}

double heat_transfer_coefficient(double gamma_nom, double w, double w_nom, double p, double p_nom) {
    if (!(p > 0.0)) throw DomainError("heat transfer: nonpositive pressure");
    return gamma_nom * std::pow(std::abs(w) / w_nom, 0.8) * std::sqrt(p / p_nom);
}

void DecouplerParams::validate() const {
    if (X_des.empty()) throw ModelError("decoupler: empty design composition");
    const double sum = std::accumulate(X_des.begin(), X_des.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-12) throw ModelError("decoupler: design composition does not sum to 1");
}

DecouplerOutlet decoupler_outlet(double h_in, const std::vector<double>& X_in, const DecouplerParams& params,
                                 double lambda) {
    if (X_in.size() != params.X_des.size()) throw DomainError("decoupler: composition size mismatch");
    DecouplerOutlet out{homotopy_combine(h_in, params.h_des, lambda), std::vector<double>(X_in.size())};
    for (std::size_t i = 0; i < X_in.size(); ++i) out.X[i] = homotopy_combine(X_in[i], params.X_des[i], lambda);
    return out;
}

void CondenserParams::validate() const {
    if (!(volume > 0.0)) throw ModelError("condenser: volume must be positive");
    if (!(T_out > 0.0)) throw ModelError("condenser: outlet temperature must be positive");
}

CondenserSplit condenser_split(double p, const std::vector<double>& X_in, const CondenserParams& params,
                               const media::SpeciesTable& table) {
    if (!(p > 0.0)) throw DomainError("condenser: nonpositive pressure");
    const std::size_t iw = table.index_of("H2O");
    const double psat = media::p_sat(params.T_out, params.saturation);
    const double Yv = psat / p;
    const double n_total = media::specific_moles(X_in, table);
    const double n_water = X_in[iw] / table[iw].molar_mass;
    const double n_dry = n_total - n_water;
    CondenserSplit s{1.0, 0.0, X_in};
    if (Yv >= 1.0 || n_water <= Yv * n_total) return s;
    const double n_vapour = Yv / (1.0 - Yv) * n_dry;
    s.liquid_fraction = (n_water - n_vapour) * table[iw].molar_mass;
    s.gas_fraction = 1.0 - s.liquid_fraction;
    for (std::size_t i = 0; i < X_in.size(); ++i) {
        const double m = i == iw ? X_in[i] - s.liquid_fraction : X_in[i];
        s.X_out[i] = m / s.gas_fraction;
    }
    return s;
}

double condenser_gas_flow(double w_in, double liquid_fraction, double lambda) {
    return w_in - homotopy_combine(w_in * liquid_fraction, 0.0, lambda);
}

std::vector<double> complete_combustion(const std::vector<double>& flows, const media::SpeciesTable& table) {
    if (flows.size() != table.size()) throw DomainError("combustion: species vector size mismatch");
    std::vector<double> n(flows.size());
    for (std::size_t i = 0; i < flows.size(); ++i) n[i] = flows[i] / table[i].molar_mass;
    const auto at = [&](std::string_view s) -> std::optional<std::size_t> {
        if (!table.contains(s)) return std::nullopt;
        return table.index_of(s);
    };
    const auto o2 = at("O2");
    const auto h2o = at("H2O");
    const auto co2 = at("CO2");
    double o2_demand = 0.0;
    const auto burn = [&](std::string_view fuel, double o2_per, double co2_per, double h2o_per) {
        const auto f = at(fuel);
        if (!f || n[*f] == 0.0) return;
        if ((co2_per > 0.0 && !co2) || (h2o_per > 0.0 && !h2o) || !o2)
            throw ModelError("combustion: species table lacks products of " + std::string(fuel));
        const double nf = n[*f];
        n[*f] = 0.0;
        o2_demand += o2_per * nf;
        if (co2_per > 0.0) n[*co2] += co2_per * nf;
        if (h2o_per > 0.0) n[*h2o] += h2o_per * nf;
    };
    burn("CH4", 2.0, 1.0, 2.0);
    burn("H2", 0.5, 0.0, 1.0);
    burn("CO", 0.5, 1.0, 0.0);
    if (o2_demand > 0.0) {
        if (n[*o2] < o2_demand) throw ModelError("combustion: sub-stoichiometric oxygen");
        n[*o2] -= o2_demand;
    }
    std::vector<double> out(flows.size());
    for (std::size_t i = 0; i < flows.size(); ++i) out[i] = n[i] * table[i].molar_mass;
    return out;
}

std::array<double, 4> atom_flows(const std::vector<double>& flows, const media::SpeciesTable& table) {
    std::array<double, 4> atoms{};
    for (std::size_t i = 0; i < flows.size(); ++i) {
        const double n = flows[i] / table[i].molar_mass;
        for (std::size_t a = 0; a < 4; ++a) atoms[a] += n * table[i].atoms[a];
    }
    return atoms;
}

// ---------------------------------------------------------------------------

namespace electrochem {

double open_circuit_potential(double T, double p_H2, double p_H2O, double p_O2) {
    if (!(p_H2 > 0.0) || !(p_H2O > 0.0) || !(p_O2 > 0.0))
        throw DomainError("open-circuit potential: nonpositive partial pressure");
    const double dg = media::reaction_gibbs(media::hydrogen_oxidation(), T);
    const double nF = electrons * media::F;
    return -dg / nF - media::R * T / nF * std::log(p_H2O / (p_H2 * std::sqrt(p_O2 / media::p_ref)));
}

double exchange_current(double T_pen, double k, double Ea) {
    return media::R * T_pen / (electrons * media::F) * k * std::exp(-Ea / (media::R * T_pen));
}

double activation_loss(double j, double j0, double T, double alpha) {
    return media::R * T / (alpha * electrons * media::F) * std::asinh(j / (2.0 * j0));
}

double activation_loss_linear(double j, double j0, double T_nom, double alpha) {
    return media::R * T_nom / (alpha * electrons * media::F) * j / (2.0 * j0);
}

double butler_volmer(double e_act, double j0, double T_pen, double alpha) {
    const double f = electrons * media::F / (media::R * T_pen);
    return j0 * (std::exp(alpha * f * e_act) - std::exp(-(1.0 - alpha) * f * e_act));
}

double tpb_pressure(double p, double p_i, double T, double diffusion, double j, bool product) {
    const double c = media::R * T * diffusion / (4.0 * media::F) * j;
    return p - (p - p_i) * std::exp(product ? -c : c);
}

double concentration_loss(double T, double p_H2, double p_H2O, double p_O2, double p_H2_tpb, double p_H2O_tpb,
                          double p_O2_tpb) {
    if (!(p_H2_tpb > 0.0)) throw DomainError("nonpositive TPB pressure of H2");
    if (!(p_H2O_tpb > 0.0)) throw DomainError("nonpositive TPB pressure of H2O");
    if (!(p_O2_tpb > 0.0)) throw DomainError("nonpositive TPB pressure of O2");
    if (!(p_H2 > 0.0) || !(p_H2O > 0.0) || !(p_O2 > 0.0))
        throw DomainError("concentration loss: nonpositive channel partial pressure");
    const double nF = electrons * media::F;
    return media::R * T / nF * (std::log(p_H2O_tpb / p_H2O * p_H2 / p_H2_tpb) + 0.5 * std::log(p_O2 / p_O2_tpb));
}

double reaction_rate(const media::ReactionParams& r, double T, double p1, double p2, double products) {
    return r.k0 * std::exp(-r.Ea / (media::R * T)) * (p1 * p2 - products / media::equilibrium_constant(r, T));
}

}  // namespace electrochem

}  // namespace ssinit

#include "ssinit/media.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "ssinit/errors.hpp"

namespace ssinit::media {

namespace {

constexpr std::array<double, 4> atomic_mass{0.012011, 0.001008, 0.015999, 0.014007};

// Molar data: cp J/(mol K), hf J/mol, s J/(mol K); molar mass from the atom counts.
SpeciesData molar(std::string name, double cp, double hf, double s, std::array<int, 4> atoms) {
    double M = 0.0;
    for (std::size_t a = 0; a < 4; ++a) M += atoms[a] * atomic_mass[a];
    return SpeciesData{std::move(name), M, cp / M, hf / M, s / M, atoms};
}

const std::vector<SpeciesData>& builtin_species() {
    static const std::vector<SpeciesData> data{
        molar("CH4", 55.0, -74870.0, 186.25, {1, 4, 0, 0}),
        molar("H2", 29.5, 0.0, 130.68, {0, 2, 0, 0}),
        molar("H2O", 37.0, -241826.0, 188.84, {0, 2, 1, 0}),
        molar("CO", 31.0, -110530.0, 197.66, {1, 0, 1, 0}),
        molar("CO2", 50.0, -393520.0, 213.79, {1, 0, 2, 0}),
        molar("O2", 32.5, 0.0, 205.15, {0, 0, 2, 0}),
        molar("N2", 31.0, 0.0, 191.61, {0, 0, 0, 2}),
    };
    return data;
}

void check_fractions(std::span<const double> X, const SpeciesTable& table) {
    if (X.size() != table.size()) {
        throw DomainError("mass-fraction vector has " + std::to_string(X.size()) + " entries, species table has " +
                          std::to_string(table.size()));
    }
}

}  // namespace

void validate(const SpeciesData& s) {
    if (!(s.molar_mass > 0.0)) throw ModelError("species " + s.name + ": molar mass must be positive");
    if (!(s.cp > 0.0)) throw ModelError("species " + s.name + ": cp must be positive");
}

SpeciesTable::SpeciesTable(std::vector<SpeciesData> species) : species_(std::move(species)) {
    for (const auto& s : species_) validate(s);
}

SpeciesTable SpeciesTable::standard() { return SpeciesTable(builtin_species()); }

const SpeciesData& SpeciesTable::builtin(std::string_view name) {
    for (const auto& s : builtin_species()) {
        if (s.name == name) return s;
    }
    throw ModelError("unknown species " + std::string(name));
}

std::size_t SpeciesTable::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < species_.size(); ++i) {
        if (species_[i].name == name) return i;
    }
    throw ModelError("species " + std::string(name) + " not in table");
}

bool SpeciesTable::contains(std::string_view name) const noexcept {
    for (const auto& s : species_) {
        if (s.name == name) return true;
    }
    return false;
}

void validate(const MixtureState& state, const SpeciesTable& table) {
    if (!(state.p > 0.0)) throw DomainError("pressure must be positive");
    if (!(state.T > 0.0)) throw DomainError("temperature must be positive");
    check_fractions(state.X, table);
    double sum = 0.0;
    for (double x : state.X) {
        if (x < 0.0) throw DomainError("negative mass fraction");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        std::ostringstream os;
        os.precision(17);
        os << "mass fractions sum to " << sum;
        throw DomainError(os.str());
    }
}

double specific_moles(std::span<const double> X, const SpeciesTable& table) {
    check_fractions(X, table);
    double n = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) n += X[i] / table[i].molar_mass;
    return n;
}

double molar_mass(std::span<const double> X, const SpeciesTable& table) { return 1.0 / specific_moles(X, table); }

double cp_mix(std::span<const double> X, const SpeciesTable& table) {
    check_fractions(X, table);
    double cp = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) cp += X[i] * table[i].cp;
    return cp;
}

double species_enthalpy(std::size_t i, double T, const SpeciesTable& table) {
    return table[i].h_formation + table[i].cp * (T - T_ref);
}

double enthalpy(double T, std::span<const double> X, const SpeciesTable& table) {
    check_fractions(X, table);
    double h = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) h += X[i] * species_enthalpy(i, T, table);
    return h;
}

double temperature(double h, std::span<const double> X, const SpeciesTable& table) {
    check_fractions(X, table);
    double hf = 0.0;
    double cp = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        hf += X[i] * table[i].h_formation;
        cp += X[i] * table[i].cp;
    }
    if (!(cp > 0.0)) throw DomainError("mixture heat capacity must be positive");
    return T_ref + (h - hf) / cp;
}

double density(double p, double T, std::span<const double> X, const SpeciesTable& table) {
    if (!(p > 0.0)) throw DomainError("pressure must be positive");
    if (!(T > 0.0)) throw DomainError("temperature must be positive");
    return p / (R * T * specific_moles(X, table));
}

double entropy(double p, double T, std::span<const double> X, const SpeciesTable& table) {
    if (!(p > 0.0)) throw DomainError("pressure must be positive");
    if (!(T > 0.0)) throw DomainError("temperature must be positive");
    const double n = specific_moles(X, table);
    double s = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        if (X[i] <= 0.0) continue;
        const double ni = X[i] / table[i].molar_mass;
        const double pi = p * ni / n;
        s += X[i] * (table[i].s_ref + table[i].cp * std::log(T / T_ref)) - R * ni * std::log(pi / p_ref);
    }
    return s;
}

std::vector<double> mole_fractions(std::span<const double> X, const SpeciesTable& table) {
    const double n = specific_moles(X, table);
    std::vector<double> Y(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) Y[i] = X[i] / table[i].molar_mass / n;
    return Y;
}

std::vector<double> mass_fractions(std::span<const double> Y, const SpeciesTable& table) {
    check_fractions(Y, table);
    double m = 0.0;
    for (std::size_t i = 0; i < Y.size(); ++i) m += Y[i] * table[i].molar_mass;
    std::vector<double> X(Y.size());
    for (std::size_t i = 0; i < Y.size(); ++i) X[i] = Y[i] * table[i].molar_mass / m;
    return X;
}

double isentropic_temperature(double T_in, double p_in, double p_out, std::span<const double> X,
                              const SpeciesTable& table) {
    if (!(p_in > 0.0) || !(p_out > 0.0)) throw DomainError("pressure must be positive");
    if (!(T_in > 0.0)) throw DomainError("temperature must be positive");
    const double r = R * specific_moles(X, table);
    return T_in * std::pow(p_out / p_in, r / cp_mix(X, table));
}

PropertyRecord properties(const MixtureState& state, const SpeciesTable& table) {
    validate(state, table);
    const double n = specific_moles(state.X, table);
    PropertyRecord rec;
    rec.v = R * state.T * n / state.p;
    rec.rho = 1.0 / rec.v;
    rec.h = enthalpy(state.T, state.X, table);
    rec.u = rec.h - state.p * rec.v;
    rec.dv_dT = R * n / state.p;
    rec.dv_dp = -rec.v / state.p;
    rec.du_dT = cp_mix(state.X, table) - R * n;
    rec.du_dp = 0.0;
    rec.dv_dX.resize(table.size());
    rec.du_dX.resize(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
        const double rt_m = R * state.T / table[i].molar_mass;
        rec.dv_dX[i] = rt_m / state.p;
        rec.du_dX[i] = species_enthalpy(i, state.T, table) - rt_m;
    }
    return rec;
}

SaturationCurve SaturationCurve::water() {
    return SaturationCurve{{3.352596727949969e-07, -4.892615407143734e-04, 2.6077468468590614e-01,
                            -3.507269375683037e+01},
                           273.0,
                           500.0};
}

double p_sat(double T, const SaturationCurve& curve) {
    if (!(T >= curve.T_min && T <= curve.T_max)) {
        std::ostringstream os;
        os << "saturation temperature " << T << " K outside fitted range [" << curve.T_min << ", " << curve.T_max
           << "]";
        throw DomainError(os.str());
    }
    return std::exp(horner_eval(curve.a, T));
}

void validate(const ReactionParams& r) {
    if (!(r.k0 > 0.0)) throw ModelError("reaction " + r.name + ": k0 must be positive");
}

double equilibrium_constant(const ReactionParams& reaction, double T) {
    if (!(T > 0.0)) throw DomainError("temperature must be positive");
    const double k_ref = std::exp(-reaction.dG / (R * T_ref));
    return k_ref * std::exp(-reaction.dH / R * (1.0 / T - 1.0 / T_ref));
}

double reaction_gibbs(const ReactionParams& reaction, double T) {
    return reaction.dH + (reaction.dG - reaction.dH) * T / T_ref;
}

ReactionParams steam_reforming() {
    return ReactionParams{"SMR", {{"CH4", -1.0}, {"H2O", -1.0}, {"CO", 1.0}, {"H2", 3.0}}, 1.0, 82000.0, 206166.0,
                          142100.0};
}

ReactionParams water_gas_shift() {
    return ReactionParams{"WGS", {{"CO", -1.0}, {"H2O", -1.0}, {"CO2", 1.0}, {"H2", 1.0}}, 1.0, 70000.0, -41164.0,
                          -28618.0};
}

ReactionParams hydrogen_oxidation() {
    return ReactionParams{"HOR", {{"H2", -1.0}, {"O2", -0.5}, {"H2O", 1.0}}, 1.0, 0.0, -241826.0, -228572.0};
}

}  // namespace ssinit::media

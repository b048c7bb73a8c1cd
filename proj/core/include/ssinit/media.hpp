#pragma once

// Ideal-gas mixture properties with constant per-species heat capacity,
// water saturation pressure polynomial and reaction thermochemistry.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ssinit::media {

inline constexpr double R = 8.314462618;
inline constexpr double F = 96485.33212;
inline constexpr double T_ref = 298.15;
inline constexpr double p_ref = 1.0e5;

struct SpeciesData {
    std::string name;
    /// kg/mol
    double molar_mass = 0.0;
    /// J/(kg K)
    double cp = 0.0;
    /// J/kg at T_ref
    double h_formation = 0.0;
    /// J/(kg K) at T_ref, p_ref
    double s_ref = 0.0;
    /// Atoms per molecule: C, H, O, N.
    std::array<int, 4> atoms{};
};

/// Throws ModelError on nonpositive molar mass or cp.
void validate(const SpeciesData& s);

class SpeciesTable {
public:
    SpeciesTable() = default;
    explicit SpeciesTable(std::vector<SpeciesData> species);

    /// CH4, H2, H2O, CO, CO2, O2, N2.
    static SpeciesTable standard();
    static const SpeciesData& builtin(std::string_view name);

    std::size_t size() const noexcept { return species_.size(); }
    const SpeciesData& operator[](std::size_t i) const { return species_[i]; }
    const std::vector<SpeciesData>& species() const noexcept { return species_; }
    /// Index of the named species; throws ModelError when absent.
    std::size_t index_of(std::string_view name) const;
    bool contains(std::string_view name) const noexcept;

private:
    std::vector<SpeciesData> species_;
};

struct MixtureState {
    double p = p_ref;
    double T = T_ref;
    std::vector<double> X;
};

struct PropertyRecord {
    double rho = 0.0;
    double h = 0.0;
    double u = 0.0;
    double v = 0.0;
    double dv_dT = 0.0;
    double dv_dp = 0.0;
    std::vector<double> dv_dX;
    double du_dT = 0.0;
    double du_dp = 0.0;
    std::vector<double> du_dX;
};

/// Throws DomainError for nonpositive p or T, negative fractions or a sum away from 1.
void validate(const MixtureState& state, const SpeciesTable& table);

/// Partials with respect to X treat every mass fraction as independent.
PropertyRecord properties(const MixtureState& state, const SpeciesTable& table);

/// Sum X_i / M_i in mol/kg.
double specific_moles(std::span<const double> X, const SpeciesTable& table);
double molar_mass(std::span<const double> X, const SpeciesTable& table);
double cp_mix(std::span<const double> X, const SpeciesTable& table);
double enthalpy(double T, std::span<const double> X, const SpeciesTable& table);
double species_enthalpy(std::size_t i, double T, const SpeciesTable& table);
/// Inverse of enthalpy() in T.
double temperature(double h, std::span<const double> X, const SpeciesTable& table);
double density(double p, double T, std::span<const double> X, const SpeciesTable& table);
/// Mixture entropy in J/(kg K), ideal mixing included.
double entropy(double p, double T, std::span<const double> X, const SpeciesTable& table);
std::vector<double> mole_fractions(std::span<const double> X, const SpeciesTable& table);
std::vector<double> mass_fractions(std::span<const double> Y, const SpeciesTable& table);
/// Temperature after isentropic expansion or compression to p_out.
double isentropic_temperature(double T_in, double p_in, double p_out, std::span<const double> X,
                              const SpeciesTable& table);

/// a4 + T (a3 + T (a2 + T a1)).
constexpr double horner_eval(const std::array<double, 4>& a, double T) noexcept {
    return a[3] + T * (a[2] + T * (a[1] + T * a[0]));
}

struct SaturationCurve {
    /// a1..a4 of ln p_sat [Pa] as a cubic in T [K].
    std::array<double, 4> a{};
    double T_min = 273.0;
    double T_max = 500.0;

    /// Least-squares fit of ln p_sat to steam-table data on 300-450 K.
    static SaturationCurve water();
};

/// exp(horner_eval(a, T)); throws DomainError when T lies outside the fitted range.
double p_sat(double T, const SaturationCurve& curve);

struct ReactionParams {
    std::string name;
    /// (species name, stoichiometric coefficient); products positive.
    std::vector<std::pair<std::string, double>> stoichiometry;
    /// mol/(s bar^2), lumped over the catalyst of one volume
    double k0 = 1.0;
    /// J/mol
    double Ea = 0.0;
    /// J/mol at T_ref
    double dH = 0.0;
    /// J/mol at T_ref
    double dG = 0.0;
};

void validate(const ReactionParams& r);

/// Van 't Hoff with constant reaction enthalpy, referenced to exp(-dG/(R T_ref)).
double equilibrium_constant(const ReactionParams& reaction, double T);

/// Gibbs energy change at T consistent with equilibrium_constant.
double reaction_gibbs(const ReactionParams& reaction, double T);

ReactionParams steam_reforming();
ReactionParams water_gas_shift();
ReactionParams hydrogen_oxidation();

}  // namespace ssinit::media

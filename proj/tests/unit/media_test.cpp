#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ssinit/errors.hpp"
#include "ssinit/media.hpp"

using namespace ssinit;
using namespace ssinit::media;

namespace {

// IAPWS-IF97 saturation-pressure equation, Pa.
double if97_psat(double T) {
    constexpr double n[] = {0.0,
                            0.11670521452767e4,
                            -0.72421316703206e6,
                            -0.17073846940092e2,
                            0.12020824702470e5,
                            -0.32325550322333e7,
                            0.14915108613530e2,
                            -0.48232657361591e4,
                            0.40511340542057e6,
                            -0.23855557567849,
                            0.65017534844798e3};
    const double th = T + n[9] / (T - n[10]);
    const double A = th * th + n[1] * th + n[2];
    const double B = n[3] * th * th + n[4] * th + n[5];
    const double C = n[6] * th * th + n[7] * th + n[8];
    return std::pow(2.0 * C / (-B + std::sqrt(B * B - 4.0 * A * C)), 4) * 1e6;
}

std::vector<double> random_fractions(std::mt19937& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.01, 1.0);
    std::vector<double> X(n);
    double s = 0.0;
    for (auto& x : X) s += (x = u(rng));
    for (auto& x : X) x /= s;
    double rest = 1.0;
    for (std::size_t i = 0; i + 1 < n; ++i) rest -= X[i];
    X.back() = rest;
    return X;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(Media, OracleReproducesIf97Verification) {
    EXPECT_NEAR(if97_psat(300.0), 0.353658941e-2 * 1e6, 1e-3);
    EXPECT_NEAR(if97_psat(500.0), 0.263889776e1 * 1e6, 1.0);
}

TEST(Media, SpeciesTableLookup) {
    const SpeciesTable t = SpeciesTable::standard();
    EXPECT_EQ(t.size(), 7u);
    EXPECT_EQ(t.index_of("H2O"), 2u);
    EXPECT_TRUE(t.contains("N2"));
    EXPECT_THROW(t.index_of("Ar"), ModelError);
    EXPECT_THROW(SpeciesTable({SpeciesData{"bad", 0.0, 1.0, 0.0, 0.0, {}}}), ModelError);
}

TEST(Media, PureSpeciesDensityInverse) {
    const SpeciesTable t = SpeciesTable::standard();
    for (std::size_t i = 0; i < t.size(); ++i) {
        std::vector<double> X(t.size(), 0.0);
        X[i] = 1.0;
        const auto r = properties({2e5, 800.0, X}, t);
        EXPECT_EQ(r.rho * r.v, 1.0) << t[i].name;
    }
}

TEST(Media, EnthalpyMinusInternalEnergyIsPv) {
    const SpeciesTable t = SpeciesTable::standard();
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> up(1e4, 5e6), uT(250.0, 1500.0);
    for (int k = 0; k < 200; ++k) {
        const MixtureState s{up(rng), uT(rng), random_fractions(rng, t.size())};
        const auto r = properties(s, t);
        EXPECT_LE(std::abs(r.h - r.u - s.p * r.v), 1e-9 * std::max(std::abs(r.h), s.p * r.v));
    }
}

TEST(Media, PartialsMatchCentralDifferences) {
    const SpeciesTable t = SpeciesTable::standard();
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> up(1e4, 5e6), uT(250.0, 1500.0);
    for (int k = 0; k < 100; ++k) {
        MixtureState s{up(rng), uT(rng), random_fractions(rng, t.size())};
        const auto r = properties(s, t);
        auto v_of = [&](const MixtureState& q) {
            return R * q.T * specific_moles(q.X, t) / q.p;
        };
        auto u_of = [&](const MixtureState& q) {
            return enthalpy(q.T, q.X, t) - q.p * v_of(q);
        };
        const double hT = 1e-4 * s.T;
        MixtureState a = s, b = s;
        a.T += hT;
        b.T -= hT;
        EXPECT_LE(rel(r.dv_dT, (properties(a, t).v - properties(b, t).v) / (2 * hT)), 1e-6);
        EXPECT_LE(rel(r.du_dT, (properties(a, t).u - properties(b, t).u) / (2 * hT)), 1e-6);
        const double hp = 1e-4 * s.p;
        a = s;
        b = s;
        a.p += hp;
        b.p -= hp;
        EXPECT_LE(rel(r.dv_dp, (properties(a, t).v - properties(b, t).v) / (2 * hp)), 1e-6);
        EXPECT_LE(std::abs(properties(a, t).u - properties(b, t).u), 1e-9 * std::abs(r.u) + 1e-6);
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double hx = 1e-6;
            a = s;
            b = s;
            a.X[i] += hx;
            b.X[i] -= hx;
            EXPECT_LE(rel(r.dv_dX[i], (v_of(a) - v_of(b)) / (2 * hx)), 1e-6);
            EXPECT_LE(std::abs(r.du_dX[i] - (u_of(a) - u_of(b)) / (2 * hx)), 1e-6 * std::abs(r.u) + 1e-3);
        }
        double sum = 0.0;
        for (double x : s.X) sum += x;
        EXPECT_NEAR(sum, 1.0, 1e-12);
    }
}

TEST(Media, DomainErrors) {
    const SpeciesTable t = SpeciesTable::standard();
    std::vector<double> X(t.size(), 0.0);
    X[6] = 1.0;
    EXPECT_THROW(properties({0.0, 300.0, X}, t), DomainError);
    EXPECT_THROW(properties({1e5, -1.0, X}, t), DomainError);
    X[0] = 0.1;
    EXPECT_THROW(properties({1e5, 300.0, X}, t), DomainError);
}

TEST(Media, TemperatureInvertsEnthalpy) {
    const SpeciesTable t = SpeciesTable::standard();
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> uT(250.0, 1500.0);
    for (int k = 0; k < 100; ++k) {
        const auto X = random_fractions(rng, t.size());
        const double T = uT(rng);
        EXPECT_NEAR(temperature(enthalpy(T, X, t), X, t), T, 1e-8);
    }
}

TEST(Media, IsentropicTemperatureKeepsEntropy) {
    const SpeciesTable t = SpeciesTable::standard();
    std::mt19937 rng(11);
    for (int k = 0; k < 50; ++k) {
        const auto X = random_fractions(rng, t.size());
        const double Ts = isentropic_temperature(1200.0, 20e5, 1.1e5, X, t);
        EXPECT_LT(Ts, 1200.0);
        EXPECT_NEAR(entropy(1.1e5, Ts, X, t), entropy(20e5, 1200.0, X, t), 1e-8);
    }
}

TEST(Horner, ConstantAndCubic) {
    EXPECT_EQ(horner_eval({0, 0, 0, 7}, 300.0), 7.0);
    EXPECT_EQ(horner_eval({1, 0, 0, 0}, 2.0), 8.0);
}

TEST(Horner, MatchesNaiveEvaluation) {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> ua(-1e3, 1e3), uT(0.0, 1e3);
    for (int k = 0; k < 10000; ++k) {
        const std::array<double, 4> a{ua(rng), ua(rng), ua(rng), ua(rng)};
        const double T = uT(rng);
        const double naive = a[0] * std::pow(T, 3) + a[1] * std::pow(T, 2) + a[2] * T + a[3];
        const double scale = std::abs(a[0] * std::pow(T, 3)) + std::abs(a[1] * T * T) + std::abs(a[2] * T) +
                             std::abs(a[3]);
        EXPECT_LE(std::abs(horner_eval(a, T) - naive), 1e-12 * scale);
    }
}

TEST(SaturationPressure, ConstantPolynomial) {
    const SaturationCurve c{{0, 0, 0, std::log(101325.0)}, 273.0, 500.0};
    for (double T : {273.0, 350.0, 500.0}) EXPECT_NEAR(p_sat(T, c), 101325.0, 1e-8);
}

TEST(SaturationPressure, RangeCheck) {
    const auto c = SaturationCurve::water();
    EXPECT_THROW(p_sat(272.0, c), DomainError);
    EXPECT_THROW(p_sat(501.0, c), DomainError);
}

TEST(SaturationPressure, MonotoneOverFittedRange) {
    const auto c = SaturationCurve::water();
    for (double T = c.T_min; T + 1.0 <= c.T_max; T += 1.0) EXPECT_GT(p_sat(T + 1.0, c), p_sat(T, c)) << T;
}

TEST(SaturationPressure, WithinOnePercentOfSteamTables) {
    const auto c = SaturationCurve::water();
    double worst = 0.0;
    for (double T = 300.0; T <= 450.0; T += 0.5) worst = std::max(worst, rel(p_sat(T, c), if97_psat(T)));
    EXPECT_LE(worst, 0.01);
}

TEST(Equilibrium, ReferenceValue) {
    for (const auto& r : {steam_reforming(), water_gas_shift(), hydrogen_oxidation()}) {
        EXPECT_LE(rel(equilibrium_constant(r, T_ref), std::exp(-r.dG / (R * T_ref))), 1e-14);
    }
}

TEST(Equilibrium, ZeroEnthalpyIsConstant) {
    ReactionParams r = water_gas_shift();
    r.dH = 0.0;
    const double k = equilibrium_constant(r, T_ref);
    for (double T : {400.0, 800.0, 1200.0}) EXPECT_LE(rel(equilibrium_constant(r, T), k), 1e-14);
}

TEST(Equilibrium, ExothermicDecreasesEndothermicIncreases) {
    for (double T = 300.0; T < 1500.0; T += 10.0) {
        EXPECT_LT(equilibrium_constant(water_gas_shift(), T + 10.0), equilibrium_constant(water_gas_shift(), T));
        EXPECT_GT(equilibrium_constant(steam_reforming(), T + 10.0), equilibrium_constant(steam_reforming(), T));
    }
}

TEST(Equilibrium, GibbsConsistentWithConstant) {
    const auto r = hydrogen_oxidation();
    for (double T : {600.0, 1000.0}) {
        EXPECT_LE(rel(std::exp(-reaction_gibbs(r, T) / (R * T)), equilibrium_constant(r, T)), 1e-12);
    }
}

TEST(Equilibrium, ReactionEnthalpiesAgreeWithFormationData) {
    const SpeciesTable t = SpeciesTable::standard();
    for (const auto& r : {steam_reforming(), water_gas_shift(), hydrogen_oxidation()}) {
        double dh = 0.0;
        for (const auto& [name, nu] : r.stoichiometry) {
            const auto& s = t[t.index_of(name)];
            dh += nu * s.h_formation * s.molar_mass;
        }
        EXPECT_NEAR(dh, r.dH, 1.0) << r.name;
    }
}

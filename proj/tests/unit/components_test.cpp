#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "ssinit/components.hpp"

using namespace ssinit;
namespace ec = ssinit::electrochem;

namespace {

const media::SpeciesTable& table() {
    static const media::SpeciesTable t = media::SpeciesTable::standard();
    return t;
}

std::vector<double> mix(std::initializer_list<std::pair<const char*, double>> parts) {
    std::vector<double> X(table().size(), 0.0);
    for (const auto& [name, x] : parts) X[table().index_of(name)] = x;
    return X;
}

template <class F>
double bisect(F f, double lo, double hi, int iterations = 200) {
    double flo = f(lo);
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST(TurbineFlow, Examples) {
    TurbineParams p{.K_t = 2.0, .eta_is = 0.9, .w_nom = 3.0, .p_nom = 8.0};
    EXPECT_NEAR(turbine_flow(8.0, 2.0, 2.0, p, 1.0), 6.928203230275509, 1e-12);
    EXPECT_EQ(turbine_flow(8.0, 2.0, 1.0, p, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(turbine_flow(8.0, 5.0, 3.0, p, 0.0), 3.0);
    EXPECT_THROW(turbine_flow(8.0, 2.0, 0.5, p, 1.0), DomainError);
    p.K_t = 0.0;
    EXPECT_THROW(p.validate(), ModelError);
}

TEST(PressureLoss, Examples) {
    const PressureLossParams p{.dp_nom = 2e4, .w_nom = 4.0, .rho_nom = 1.5};
    for (double lambda : {0.0, 0.3, 1.0}) EXPECT_DOUBLE_EQ(pressure_loss(4.0, 1.5, p, lambda), 2e4);
    EXPECT_DOUBLE_EQ(pressure_loss(2.0, 1.5, p, 0.0), 1e4);
    EXPECT_DOUBLE_EQ(pressure_loss(2.0, 1.5, p, 1.0), 5e3);
    EXPECT_DOUBLE_EQ(pressure_loss(-2.0, 1.5, p, 1.0), -5e3);
    PressureLossParams lin = p;
    lin.law = LossLaw::AlwaysLinear;
    EXPECT_DOUBLE_EQ(pressure_loss(2.0, 0.7, lin, 1.0), 1e4);
}

TEST(HeatTransfer, Scaling) {
    EXPECT_DOUBLE_EQ(heat_transfer_coefficient(80.0, 2.0, 2.0, 3e5, 3e5), 80.0);
    EXPECT_NEAR(heat_transfer_coefficient(1.0, 1.0, 2.0, 3e5, 3e5), 0.5743491774985174, 1e-12);
    EXPECT_NEAR(heat_transfer_coefficient(1.0, 2.0, 2.0, 12e5, 3e5), 2.0, 1e-12);
}

TEST(Decoupler, Endpoints) {
    const DecouplerParams d{.h_des = 5e5, .X_des = mix({{"CO2", 0.6}, {"N2", 0.4}})};
    const auto X_in = mix({{"O2", 0.3}, {"N2", 0.7}});
    const auto at0 = decoupler_outlet(-1e5, X_in, d, 0.0);
    EXPECT_EQ(at0.h, 5e5);
    EXPECT_EQ(at0.X, d.X_des);
    const auto at1 = decoupler_outlet(-1e5, X_in, d, 1.0);
    EXPECT_EQ(at1.h, -1e5);
    EXPECT_EQ(at1.X, X_in);
    EXPECT_EQ(decoupler_outlet(5e5, X_in, d, 0.5).h, 5e5);
    EXPECT_THROW(DecouplerParams{.X_des = mix({{"N2", 0.9}})}.validate(), ModelError);
}

TEST(Condenser, DryInletPassesThrough) {
    const CondenserParams c;
    const auto X = mix({{"CO2", 0.9}, {"H2O", 0.001}, {"N2", 0.099}});
    const auto s = condenser_split(4e5, X, c, table());
    EXPECT_EQ(s.liquid_fraction, 0.0);
    EXPECT_EQ(s.X_out, X);
}

TEST(Condenser, WetInletMatchesBisection) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> water(0.05, 0.4);
    std::uniform_real_distribution<double> pressure(1e5, 6e5);
    const CondenserParams c;
    const std::size_t iw = table().index_of("H2O");
    const double Mw = table()[iw].molar_mass;
    for (int trial = 0; trial < 50; ++trial) {
        const double yw = water(rng);
        const auto X = mix({{"CO2", 0.8 * (1 - yw)}, {"O2", 0.2 * (1 - yw)}, {"H2O", yw}});
        const double p = pressure(rng);
        const double Yv = media::p_sat(c.T_out, c.saturation) / p;
        double n_total = 0.0;
        for (std::size_t i = 0; i < X.size(); ++i) n_total += X[i] / table()[i].molar_mass;
        const double n_w = X[iw] / Mw;
        const double L = bisect(
            [&](double liq) { return (n_w - liq / Mw) / (n_total - liq / Mw) - Yv; }, 0.0, X[iw]);
        const auto s = condenser_split(p, X, c, table());
        EXPECT_NEAR(s.liquid_fraction, L, 1e-10);
        EXPECT_NEAR(s.gas_fraction + s.liquid_fraction, 1.0, 1e-15);
        EXPECT_NEAR(std::accumulate(s.X_out.begin(), s.X_out.end(), 0.0), 1.0, 1e-12);
        EXPECT_DOUBLE_EQ(condenser_gas_flow(2.0, s.liquid_fraction, 0.0), 2.0);
        EXPECT_NEAR(condenser_gas_flow(2.0, s.liquid_fraction, 1.0), 2.0 * s.gas_fraction, 1e-14);
    }
}

TEST(Electrochem, OpenCircuitLogTermVanishes) {
    for (double T : {900.0, 1100.0, 1250.0}) {
        const double dg = media::reaction_gibbs(media::hydrogen_oxidation(), T);
        EXPECT_NEAR(ec::open_circuit_potential(T, 3e4, 3e4, media::p_ref), -dg / (2.0 * media::F), 1e-14);
    }
    EXPECT_GT(ec::open_circuit_potential(1100.0, 5e4, 1e4, 2e4), ec::open_circuit_potential(1100.0, 1e4, 5e4, 2e4));
    EXPECT_THROW(ec::open_circuit_potential(1100.0, 0.0, 1e4, 2e4), DomainError);
}

TEST(Electrochem, ZeroCurrentLosses) {
    EXPECT_EQ(ec::activation_loss(0.0, 3000.0, 1100.0, 0.5), 0.0);
    EXPECT_EQ(ec::activation_loss_linear(0.0, 3000.0, 1100.0, 0.5), 0.0);
    EXPECT_EQ(ec::concentration_loss(1100.0, 4e4, 3e4, 2e4, 4e4, 3e4, 2e4), 0.0);
    EXPECT_EQ(ec::tpb_pressure(2e5, 4e4, 1100.0, 1e-4, 0.0, false), 4e4);
}

TEST(Electrochem, ExplicitActivationInvertsButlerVolmer) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> lj(std::log(10.0), std::log(2e4));
    std::uniform_real_distribution<double> lj0(std::log(100.0), std::log(1e4));
    std::uniform_real_distribution<double> temp(900.0, 1300.0);
    for (int k = 0; k < 100; ++k) {
        const double j = std::exp(lj(rng));
        const double j0 = std::exp(lj0(rng));
        const double T = temp(rng);
        const double root = bisect([&](double e) { return ec::butler_volmer(e, j0, T, 0.5) - j; }, 0.0, 2.0);
        EXPECT_NEAR(ec::activation_loss(j, j0, T, 0.5), root, 1e-10);
    }
}

TEST(Electrochem, LinearizedActivationWithinOnePercent) {
    const double T = 1100.0;
    for (double j0 : {500.0, 3000.0, 9000.0}) {
        for (int k = 1; k <= 20; ++k) {
            const double j = 0.1 * j0 * k / 20.0;
            const double exact = ec::activation_loss(j, j0, T, 0.5);
            EXPECT_LE(std::abs(ec::activation_loss_linear(j, j0, T, 0.5) - exact), 0.01 * exact);
        }
    }
}

TEST(Electrochem, TpbPressureDirection) {
    const double p = 2e5;
    EXPECT_LT(ec::tpb_pressure(p, 5e4, 1100.0, 1e-4, 4000.0, false), 5e4);
    EXPECT_GT(ec::tpb_pressure(p, 5e4, 1100.0, 1e-4, 4000.0, true), 5e4);
    EXPECT_GT(ec::concentration_loss(1100.0, 5e4, 5e4, 2e4, ec::tpb_pressure(p, 5e4, 1100.0, 1e-4, 4000.0, false),
                                     ec::tpb_pressure(p, 5e4, 1100.0, 1e-4, 4000.0, true),
                                     ec::tpb_pressure(p, 2e4, 1100.0, 1e-4, 4000.0, false)),
              0.0);
    try {
        ec::concentration_loss(1100.0, 5e4, 5e4, 2e4, -1.0, 5e4, 2e4);
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("H2"), std::string::npos);
    }
}

TEST(Electrochem, ReactionRateVanishesAtEquilibrium) {
    const auto smr = media::steam_reforming();
    const double T = 1000.0;
    const double K = media::equilibrium_constant(smr, T);
    EXPECT_NEAR(ec::reaction_rate(smr, T, 0.4, 0.6, K * 0.24), 0.0, 1e-12 * smr.k0);
    EXPECT_GT(ec::reaction_rate(smr, T, 0.4, 0.6, 0.0), 0.0);
}

TEST(Combustion, MethaneStoichiometric) {
    const std::size_t ich4 = table().index_of("CH4"), io2 = table().index_of("O2");
    std::vector<double> w(table().size(), 0.0);
    w[ich4] = table()[ich4].molar_mass;
    w[io2] = 2.0 * table()[io2].molar_mass;
    const auto out = complete_combustion(w, table());
    const double n_co2 = out[table().index_of("CO2")] / table()[table().index_of("CO2")].molar_mass;
    const double n_h2o = out[table().index_of("H2O")] / table()[table().index_of("H2O")].molar_mass;
    EXPECT_NEAR(n_h2o / n_co2, 2.0, 1e-14);
    EXPECT_NEAR(out[io2], 0.0, 1e-15);
    EXPECT_EQ(out[ich4], 0.0);
}

TEST(Combustion, HydrogenGivesWaterOnly) {
    const std::size_t ih2 = table().index_of("H2"), io2 = table().index_of("O2"), in2 = table().index_of("N2");
    std::vector<double> w(table().size(), 0.0);
    w[ih2] = 0.1;
    w[io2] = 2.0;
    w[in2] = 1.0;
    const auto out = complete_combustion(w, table());
    EXPECT_EQ(out[ih2], 0.0);
    EXPECT_EQ(out[table().index_of("CO2")], 0.0);
    EXPECT_EQ(out[in2], 1.0);
    EXPECT_GT(out[table().index_of("H2O")], 0.0);
}

TEST(Combustion, AtomBalanceOnRandomFeeds) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> w(table().size());
        for (auto& x : w) x = u(rng);
        w[table().index_of("H2")] *= 0.05;
        w[table().index_of("O2")] += 10.0;
        const auto in = atom_flows(w, table());
        const auto out = atom_flows(complete_combustion(w, table()), table());
        for (std::size_t a = 0; a < 4; ++a) EXPECT_LE(std::abs(out[a] - in[a]), 1e-12 * std::abs(in[a]));
        const double m_in = std::accumulate(w.begin(), w.end(), 0.0);
        const auto wo = complete_combustion(w, table());
        EXPECT_NEAR(std::accumulate(wo.begin(), wo.end(), 0.0), m_in, 1e-12 * m_in);
    }
}

TEST(Combustion, SubStoichiometricOxygen) {
    std::vector<double> w(table().size(), 0.0);
    w[table().index_of("CH4")] = 1.0;
    w[table().index_of("O2")] = 1.0;
    EXPECT_THROW(complete_combustion(w, table()), ModelError);
}

TEST(Intercooler, StoredMassFollowsDensity) {
    const Intercooler ic("ic", {.volume = 0.2, .T_out = 320.0});
    const auto X = mix({{"CO2", 0.7}, {"O2", 0.3}});
    double n = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) n += X[i] / table()[i].molar_mass;
    const double dp = 5e4;
    const double expected = 0.2 * dp / (media::R * n * 320.0);
    EXPECT_NEAR(ic.stored_mass(3e5 + dp, X, table()) - ic.stored_mass(3e5, X, table()), expected, 1e-12 * expected);
}

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "ssinit/eqsys.hpp"
#include "test_models.hpp"

using namespace ssinit;
using testing_models::parameter;
using testing_models::unknown;

TEST(HomotopyCombine, Endpoints) {
    EXPECT_EQ(homotopy_combine(5, 3, 0), 3);
    EXPECT_EQ(homotopy_combine(5, 3, 1), 5);
    EXPECT_EQ(homotopy_combine(5, 3, 0.5), 4);
}

TEST(HomotopyCombine, RejectsLambdaOutsideUnitInterval) {
    EXPECT_THROW(homotopy_combine(1, 2, -0.1), DomainError);
    EXPECT_THROW(homotopy_combine(1, 2, 1.5), DomainError);
    EXPECT_THROW(homotopy_combine(1, 2, std::nan("")), DomainError);
}

TEST(HomotopyCombine, AffineInLambdaWithExactEndpoints) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    std::uniform_real_distribution<double> l(0.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
        const double f = u(rng);
        const double g = u(rng);
        EXPECT_EQ(homotopy_combine(f, g, 0.0), g);
        EXPECT_EQ(homotopy_combine(f, g, 1.0), f);
        const double a = l(rng);
        const double b = l(rng);
        const double mid = homotopy_combine(f, g, 0.5 * (a + b));
        const double avg = 0.5 * (homotopy_combine(f, g, a) + homotopy_combine(f, g, b));
        EXPECT_NEAR(mid, avg, 1e-9 * (std::abs(f) + std::abs(g)));
    }
}

TEST(EvalContext, HomotopyIsLazyAtEndpoints) {
    std::vector<double> values{1.0};
    std::vector<VarId> rep{var_id(0)};
    int actual_calls = 0;
    int simplified_calls = 0;
    auto actual = [&] { ++actual_calls; return 5.0; };
    auto simplified = [&] { ++simplified_calls; return 3.0; };
    EXPECT_EQ(EvalContext(values, rep, 0.0).homotopy(actual, simplified), 3.0);
    EXPECT_EQ(actual_calls, 0);
    EXPECT_EQ(EvalContext(values, rep, 1.0).homotopy(actual, simplified), 5.0);
    EXPECT_EQ(simplified_calls, 1);
    EXPECT_EQ(EvalContext(values, rep, 0.25, HomotopyMode::Actual).homotopy(actual, simplified), 5.0);
    EXPECT_EQ(EvalContext(values, rep, 0.25, HomotopyMode::Simplified).homotopy(actual, simplified), 3.0);
}

TEST(VariableDescriptor, Validation) {
    Model m;
    VariableDescriptor v;
    v.name = "a";
    v.nominal = 0.0;
    EXPECT_THROW(m.add_variable(v), ModelError);
    v.nominal = 1.0;
    v.min = 0.0;
    v.start = -1.0;
    EXPECT_THROW(m.add_variable(v), ModelError);
    v.start = 0.5;
    EXPECT_NO_THROW(m.add_variable(v));
    EXPECT_THROW(m.add_variable(v), ModelError);
}

TEST(Model, DualIncidenceRecorded) {
    Model m;
    const VarId x = unknown(m, "x", 1.0);
    const VarId y = unknown(m, "y", 1.0);
    const VarId z = unknown(m, "z", 1.0);
    m.add_equation("e", [=](const EvalContext& c) {
        return c(x) + c.homotopy([&] { return c(y) * c(z); }, [&] { return c(z); });
    });
    const auto& eq = m.equations().front();
    EXPECT_EQ(eq.incidence_simplified, (std::vector<VarId>{x, z}));
    EXPECT_EQ(eq.incidence_full, (std::vector<VarId>{x, y, z}));
    EXPECT_TRUE(eq.has_homotopy);
}

TEST(Assembly, SingleVolumePressureState) {
    // dP/dt = (w_in - w_out)/C ; w_out = k*P ; initial dP/dt = 0
    Model m;
    VariableDescriptor p{.name = "P", .nominal = 1e5, .start = 1e5, .role = VariableRole::State,
                         .kind = VariableKind::Pressure};
    const VarId P = m.add_variable(p);
    VariableDescriptor d{.name = "der(P)", .role = VariableRole::Algebraic, .kind = VariableKind::Derivative};
    d.derivative_of = P;
    const VarId dP = m.add_variable(d);
    const VarId w_in = parameter(m, "w_in", 2.0);
    m.add_equation("mass", [=](const EvalContext& c) { return 1e-3 * c(dP) - (c(w_in) - 1e-5 * c(P)); });
    m.add_fix("steady", dP, 0.0, EquationPhase::InitialOnly);

    const FlatProblem fp = assemble_initialization_problem(m);
    EXPECT_EQ(fp.equations_before_elimination, 2u);
    EXPECT_EQ(fp.unknowns_before_elimination, 2u);
    ASSERT_EQ(fp.size(), 1u);
    EXPECT_EQ(fp.unknowns.front(), P);
    EXPECT_EQ(fp.value_of(dP), 0.0);
    const auto r = residual_eval(fp, std::vector<double>{2e5}, 1.0);
    EXPECT_NEAR(r[0], 0.0, 1e-15);

    AssemblyOptions sim;
    sim.phase = Phase::Simulation;
    EXPECT_THROW(assemble(m, sim), StructuralSingularity);
    sim.states_unknown = false;
    const FlatProblem sp = assemble(m, sim);
    EXPECT_EQ(sp.size(), 1u);
    EXPECT_EQ(sp.unknowns.front(), dP);
}

TEST(Assembly, DerivativeZeroChainYieldsFlowAlias) {
    // dM/dt = a*dp/dt + b*dh/dt (linear); dM/dt = w_in - w_out
    Model m;
    auto state = [&](const std::string& n, double s) {
        return m.add_variable({.name = n, .nominal = s, .start = s, .role = VariableRole::State});
    };
    const VarId p = state("p", 1e5);
    const VarId h = state("h", 1e5);
    const VarId dp = unknown(m, "der(p)");
    const VarId dh = unknown(m, "der(h)");
    const VarId dM = unknown(m, "der(M)");
    const VarId w_in = parameter(m, "w_in", 3.0);
    const VarId w_out = unknown(m, "w_out", 1.0);
    const VarId h_in = parameter(m, "h_in", 2e5);
    m.add_equation("dM", [=](const EvalContext& c) { return c(dM) - (2e-5 * c(dp) + 1e-6 * c(dh)); },
                   EquationPhase::Both, 1.0, tag::DerivativeLinear{dM, {dp, dh}});
    m.add_equation("mass", [=](const EvalContext& c) { return c(dM) - (c(w_in) - c(w_out)); }, EquationPhase::Both,
                   1.0, tag::ZeroDerivativeAlias{dM, w_in, w_out});
    m.add_equation("energy", [=](const EvalContext& c) { return c(dh) - (c(w_in) * (c(h_in) - c(h)) + 1e-3 * c(p)); });
    m.add_equation("outflow", [=](const EvalContext& c) { return c(w_out) - 1e-5 * c(p); });
    m.add_fix("steady p", dp, 0.0, EquationPhase::InitialOnly);
    m.add_fix("steady h", dh, 0.0, EquationPhase::InitialOnly);

    const FlatProblem fp = assemble_initialization_problem(m);
    EXPECT_EQ(fp.equations_before_elimination, 6u);
    // w_out aliased to known w_in; dM eliminated; remaining: energy (h), outflow (p)
    ASSERT_EQ(fp.size(), 2u);
    EXPECT_EQ(fp.value_of(w_out), 3.0);
    EXPECT_EQ(fp.value_of(dM), 0.0);
    EXPECT_EQ(fp.unknown_pos[w_out.index()], -1);
}

TEST(Assembly, RemovedEquationIsStructurallySingular) {
    Model m;
    const VarId x = unknown(m, "x");
    const VarId y = unknown(m, "y");
    m.add_equation("ex", [=](const EvalContext& c) { return c(x) + c(y) - 1.0; });
    m.add_equation("ey", [=](const EvalContext& c) { return c(y) - 2.0; });
    m.remove_equation("ey");
    try {
        (void)assemble_initialization_problem(m);
        FAIL() << "expected StructuralSingularity";
    } catch (const StructuralSingularity& e) {
        EXPECT_FALSE(e.unmatched_variables().empty());
        EXPECT_NE(std::string(e.what()).find("unmatched variables"), std::string::npos);
    }
}

TEST(ResidualEval, AffineAndErrors) {
    Model m;
    const VarId x = unknown(m, "x");
    m.add_equation("lin", [=](const EvalContext& c) { return 2.0 * c(x) - 6.0; });
    const FlatProblem fp = assemble_initialization_problem(m);
    EXPECT_EQ(residual_eval(fp, std::vector<double>{3.0}, 1.0)[0], 0.0);
    EXPECT_EQ(residual_eval(fp, std::vector<double>{0.0}, 1.0)[0], -6.0);

    Model bad;
    const VarId z = unknown(bad, "z", 1.0);
    bad.add_equation("log", [=](const EvalContext& c) { return std::log(c(z)); });
    const FlatProblem bp = assemble_initialization_problem(bad);
    try {
        (void)residual_eval(bp, std::vector<double>{-1.0}, 1.0);
        FAIL();
    } catch (const EvaluationError& e) {
        EXPECT_EQ(e.equation(), "log");
    }
}

TEST(ResidualEval, DeterministicOnRandomProblems) {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        auto rows = testing_models::random_nonsingular_pattern(rng, 12, 0.3);
        Model m;
        std::vector<VarId> v;
        for (int j = 0; j < 12; ++j) v.push_back(unknown(m, "x" + std::to_string(j), 0.5));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            std::vector<VarId> inc;
            for (int j : rows[i]) inc.push_back(v[j]);
            m.add_equation("e" + std::to_string(i), [inc](const EvalContext& c) {
                double s = 0.0;
                for (auto x : inc) s += std::sin(c(x)) * c.homotopy([&] { return c(x) * c(x); }, 1.0);
                return s;
            });
        }
        const FlatProblem fp = assemble_initialization_problem(m);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        std::vector<double> x(fp.size());
        for (auto& xi : x) xi = u(rng);
        const double lambda = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const auto a = residual_eval(fp, x, lambda);
        const auto b = residual_eval(fp, x, lambda);
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(std::memcmp(&a[i], &b[i], sizeof(double)), 0);
    }
}

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ssinit/plant.hpp"
#include "ssinit/solver.hpp"
#include "ssinit/structure.hpp"

using namespace ssinit;

namespace {

std::shared_ptr<const media::SpeciesTable> air() {
    return std::make_shared<const media::SpeciesTable>(
        std::vector<media::SpeciesData>{media::SpeciesTable::builtin("O2"), media::SpeciesTable::builtin("N2")});
}

const std::vector<double> air_X{0.23, 0.77};

StreamState air_stream(double p, double w) { return {.p = p, .w = w, .T = 350.0, .X = air_X}; }

PressureLossParams loss_params(double dp) {
    return {.dp_nom = dp, .w_nom = 1.0, .rho_nom = 1.0, .law = LossLaw::QuadraticWithHomotopy};
}

/// source -> loss -> sink at 1 bar.
PlantGraph chain() {
    PlantGraph g;
    g.species = air();
    g.emplace<FluidSource>("src", SourceParams{1.5, 350.0, air_X});
    g.emplace<PressureLoss>("loss", loss_params(2e3));
    g.emplace<FluidSink>("sink", 1e5);
    g.connect("src.out", "loss.in", air_stream(1.02e5, 1.0));
    g.connect("loss.out", "sink.in", air_stream(1e5, 1.0));
    return g;
}

/// Extra unknown with no equation.
class Orphan final : public Component {
public:
    explicit Orphan(std::string name) : Component(std::move(name)) {}
    std::string_view type() const noexcept override { return "orphan"; }
    std::vector<PortSpec> ports() const override {
        return {{"in", PortDirection::Inlet}, {"out", PortDirection::Outlet}};
    }
    Contribution contribute(Builder& b) const override {
        FluidPort in = b.port("in", PortDirection::Inlet);
        FluidPort out = b.port("out", PortDirection::Outlet);
        b.alias("p", out.p, in.p);
        b.alias("w", out.w, in.w);
        b.alias("h", out.h, in.h);
        for (std::size_t i = 0; i < in.X.size(); ++i) b.alias("X" + std::to_string(i), out.X[i], in.X[i]);
        b.add("dangling", {.nominal = 1.0, .start = 0.0});
        Contribution c;
        c.ports["in"] = std::move(in);
        c.ports["out"] = std::move(out);
        return c;
    }
};

std::vector<double> solve(const FlatModel& flat) {
    const FlatProblem p = assemble_initialization_problem(flat.model);
    const HomotopyTrace tr = continuation(p, {}, {});
    return resolved_values(p, tr.solution());
}

double value(const FlatModel& flat, const std::vector<double>& v, const std::string& name) {
    if (auto it = flat.signals.find(name); it != flat.signals.end()) return v[it->second.index()];
    const auto id = flat.model.find(name);
    if (!id) throw std::runtime_error("no variable " + name);
    return v[id->index()];
}

struct DemoRun {
    PlantGraph graph;
    FlatModel flat;
    std::vector<double> values;
};

const DemoRun& demo_forward() {
    static const DemoRun run = [] {
        DemoRun r;
        r.graph = build_demo_plant();
        r.flat = flatten(r.graph);
        r.values = solve(r.flat);
        return r;
    }();
    return run;
}

}  // namespace

TEST(Flatten, ConnectionEquationsPerConnection) {
    const FlatModel f = flatten(chain());
    EXPECT_EQ(f.connections.size(), 2u);
    EXPECT_EQ(f.connection_equations, 8u);
    const auto& eqs = f.model.equations();
    EXPECT_NE(std::find_if(eqs.begin(), eqs.end(), [](const auto& e) { return e.name == "connect(src.out, loss.in).X[O2]"; }),
              eqs.end());
    EXPECT_GT(f.initialization_size, 0u);
}

TEST(Flatten, ChainSolvesWithContinuity) {
    const FlatModel f = flatten(chain());
    const auto v = solve(f);
    const auto& in = f.ports.at("loss.in");
    const auto& out = f.ports.at("loss.out");
    EXPECT_NEAR(v[in.w.index()], 1.5, 1e-12);
    EXPECT_NEAR(v[out.w.index()], 1.5, 1e-12);
    EXPECT_NEAR(v[out.p.index()], 1e5, 1e-6);
    EXPECT_GT(v[in.p.index()], v[out.p.index()]);
    EXPECT_NEAR(v[in.h.index()], v[out.h.index()], 1e-9);
    const auto report = check_conservation(chain(), f, v);
    EXPECT_LE(report.connection, 1e-10);
    EXPECT_LE(report.fraction_sum, 1e-12);
}

TEST(Flatten, DanglingPortIsNamed) {
    PlantGraph g = chain();
    g.connections.pop_back();
    try {
        flatten(g);
        FAIL();
    } catch (const ModelError& e) {
        EXPECT_NE(std::string(e.what()).find("dangling port 'loss.out'"), std::string::npos) << e.what();
    }
}

TEST(Flatten, PortConnectedTwice) {
    PlantGraph g = chain();
    g.connect("src.out", "sink.in");
    try {
        flatten(g);
        FAIL();
    } catch (const ModelError& e) {
        EXPECT_NE(std::string(e.what()).find("connected twice"), std::string::npos) << e.what();
    }
}

TEST(Flatten, DirectionMismatchAndUnknownReferences) {
    PlantGraph g = chain();
    g.connections[0] = {"loss.in", "src.out"};
    EXPECT_THROW(flatten(g), ModelError);
    g = chain();
    g.connections[0] = {"nowhere.out", "loss.in"};
    EXPECT_THROW(flatten(g), ModelError);
    g = chain();
    g.connections[0] = {"src.exit", "loss.in"};
    EXPECT_THROW(flatten(g), ModelError);
    g = chain();
    g.connections[0] = {"src", "loss.in"};
    EXPECT_THROW(flatten(g), ModelError);
    g = chain();
    g.emplace<FluidSink>("sink", 1e5);
    EXPECT_THROW(flatten(g), ModelError);
}

TEST(Flatten, NonSquareNamesTheUnmatchedVariable) {
    PlantGraph g;
    g.species = air();
    g.emplace<FluidSource>("src", SourceParams{1.0, 350.0, air_X});
    g.emplace<Orphan>("odd");
    g.emplace<PressureLoss>("loss", loss_params(1e3));
    g.emplace<FluidSink>("sink", 1e5);
    g.connect("src.out", "odd.in", air_stream(1e5, 1.0));
    g.connect("odd.out", "loss.in", air_stream(1e5, 1.0));
    g.connect("loss.out", "sink.in", air_stream(1e5, 1.0));
    try {
        flatten(g);
        FAIL();
    } catch (const StructuralSingularity& e) {
        const auto& vars = e.unmatched_variables();
        EXPECT_NE(std::find(vars.begin(), vars.end(), "odd.dangling"), vars.end());
    }
}

TEST(Flatten, InputBlockOnUnknownActuator) {
    PlantGraph g = chain();
    g.inputs.push_back({.name = "u", .actuator = "src.missing", .u_des = 1.0});
    EXPECT_THROW(flatten(g), ModelError);
    g = chain();
    g.inputs.push_back({.name = "u1", .actuator = "src.w", .u_des = 1.0});
    g.inputs.push_back({.name = "u2", .actuator = "src.w", .u_des = 1.0});
    EXPECT_THROW(flatten(g), ModelError);
}

TEST(Flatten, UndrivenInputUsesDefault) {
    const FlatModel f = flatten(chain());
    const auto v = solve(f);
    EXPECT_DOUBLE_EQ(value(f, v, "src.w"), 1.5);
    PlantGraph g = chain();
    g.inputs.push_back({.name = "flow", .actuator = "src.w", .u_des = 0.7, .u_norm = 1.0});
    const FlatModel f2 = flatten(g);
    EXPECT_NEAR(value(f2, solve(f2), "src.w"), 0.7, 1e-12);
}

TEST(Decoupler, InsertionKeepsTheSolution) {
    PlantGraph g;
    g.species = air();
    g.emplace<FluidSource>("src", SourceParams{1.2, 350.0, air_X});
    g.emplace<PressureLoss>("a", loss_params(3e3));
    g.emplace<PressureLoss>("b", loss_params(2e3));
    g.emplace<FluidSink>("sink", 1e5);
    g.connect("src.out", "a.in", air_stream(1.05e5, 1.0));
    g.connect("a.out", "b.in", air_stream(1.02e5, 1.0));
    g.connect("b.out", "sink.in", air_stream(1e5, 1.0));
    const FlatModel plain = flatten(g);
    const auto v0 = solve(plain);

    PlantGraph gd = g;
    insert_decoupler(gd, "b.in", "dec");
    const FlatModel dec = flatten(gd);
    EXPECT_EQ(dec.connections.size(), 4u);
    const auto v1 = solve(dec);
    for (const char* port : {"src.out", "a.out", "b.in", "b.out"}) {
        EXPECT_NEAR(v1[dec.ports.at(port).p.index()], v0[plain.ports.at(port).p.index()], 1e-8 * 1e5) << port;
        EXPECT_NEAR(v1[dec.ports.at(port).w.index()], v0[plain.ports.at(port).w.index()], 1e-10) << port;
        EXPECT_NEAR(v1[dec.ports.at(port).h.index()], v0[plain.ports.at(port).h.index()], 1e-8 * 1e5) << port;
    }

    EXPECT_THROW(insert_decoupler(gd, "b.in", "dec"), ModelError);
    EXPECT_THROW(insert_decoupler(gd, "nothing.in", "dec2"), ModelError);
}

TEST(PlantGraph, SetBackwardTogglesOnlyPairedBlocks) {
    PlantGraph g = build_demo_plant();
    g.set_backward(true);
    EXPECT_EQ(g.input("fuel_flow")->mode, BlockMode::Backward);
    EXPECT_EQ(g.input("moderator_flow")->mode, BlockMode::Backward);
    EXPECT_EQ(g.input("current")->mode, BlockMode::Forward);
    EXPECT_EQ(g.output("turbine_power")->mode, BlockMode::Backward);
    EXPECT_EQ(g.output("stack_power")->mode, BlockMode::Forward);
    g.set_backward(false);
    EXPECT_EQ(g.output("tit")->mode, BlockMode::Forward);
}

TEST(DemoPlant, DesignPointIsConsistent) {
    const DemoDesign d = design_demo_point();
    EXPECT_GT(d.loop_iterations, 0);
    EXPECT_GT(d.cell_voltage, 0.5);
    EXPECT_LT(d.cell_voltage, 1.0);
    EXPECT_NEAR(d.stack_power, d.cell_voltage * d.current, 1e-6 * d.stack_power);
    EXPECT_GT(d.combustor_temperature, d.streams.at("sofc.cathode_out").T);
    EXPECT_GT(d.turbine_power, d.compressor_power);
    for (const auto& [port, s] : d.streams) {
        double sum = 0.0;
        for (double x : s.X) sum += x;
        EXPECT_NEAR(sum, 1.0, 1e-12) << port;
    }
}

TEST(DemoPlant, SquareInBothPhases) {
    const FlatModel& f = demo_forward().flat;
    EXPECT_GT(f.initialization_size, 0u);
    EXPECT_GT(f.simulation_size, 0u);
    EXPECT_EQ(f.connection_equations, f.connections.size() * (3 + media::SpeciesTable::standard().size() - 1));
    const FlatProblem p = assemble_initialization_problem(f.model);
    EXPECT_GT(blt_decompose(p, LambdaRegime::Simplified).components.size(), 1u);
}

TEST(DemoPlant, ForwardSolutionMatchesInputs) {
    const auto& r = demo_forward();
    const DemoDesign d = design_demo_point();
    EXPECT_NEAR(value(r.flat, r.values, "fuel.w"), d.fuel_flow, 1e-12);
    EXPECT_NEAR(value(r.flat, r.values, "moderator.w"), d.moderator_flow, 1e-12);
    EXPECT_NEAR(value(r.flat, r.values, "sofc.I"), d.current, 1e-6);
    const double E = value(r.flat, r.values, "sofc.E");
    EXPECT_GT(E, 0.6);
    EXPECT_LT(E, 0.9);
}

TEST(DemoPlant, ConservationAtSteadyState) {
    const auto& r = demo_forward();
    const auto c = check_conservation(r.graph, r.flat, r.values);
    EXPECT_LE(c.connection, 1e-10) << c.worst_connection;
    EXPECT_LE(c.hx_closure, 1e-8) << c.worst_hx;
    EXPECT_LE(c.atom_balance, 1e-12) << c.worst_combustor;
    EXPECT_LE(c.fraction_sum, 1e-12);
    EXPECT_GE(c.min_fraction, -1e-10);
}

TEST(DemoPlant, WholePlantMassAndEnergyClosure) {
    const auto& r = demo_forward();
    const auto& f = r.flat;
    const auto& v = r.values;
    const auto w = [&](const char* port) { return v[f.ports.at(port).w.index()]; };
    const auto H = [&](const char* port) { return w(port) * v[f.ports.at(port).h.index()]; };
    const double w_liq = value(f, v, "condenser.w_liquid");
    const double mass_in = w("moderator.out") + w("fuel.out");
    const double mass_out = w("sink.in") + w_liq;
    EXPECT_NEAR(mass_in, mass_out, 1e-8 * mass_in);

    const auto& table = *r.graph.species;
    const auto* cond = dynamic_cast<const Condenser*>(r.graph.find("condenser"));
    ASSERT_NE(cond, nullptr);
    const double h_liq = media::species_enthalpy(table.index_of("H2O"), cond->params().T_out, table);
    const double P_el = value(f, v, "sofc.P");
    const double P_t = value(f, v, "turbine.power");
    const double P_c = value(f, v, "compressor.power");
    const double Q_ic = value(f, v, "intercooler.Q");
    const double Q_cd = value(f, v, "condenser.Q");
    const double in = H("moderator.out") + H("fuel.out");
    const double out = H("sink.in") + w_liq * h_liq + P_el + P_t - P_c + Q_ic + Q_cd;
    const double scale = std::abs(P_el) + std::abs(P_t) + std::abs(P_c) + std::abs(Q_ic) + std::abs(Q_cd);
    EXPECT_NEAR(in, out, 1e-6 * scale);
}

TEST(DemoPlant, VerificationDriftAndNegativeControl) {
    const auto& r = demo_forward();
    const auto ok = verify_steady_state(r.flat.model, r.values, 10.0, 1.0, {});
    EXPECT_LE(ok.drift, 1e-6);
    auto perturbed = r.values;
    perturbed[r.flat.model.find("sofc.pen.v3.T")->index()] *= 1.01;
    EXPECT_GT(verify_steady_state(r.flat.model, perturbed, 10.0, 1.0, {}).drift, 1e-4);
}

TEST(DemoPlant, HoldInputsMakesSimulationStartBumpless) {
    PlantGraph g = build_demo_plant();
    g.scenario = Scenario::SimulationOnDesign;
    g.set_backward(true);
    g.output("turbine_power")->y_des *= 0.97;
    const FlatModel f = flatten(g);
    auto v = solve(f);
    EXPECT_GT(verify_steady_state(f.model, v, 10.0, 1.0, {}).drift, 1e-4);
    hold_inputs(g, f, v);
    EXPECT_LE(verify_steady_state(f.model, v, 10.0, 1.0, {}).drift, 1e-6);
}

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ssinit/plant.hpp"
#include "ssinit/solver.hpp"
#include "ssinit/structure.hpp"

using namespace ssinit;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string title;
    double time_limit;
    std::function<Outcome()> check;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string histogram(const BltOrdering& b) {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (const auto& [size, count] : b.histogram()) {
        os << (first ? "" : ", ") << size << ":" << count;
        first = false;
    }
    os << "}";
    return os.str();
}

struct Solved {
    PlantGraph graph;
    FlatModel flat;
    FlatProblem problem;
    HomotopyTrace trace;
    std::vector<double> values;
};

Solved solve(PlantGraph g, const Snapshot* warm = nullptr) {
    Solved s;
    s.graph = std::move(g);
    s.flat = flatten(s.graph);
    s.problem = assemble_initialization_problem(s.flat.model);
    if (warm != nullptr) warm_start_backward(*warm, s.problem);
    s.trace = continuation(s.problem, {}, {}, {.direct = warm != nullptr});
    s.values = resolved_values(s.problem, s.trace.solution());
    hold_inputs(s.graph, s.flat, s.values);
    return s;
}

double signal(const Solved& s, const std::string& name) { return s.values[s.flat.signals.at(name).index()]; }

Snapshot snapshot(const Solved& s) {
    Snapshot snap;
    for (std::size_t i = 0; i < s.values.size(); ++i) snap[s.flat.model.variables()[i].name] = s.values[i];
    return snap;
}

/// Converged states collected by criteria 3-5 for the conservation suite.
std::vector<std::pair<std::string, const Solved*>> converged;

double forward_on_seconds = 0.0;

const Solved& forward_on() {
    static const Solved s = [] {
        const auto t0 = Clock::now();
        Solved r = solve(build_demo_plant());
        forward_on_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        return r;
    }();
    return s;
}

template <class F>
double bisect(F f, double lo, double hi) {
    double flo = f(lo);
    for (int i = 0; i < 200; ++i) {
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

Outcome homotopy_endpoints() {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> jitter(0.97, 1.03);
    std::size_t pairs = 0;
    std::size_t evaluations = 0;
    double worst = 0.0;
    std::string worst_eq;
    for (Scenario sc : {Scenario::SteadyStateOnDesign, Scenario::SimulationOffDesign}) {
        PlantGraph g = build_demo_plant();
        g.scenario = sc;
        const FlatModel flat = flatten(g);
        const FlatProblem p = assemble_initialization_problem(flat.model);
        std::vector<std::vector<double>> points{p.values};
        if (sc == Scenario::SteadyStateOnDesign) points.push_back(forward_on().values);
        for (int k = 0; k < 10; ++k) {
            auto v = p.values;
            for (VarId u : p.unknowns) v[u.index()] *= jitter(rng);
            points.push_back(std::move(v));
        }
        for (std::size_t e = 0; e < p.equations.size(); ++e) {
            if (!p.equations[e].has_homotopy) continue;
            ++pairs;
            for (const auto& v : points) {
                double r0, rs, r1, ra;
                try {
                    r0 = evaluate_equation(p, e, v, 0.0);
                    rs = evaluate_equation(p, e, v, 0.5, HomotopyMode::Simplified);
                    r1 = evaluate_equation(p, e, v, 1.0);
                    ra = evaluate_equation(p, e, v, 0.5, HomotopyMode::Actual);
                } catch (const Error&) {
                    continue;
                }
                ++evaluations;
                const double scale = std::max(p.equations[e].nominal_residual, 1e-300);
                const double d = std::max(std::abs(r0 - rs), std::abs(r1 - ra)) / scale;
                if (d > worst || worst_eq.empty()) {
                    worst = std::max(worst, d);
                    worst_eq = p.equations[e].name;
                }
            }
        }
    }
    const bool pass = pairs > 0 && evaluations > 0 && worst <= 1e-15;
    return {pass, fmt("%zu homotopy equations, %zu endpoint evaluations, max scaled deviation %.1e", pairs,
                      evaluations, worst)};
}

Outcome strong_component_splitting() {
    const FlatModel flat = flatten(build_demo_plant());
    const FlatProblem p = assemble_initialization_problem(flat.model);
    const BltOrdering b0 = blt_decompose(p, LambdaRegime::Simplified);
    const BltOrdering b1 = blt_decompose(p, LambdaRegime::Full);
    const bool pass = b0.components.size() > b1.components.size() && b0.max_size() < b1.max_size();
    return {pass, fmt("lambda=0: %zu components, max %zu, sizes %s; lambda=1: %zu components, max %zu, sizes %s",
                      b0.components.size(), b0.max_size(), histogram(b0).c_str(), b1.components.size(),
                      b1.max_size(), histogram(b1).c_str())};
}

Outcome forward_on_design() {
    const Solved& s = forward_on();
    const double seconds = forward_on_seconds;
    const auto x = s.trace.solution();
    const double res = scaled_residual_norm(s.problem, scale(s.problem, x, 1.0), x, 1.0);
    const auto vr = verify_steady_state(s.flat.model, s.values, 10.0, 1.0, {});
    converged.emplace_back("fwd steady-on", &s);
    const bool pass = s.trace.complete() && s.trace.rejected.empty() && res <= 1e-8 && seconds < 30.0 &&
                      vr.drift <= 1e-6;
    return {pass, fmt("%zu lambda steps, %zu rejected, scaled residual %.2e, flatten + solve %.3f s, drift %.1e over 10 s",
                      s.trace.steps.size(), s.trace.rejected.size(), res, seconds, vr.drift)};
}

Outcome round_trip() {
    const Solved& fwd = forward_on();
    PlantGraph g = build_demo_plant();
    g.set_backward(true);
    for (auto& out : g.outputs) out.y_des = signal(fwd, out.sensor);
    static const Solved bwd = solve(g);
    converged.emplace_back("bwd steady-on round trip", &bwd);
    double worst = 0.0;
    std::string names;
    for (const auto& in : g.inputs) {
        if (in.mode != BlockMode::Backward) continue;
        const double a = signal(fwd, in.actuator);
        const double b = signal(bwd, in.actuator);
        worst = std::max(worst, std::abs(b - a) / std::abs(a));
        names += (names.empty() ? "" : ", ") + in.name;
    }
    const bool pass = !names.empty() && worst <= 1e-6;
    return {pass, fmt("recovered %s from y_des = forward outputs (cold start), max relative error %.1e", names.c_str(),
                      worst)};
}

Outcome backward_off_design() {
    const Snapshot warm = snapshot(forward_on());
    PlantGraph g = build_demo_plant();
    g.scenario = Scenario::SteadyStateOffDesign;
    g.set_backward(true);
    OutputBlock* power = g.output("turbine_power");
    power->y_offdes = 0.8 * power->y_des;
    static const Solved off = solve(g, &warm);
    converged.emplace_back("bwd steady-off 80 %", &off);
    const double P = signal(off, "turbine.power");
    const auto vr = verify_steady_state(off.flat.model, off.values, 10.0, 1.0, {});
    const double err = std::abs(P - power->y_offdes) / power->y_offdes;
    const bool pass = off.trace.complete() && err <= 1e-6 && vr.drift <= 1e-6;
    return {pass, fmt("turbine power %.1f W = %.4f of design (target 0.8, rel. error %.1e), fuel %.3e kg/s, "
                      "moderator %.3e kg/s, drift %.1e",
                      P, P / power->y_des, err, signal(off, "fuel.w"), signal(off, "moderator.w"), vr.drift)};
}

Outcome scenario_equivalence() {
    bool pass = true;
    std::string detail;
    for (bool backward : {false, true}) {
        std::size_t unknowns = 0, equations = 0;
        std::vector<std::size_t> sizes;
        bool first = true;
        for (Scenario sc : all_scenarios) {
            PlantGraph g = build_demo_plant();
            g.scenario = sc;
            g.set_backward(backward);
            const FlatModel flat = flatten(g);
            const FlatProblem p = assemble_initialization_problem(flat.model);
            auto s = blt_decompose(p, LambdaRegime::Simplified).sizes();
            std::sort(s.begin(), s.end());
            if (first) {
                unknowns = p.size();
                equations = p.equations.size();
                sizes = s;
                first = false;
            } else if (p.size() != unknowns || p.equations.size() != equations || s != sizes) {
                pass = false;
                detail += fmt(" %s/%s differs;", backward ? "bwd" : "fwd", std::string(short_name(sc)).c_str());
            }
        }
        detail += fmt(" %s: %zu unknowns, %zu equations, %zu lambda=0 components;", backward ? "bwd" : "fwd",
                      unknowns, equations, sizes.size());
    }
    return {pass, "six scenarios x {fwd, bwd}:" + detail};
}

Outcome conservation() {
    static std::vector<Solved> scenario_runs;
    if (scenario_runs.empty()) {
        for (Scenario sc : all_scenarios) {
            PlantGraph g = build_demo_plant();
            g.scenario = sc;
            scenario_runs.push_back(solve(g));
        }
        for (std::size_t k = 0; k < scenario_runs.size(); ++k)
            converged.emplace_back("fwd " + std::string(short_name(all_scenarios[k])), &scenario_runs[k]);
    }
    ConservationReport worst;
    for (const auto& [name, s] : converged) {
        const auto c = check_conservation(s->graph, s->flat, s->values);
        worst.connection = std::max(worst.connection, c.connection);
        worst.hx_closure = std::max(worst.hx_closure, c.hx_closure);
        worst.atom_balance = std::max(worst.atom_balance, c.atom_balance);
        worst.fraction_sum = std::max(worst.fraction_sum, c.fraction_sum);
    }
    const bool pass = !converged.empty() && worst.connection <= 1e-10 && worst.hx_closure <= 1e-8 &&
                      worst.atom_balance <= 1e-12 && worst.fraction_sum <= 1e-12;
    return {pass, fmt("%zu steady states: connections %.1e, HX closure %.1e, combustor atoms %.1e, sum X - 1 %.1e",
                      converged.size(), worst.connection, worst.hx_closure, worst.atom_balance, worst.fraction_sum)};
}

Outcome oracle_equivalences() {
    namespace ec = electrochem;
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> lj(std::log(10.0), std::log(2e4));
    std::uniform_real_distribution<double> lj0(std::log(100.0), std::log(1e4));
    std::uniform_real_distribution<double> temp(900.0, 1300.0);
    double bv = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double j = std::exp(lj(rng));
        const double j0 = std::exp(lj0(rng));
        const double T = temp(rng);
        const double root = bisect([&](double e) { return ec::butler_volmer(e, j0, T, 0.5) - j; }, 0.0, 2.0);
        bv = std::max(bv, std::abs(ec::activation_loss(j, j0, T, 0.5) - root));
    }
    double lin = 0.0;
    for (double j0 : {200.0, 1000.0, 5000.0, 2e4}) {
        for (double T : {900.0, 1100.0, 1300.0}) {
            for (int k = 1; k <= 50; ++k) {
                const double j = 0.1 * j0 * k / 50.0;
                const double exact = ec::activation_loss(j, j0, T, 0.5);
                lin = std::max(lin, std::abs(ec::activation_loss_linear(j, j0, T, 0.5) - exact) / exact);
            }
        }
    }
    std::uniform_real_distribution<double> ua(-1e3, 1e3), uT(0.0, 1e3);
    double horner = 0.0;
    for (int k = 0; k < 10000; ++k) {
        const std::array<double, 4> a{ua(rng), ua(rng), ua(rng), ua(rng)};
        const double T = uT(rng);
        const double naive = a[0] * T * T * T + a[1] * T * T + a[2] * T + a[3];
        const double scale =
            std::abs(a[0] * T * T * T) + std::abs(a[1] * T * T) + std::abs(a[2] * T) + std::abs(a[3]);
        horner = std::max(horner, std::abs(media::horner_eval(a, T) - naive) / scale);
    }
    const auto table = media::SpeciesTable::standard();
    const CondenserParams cp;
    const std::size_t iw = table.index_of("H2O");
    std::uniform_real_distribution<double> water(0.0, 0.06), pressure(1e5, 6e5);
    double cond = 0.0;
    int wet = 0;
    for (int k = 0; k < 2000; ++k) {
        std::vector<double> X(table.size(), 0.0);
        X[iw] = water(rng);
        X[table.index_of("CO2")] = 0.9 * (1.0 - X[iw]);
        X[table.index_of("O2")] = 0.1 * (1.0 - X[iw]);
        const auto split = condenser_split(pressure(rng), X, cp, table);
        if (split.liquid_fraction > 0.03) continue;
        if (split.liquid_fraction > 0.0) ++wet;
        const double g0 = condenser_gas_flow(1.0, split.liquid_fraction, 0.0);
        const double g1 = condenser_gas_flow(1.0, split.liquid_fraction, 1.0);
        cond = std::max(cond, std::abs(g0 - g1) / g1);
    }
    const bool pass = bv <= 1e-10 && lin <= 0.01 && horner <= 1e-12 && cond <= 0.05 && wet > 0;
    return {pass, fmt("activation vs Butler-Volmer %.1e V (100 pts); linearized %.2f %% (j <= 0.1 j0); Horner %.1e; "
                      "condenser gas flow lambda 0 vs 1 %.2f %% (%d wet cases, condensate <= 3 %%)",
                      bv, 100.0 * lin, horner, 100.0 * cond, wet)};
}

VarId add_unknown(Model& m, const std::string& name, double start, double nominal = 1.0) {
    VariableDescriptor v;
    v.name = name;
    v.start = start;
    v.nominal = nominal;
    return m.add_variable(v);
}

Outcome solver_properties() {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> mag(-3.0, 3.0);
    int affine_max = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + trial % 9;
        std::vector<double> nominal(n), xs(n), b(n, 0.0);
        std::vector<std::vector<double>> A(n, std::vector<double>(n));
        for (int j = 0; j < n; ++j) {
            nominal[j] = std::pow(10.0, mag(rng));
            xs[j] = u(rng) * nominal[j];
        }
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) A[i][j] = u(rng) / nominal[j];
            A[i][i] += n / nominal[i];
            for (int j = 0; j < n; ++j) b[i] += A[i][j] * xs[j];
        }
        Model m;
        std::vector<VarId> v;
        for (int j = 0; j < n; ++j) v.push_back(add_unknown(m, "x" + std::to_string(j), u(rng) * nominal[j], nominal[j]));
        for (int i = 0; i < n; ++i) {
            m.add_equation("r" + std::to_string(i), [=](const EvalContext& c) {
                double s = -b[i];
                for (int j = 0; j < n; ++j) s += A[i][j] * c(v[j]);
                return s;
            });
        }
        const FlatProblem p = assemble_initialization_problem(m);
        const std::vector<double> x0 = p.start_vector();
        std::vector<double> values = p.values;
        p.scatter(x0, values);
        const NewtonStats st = newton_solve(whole_system(p), p, scale(p, x0, 1.0), values, 1.0, {});
        affine_max = std::max(affine_max, st.iterations);
    }

    const auto build = [](double k) {
        Model m;
        const VarId x = add_unknown(m, "x", 0.4, k);
        const VarId y = add_unknown(m, "y", 0.4, k);
        const VarId z = add_unknown(m, "z", 1.0, k);
        m.add_equation("a", [=](const EvalContext& c) { return c(x) * c(x) + c(y) - 1.5; });
        m.add_equation("b", [=](const EvalContext& c) { return c(x) - std::exp(-c(y)); });
        m.add_equation("c", [=](const EvalContext& c) { return c(z) * c(x) - 2.0 * c(y); });
        return m;
    };
    const SolverConfig cfg;
    const FlatProblem p1 = assemble_initialization_problem(build(1.0));
    const FlatProblem p2 = assemble_initialization_problem(build(1e3));
    const auto x1 = continuation(p1, {}, cfg).solution();
    const auto x2 = continuation(p2, {}, cfg).solution();
    double rescale = 0.0;
    for (std::size_t j = 0; j < x1.size(); ++j) rescale = std::max(rescale, std::abs(x1[j] - x2[j]));

    Model m;
    const VarId a = add_unknown(m, "a", 1.3, 1.0);
    const VarId b = add_unknown(m, "b", 250.0, 100.0);
    const VarId c3 = add_unknown(m, "c", 2e5, 1e5);
    m.add_equation("f0", [=](const EvalContext& c) { return std::sin(c(a)) * c(b) / 100.0 + std::log(c(c3) / 1e5); });
    m.add_equation("f1", [=](const EvalContext& c) { return c(a) * c(a) * c(a) - std::sqrt(c(b) * c(c3)) / 5e3; });
    m.add_equation("f2", [=](const EvalContext& c) { return std::exp(c(a)) * c(c3) / c(b) / 1e3; });
    const FlatProblem p = assemble_initialization_problem(m);
    std::uniform_real_distribution<double> spread(0.5, 2.0);
    double fd = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> values = p.values;
        values[a.index()] = 1.3 * spread(rng);
        values[b.index()] = 250.0 * spread(rng);
        values[c3.index()] = 2e5 * spread(rng);
        const auto J = fd_jacobian(whole_system(p), p, values, 1.0);
        for (std::size_t i = 0; i < 3; ++i) {
            double row = 0.0;
            for (std::size_t k = 0; k < 3; ++k)
                row = std::max(row, std::abs(J[i * 3 + k]) * p.variables[p.unknowns[k].index()].nominal);
            for (std::size_t j = 0; j < 3; ++j) {
                const VarId v = p.unknowns[j];
                const double x0 = values[v.index()];
                const double nom = p.variables[v.index()].nominal;
                const double h = std::exp2(std::round(std::log2(1e-6 * std::max(std::abs(x0), nom))));
                auto vp = values, vm = values;
                vp[v.index()] = x0 + h;
                vm[v.index()] = x0 - h;
                const double central = (evaluate_equation(p, i, vp, 1.0) - evaluate_equation(p, i, vm, 1.0)) / (2 * h);
                fd = std::max(fd, std::abs(J[i * 3 + j] - central) * nom / row);
            }
        }
    }
    const bool pass = affine_max == 1 && rescale <= 10.0 * cfg.residual_tol && fd <= 1e-5;
    return {pass, fmt("affine systems (50, n = 2..10): max %d iteration; nominal x1e3 changes solution by %.1e "
                      "(limit %.0e); forward vs central differences %.1e (row-relative)",
                      affine_max, rescale, 10.0 * cfg.residual_tol, fd)};
}

Outcome negative_controls() {
    std::string detail;
    bool singular_ok = false;
    FlatModel flat = flatten(build_demo_plant());
    flat.model.remove_equation("compressor.power");
    try {
        (void)assemble_initialization_problem(flat.model);
        detail = "removed equation not detected; ";
    } catch (const StructuralSingularity& e) {
        const auto& vars = e.unmatched_variables();
        singular_ok = std::find(vars.begin(), vars.end(), "compressor.power") != vars.end();
        detail = fmt("removing compressor.power -> StructuralSingularity naming %s; ",
                     vars.empty() ? "nothing" : vars.front().c_str());
    }

    bool stalled_ok = false;
    Model m;
    const VarId x = add_unknown(m, "x", 1.0);
    m.add_equation("fold", [=](const EvalContext& c) {
        return c.homotopy([&] { return c(x) * c(x) + 1.0; }, [&] { return c(x) * c(x) - 1.0; });
    });
    const FlatProblem p = assemble_initialization_problem(m);
    HomotopySchedule schedule;
    schedule.min_step = 1e-3;
    try {
        (void)continuation(p, schedule, {});
        detail += "turning point passed without error";
    } catch (const HomotopyStalled& e) {
        const std::string what = e.what();
        stalled_ok = what.find("homotopy stalled") != std::string::npos;
        detail += fmt("turning point -> \"%s\" at lambda %.4f", what.substr(0, 40).c_str(), e.trace().lambdas().back());
    } catch (const std::exception& e) {
        detail += std::string("turning point -> unexpected ") + e.what();
    }
    return {singular_ok && stalled_ok, detail};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "homotopy endpoints", 1.0, homotopy_endpoints},
        {2, "strong-component splitting", 5.0, strong_component_splitting},
        {3, "forward on-design initialization", 30.0, forward_on_design},
        {4, "forward/backward round trip", 0.0, round_trip},
        {5, "backward off-design at 80 % load", 0.0, backward_off_design},
        {6, "scenario equivalence", 0.0, scenario_equivalence},
        {7, "conservation suite", 0.0, conservation},
        {8, "oracle equivalences", 0.0, oracle_equivalences},
        {9, "solver properties", 0.0, solver_properties},
        {10, "negative controls", 0.0, negative_controls},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        if (c.time_limit > 0.0 && seconds >= c.time_limit) {
            o.pass = false;
            o.detail += fmt(" [exceeded %.0f s]", c.time_limit);
        }
        if (!o.pass) ++failed;
        std::printf("criterion %2d %s  %s: %s (%.2f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.title.c_str(),
                    o.detail.c_str(), seconds);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}

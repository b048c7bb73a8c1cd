#include "ssinit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

namespace ssinit {

void SolverConfig::validate() const {
    if (!(residual_tol > 0.0) || !(step_tol > 0.0)) throw ConfigError("solver tolerances must be positive");
    if (max_iterations <= 0) throw ConfigError("max_iterations must be positive");
    if (!(contraction > 0.0 && contraction < 1.0)) throw ConfigError("line-search contraction must lie in (0, 1)");
    if (max_halvings < 0) throw ConfigError("max_halvings must be non-negative");
}

void HomotopySchedule::validate() const {
    if (!(min_step > 0.0 && min_step <= initial_step && initial_step <= 1.0)) {
        throw ConfigError("homotopy schedule requires 0 < min_step <= initial_step <= 1");
    }
    if (!(growth > 1.0)) throw ConfigError("homotopy growth factor must exceed 1");
    if (!(shrink > 0.0 && shrink < 1.0)) throw ConfigError("homotopy shrink factor must lie in (0, 1)");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double fd_step(double x, double nominal) {
    const double h = 1e-7 * std::max(std::abs(x), nominal);
    return std::exp2(std::round(std::log2(h)));
}

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double two_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

const std::string& var_name(const FlatProblem& p, VarId v) { return p.variables[v.index()].name; }

// Column lists: for each local variable, the local rows whose incidence contains it.
std::vector<std::vector<std::size_t>> column_rows(const std::vector<std::size_t>& equations,
                                                  const std::vector<VarId>& variables, const FlatProblem& p) {
    std::vector<std::pair<VarId, std::size_t>> sorted;
    sorted.reserve(variables.size());
    for (std::size_t j = 0; j < variables.size(); ++j) sorted.emplace_back(variables[j], j);
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::vector<std::size_t>> cols(variables.size());
    for (std::size_t i = 0; i < equations.size(); ++i) {
        for (VarId v : p.incidence(equations[i], LambdaRegime::Full)) {
            const auto it = std::lower_bound(sorted.begin(), sorted.end(), std::make_pair(v, std::size_t{0}));
            if (it != sorted.end() && it->first == v) cols[it->second].push_back(i);
        }
    }
    return cols;
}

double nominal_of(const FlatProblem& p, const Scaling& s, VarId v) {
    const int pos = p.unknown_pos[v.index()];
    return pos >= 0 && !s.unknown_nominal.empty() ? s.unknown_nominal[pos] : p.variables[v.index()].nominal;
}

// Scalar solve of one equation for one variable (causal assignment inside a torn component).
void solve_assignment(const FlatProblem& p, const Scaling& s, std::vector<double>& values, std::size_t eq, VarId v,
                      double lambda, const SolverConfig& cfg) {
    const double row = s.row_scale[eq];
    const double nom = nominal_of(p, s, v);
    const auto& d = p.variables[v.index()];
    double& x = values[v.index()];
    double r = evaluate_equation(p, eq, values, lambda) / row;
    const double tight = 1e-3 * cfg.residual_tol;
    for (int it = 0; it < cfg.max_iterations && std::abs(r) > tight; ++it) {
        const double x0 = x;
        double h = fd_step(x0, nom);
        if (x0 + h > d.max) h = -h;
        x = x0 + h;
        const double dr = (evaluate_equation(p, eq, values, lambda) / row - r) / ((x0 + h) - x0);
        if (!(std::isfinite(dr)) || dr == 0.0) {
            x = x0;
            throw EvaluationError("zero or non-finite derivative of '" + p.equations[eq].name + "' with respect to '" +
                                      d.name + "'",
                                  p.equations[eq].name);
        }
        const double dx = -r / dr;
        double alpha = 1.0;
        bool accepted = false;
        for (int k = 0; k <= cfg.max_halvings; ++k) {
            x = std::clamp(x0 + alpha * dx, d.min, d.max);
            double rn = kInf;
            try {
                rn = evaluate_equation(p, eq, values, lambda) / row;
            } catch (const EvaluationError&) {
            }
            if (std::abs(rn) < std::abs(r)) {
                r = rn;
                accepted = true;
                break;
            }
            alpha *= cfg.contraction;
        }
        if (!accepted) {
            x = x0;
            break;
        }
        if (std::abs(alpha * dx) <= 1e-15 * std::max(std::abs(x), nom)) break;
    }
    if (std::abs(r) > cfg.residual_tol) {
        throw ConvergenceFailure("assignment of '" + d.name + "' from '" + p.equations[eq].name + "' did not converge",
                                 {x}, {r});
    }
}

// Residual rows and Jacobian of a component in scaled coordinates.
class ComponentSystem {
public:
    ComponentSystem(const StrongComponent& c, const FlatProblem& p, const Scaling& s, double lambda,
                    const SolverConfig& cfg)
        : c_(c), p_(p), s_(s), lambda_(lambda), cfg_(cfg), torn_(cfg.use_tearing && c.torn()) {
        vars_ = torn_ ? c.tearing_variables : c.variables;
        rows_ = torn_ ? c.torn_equations : c.equations;
        for (VarId v : vars_) nominal_.push_back(nominal_of(p, s, v));
        if (!torn_) cols_ = column_rows(rows_, vars_, p);
    }

    std::size_t size() const { return vars_.size(); }
    const std::vector<VarId>& variables() const { return vars_; }
    double nominal(std::size_t j) const { return nominal_[j]; }

    std::vector<double> residuals(std::vector<double>& values) const {
        if (torn_) {
            for (const auto& a : c_.assignments) solve_assignment(p_, s_, values, a.equation, a.variable, lambda_, cfg_);
        }
        std::vector<double> r(rows_.size());
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            r[i] = evaluate_equation(p_, rows_[i], values, lambda_) / s_.row_scale[rows_[i]];
        }
        return r;
    }

    Eigen::MatrixXd jacobian(std::vector<double>& values, const std::vector<double>& r0) const {
        const std::size_t n = size();
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        std::vector<double> saved;
        if (torn_) {
            for (VarId v : c_.variables) saved.push_back(values[v.index()]);
        }
        for (std::size_t j = 0; j < n; ++j) {
            const VarId v = vars_[j];
            const auto& d = p_.variables[v.index()];
            const double x0 = values[v.index()];
            double h = fd_step(x0, nominal_[j]);
            if (x0 + h > d.max) h = -h;
            const double dx = (x0 + h) - x0;
            values[v.index()] = x0 + h;
            if (torn_) {
                std::vector<double> r1;
                try {
                    r1 = residuals(values);
                } catch (const Error& e) {
                    restore(values, saved);
                    throw EvaluationError(std::string("Jacobian column '") + d.name + "': " + e.what());
                }
                for (std::size_t i = 0; i < n; ++i) set_entry(J, i, j, (r1[i] - r0[i]) / dx, v);
                restore(values, saved);
            } else {
                for (std::size_t i : cols_[j]) {
                    double r1 = 0.0;
                    try {
                        r1 = evaluate_equation(p_, rows_[i], values, lambda_) / s_.row_scale[rows_[i]];
                    } catch (const EvaluationError& e) {
                        values[v.index()] = x0;
                        throw EvaluationError("Jacobian entry (" + p_.equations[rows_[i]].name + ", " + d.name +
                                                  "): " + e.what(),
                                              p_.equations[rows_[i]].name);
                    }
                    set_entry(J, i, j, (r1 - r0[i]) / dx, v);
                }
                values[v.index()] = x0;
            }
        }
        return J;
    }

private:
    void restore(std::vector<double>& values, const std::vector<double>& saved) const {
        for (std::size_t k = 0; k < c_.variables.size(); ++k) values[c_.variables[k].index()] = saved[k];
    }

    void set_entry(Eigen::MatrixXd& J, std::size_t i, std::size_t j, double value, VarId v) const {
        if (!std::isfinite(value)) {
            throw EvaluationError("non-finite Jacobian entry (" + p_.equations[rows_[i]].name + ", " +
                                      var_name(p_, v) + ")",
                                  p_.equations[rows_[i]].name);
        }
        // Scaled coordinates: column times the variable nominal.
        J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = value * nominal_[j];
    }

    const StrongComponent& c_;
    const FlatProblem& p_;
    const Scaling& s_;
    double lambda_;
    const SolverConfig& cfg_;
    bool torn_;
    std::vector<VarId> vars_;
    std::vector<std::size_t> rows_;
    std::vector<double> nominal_;
    std::vector<std::vector<std::size_t>> cols_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Scaling

Scaling scale(const FlatProblem& problem, std::span<const double> x0, double lambda) {
    Scaling s;
    const std::size_t n = problem.size();
    s.unknown_nominal.resize(n);
    for (std::size_t j = 0; j < n; ++j) s.unknown_nominal[j] = problem.variables[problem.unknowns[j].index()].nominal;

    std::vector<double> values = problem.values;
    problem.scatter(x0, values);
    const std::size_t m = problem.equations.size();
    std::vector<double> r0(m);
    for (std::size_t i = 0; i < m; ++i) r0[i] = evaluate_equation(problem, i, values, lambda);

    std::vector<std::size_t> all_rows(m);
    for (std::size_t i = 0; i < m; ++i) all_rows[i] = i;
    const auto cols = column_rows(all_rows, problem.unknowns, problem);
    std::vector<double> row_max(m, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const VarId v = problem.unknowns[j];
        const double xj = values[v.index()];
        double h = fd_step(xj, s.unknown_nominal[j]);
        if (xj + h > problem.variables[v.index()].max) h = -h;
        const double dx = (xj + h) - xj;
        values[v.index()] = xj + h;
        for (std::size_t i : cols[j]) {
            double r1 = r0[i];
            try {
                r1 = evaluate_equation(problem, i, values, lambda);
            } catch (const EvaluationError&) {
                s.diagnostics.push_back("scaling: cannot perturb '" + var_name(problem, v) + "' in '" +
                                        problem.equations[i].name + "'");
            }
            const double d = std::abs((r1 - r0[i]) / dx) * s.unknown_nominal[j];
            if (std::isfinite(d)) row_max[i] = std::max(row_max[i], d);
        }
        values[v.index()] = xj;
    }
    s.row_scale.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double nom = problem.equations[i].nominal_residual;
        if (row_max[i] == 0.0) {
            s.diagnostics.push_back("scaling: zero Jacobian row for '" + problem.equations[i].name +
                                    "', using nominal residual");
        }
        s.row_scale[i] = std::max(nom, row_max[i]);
    }
    return s;
}

double scaled_residual_norm(const FlatProblem& problem, const Scaling& scaling, std::span<const double> x,
                            double lambda) {
    const auto r = residual_eval(problem, x, lambda);
    double m = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) m = std::max(m, std::abs(r[i]) / scaling.row_scale[i]);
    return m;
}

// ---------------------------------------------------------------------------
// Newton

std::vector<double> fd_jacobian(const StrongComponent& component, const FlatProblem& problem,
                                std::span<const double> values, double lambda) {
    Scaling unit;
    unit.row_scale.assign(problem.equations.size(), 1.0);
    unit.unknown_nominal.assign(problem.size(), 1.0);
    for (std::size_t j = 0; j < problem.size(); ++j) {
        unit.unknown_nominal[j] = problem.variables[problem.unknowns[j].index()].nominal;
    }
    SolverConfig cfg;
    ComponentSystem sys(component, problem, unit, lambda, cfg);
    std::vector<double> vals(values.begin(), values.end());
    const auto r0 = sys.residuals(vals);
    const Eigen::MatrixXd J = sys.jacobian(vals, r0);
    std::vector<double> out(static_cast<std::size_t>(J.size()));
    const auto n = static_cast<std::size_t>(J.cols());
    for (std::size_t i = 0; i < static_cast<std::size_t>(J.rows()); ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            out[i * n + j] = J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) / sys.nominal(j);
        }
    }
    return out;
}

StrongComponent whole_system(const FlatProblem& problem) {
    StrongComponent c;
    for (std::size_t i = 0; i < problem.equations.size(); ++i) c.equations.push_back(i);
    c.variables = problem.unknowns;
    return c;
}

NewtonStats newton_solve(const StrongComponent& component, const FlatProblem& problem, const Scaling& scaling,
                         std::vector<double>& values, double lambda, const SolverConfig& config) {
    ComponentSystem sys(component, problem, scaling, lambda, config);
    const std::size_t n = sys.size();
    NewtonStats st;

    auto gather = [&] {
        std::vector<double> x(n);
        for (std::size_t j = 0; j < n; ++j) x[j] = values[sys.variables()[j].index()];
        return x;
    };
    auto put = [&](const std::vector<double>& x) {
        for (std::size_t j = 0; j < n; ++j) values[sys.variables()[j].index()] = x[j];
    };
    auto fail = [&](const std::string& why) -> ConvergenceFailure {
        std::ostringstream os;
        os << why << " after " << st.iterations << " iterations (residual " << st.residual_norm << ")";
        return ConvergenceFailure(os.str(), gather(), st.residual_history);
    };

    std::vector<double> r = sys.residuals(values);
    st.residual_norm = inf_norm(r);
    st.residual_history.push_back(st.residual_norm);
    if (st.residual_norm <= config.residual_tol) return st;

    std::vector<double> best_x = gather();
    double best_norm = st.residual_norm;

    while (st.iterations < config.max_iterations) {
        ++st.iterations;
        const Eigen::MatrixXd J = sys.jacobian(values, r);
        ++st.jacobian_evaluations;
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) rhs(static_cast<Eigen::Index>(i)) = -r[i];
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu = J.partialPivLu();
        Eigen::VectorXd dz = lu.solve(rhs);
        bool rank_deficient = false;
        if (!dz.allFinite()) {
            // Rank-deficient Jacobian: basic solution of the full-pivoting factorization.
            dz = J.fullPivLu().solve(rhs);
            rank_deficient = true;
        }
        if (!dz.allFinite()) {
            put(best_x);
            throw fail("singular Jacobian");
        }

        const std::vector<double> x0 = gather();
        const double norm0 = two_norm(r);
        double alpha = 1.0;
        bool accepted = false;
        std::vector<double> trial_best_x;
        std::vector<double> trial_best_r;
        double trial_best = kInf;
        for (int k = 0; k <= config.max_halvings; ++k) {
            std::vector<double> xt(n);
            bool clipped = false;
            for (std::size_t j = 0; j < n; ++j) {
                const auto& d = problem.variables[sys.variables()[j].index()];
                const double raw = x0[j] + alpha * dz(static_cast<Eigen::Index>(j)) * sys.nominal(j);
                xt[j] = std::clamp(raw, d.min, d.max);
                clipped = clipped || xt[j] != raw;
            }
            if (clipped) ++st.damping_events;
            put(xt);
            std::vector<double> rt;
            double nt = kInf;
            try {
                rt = sys.residuals(values);
                nt = two_norm(rt);
            } catch (const Error&) {
            }
            if (nt < trial_best) {
                trial_best = nt;
                trial_best_x = xt;
                trial_best_r = rt;
            }
            if (nt < norm0) {
                accepted = true;
                break;
            }
            alpha *= config.contraction;
            ++st.damping_events;
        }
        if (!accepted) {
            if (!std::isfinite(trial_best)) {
                put(best_x);
                throw fail("line search found no evaluable point");
            }
            put(trial_best_x);
            // Re-run so that causal assignments match the chosen point.
            (void)sys.residuals(values);
            r = trial_best_r;
        } else {
            r = sys.residuals(values);
        }
        // Chord correction with the same factorization (removes finite-difference noise on affine rows).
        if (accepted && !rank_deficient && inf_norm(r) > config.residual_tol) {
            const std::vector<double> x1 = gather();
            for (std::size_t i = 0; i < n; ++i) rhs(static_cast<Eigen::Index>(i)) = -r[i];
            const Eigen::VectorXd dc = lu.solve(rhs);
            if (dc.allFinite()) {
                std::vector<double> xc(n);
                for (std::size_t j = 0; j < n; ++j) {
                    const auto& d = problem.variables[sys.variables()[j].index()];
                    xc[j] = std::clamp(x1[j] + dc(static_cast<Eigen::Index>(j)) * sys.nominal(j), d.min, d.max);
                }
                put(xc);
                std::vector<double> rc;
                double nc = kInf;
                try {
                    rc = sys.residuals(values);
                    nc = two_norm(rc);
                } catch (const Error&) {
                }
                if (nc < two_norm(r)) {
                    r = std::move(rc);
                } else {
                    put(x1);
                    (void)sys.residuals(values);
                }
            }
        }

        double step = 0.0;
        const std::vector<double> x1 = gather();
        for (std::size_t j = 0; j < n; ++j) step = std::max(step, std::abs(x1[j] - x0[j]) / sys.nominal(j));
        st.step_norm = step;
        st.residual_norm = inf_norm(r);
        st.residual_history.push_back(st.residual_norm);
        if (st.residual_norm < best_norm) {
            best_norm = st.residual_norm;
            best_x = x1;
        }
        if (st.residual_norm <= config.residual_tol) return st;
        if (step <= config.step_tol && st.residual_norm <= 1e2 * config.residual_tol) return st;
    }
    put(best_x);
    (void)sys.residuals(values);
    throw fail("maximum iterations exceeded");
}

// ---------------------------------------------------------------------------
// Sequence

std::vector<double> solve_sequence(const BltOrdering& ordering, const FlatProblem& problem,
                                   std::span<const double> starts, double lambda, const SolverConfig& config,
                                   const Scaling& scaling, SequenceStats* stats) {
    std::vector<double> values = problem.values;
    problem.scatter(starts, values);
    SequenceStats local;
    for (std::size_t k = 0; k < ordering.components.size(); ++k) {
        const auto& c = ordering.components[k];
        try {
            NewtonStats st = newton_solve(c, problem, scaling, values, lambda, config);
            local.total_iterations += st.iterations;
            local.max_component_iterations = std::max(local.max_component_iterations, st.iterations);
            local.damping_events += st.damping_events;
            local.components.push_back(std::move(st));
        } catch (const ConvergenceFailure& e) {
            std::ostringstream os;
            os << "component " << k << " {";
            for (std::size_t i = 0; i < c.equations.size() && i < 8; ++i) {
                os << (i ? ", " : "") << problem.equations[c.equations[i]].name;
            }
            if (c.equations.size() > 8) os << ", ...";
            os << "}: " << e.what();
            std::vector<double> best(problem.size());
            for (std::size_t j = 0; j < problem.size(); ++j) best[j] = values[problem.unknowns[j].index()];
            throw ConvergenceFailure(os.str(), std::move(best), e.residual_history());
        } catch (const EvaluationError& e) {
            std::ostringstream os;
            os << "component " << k << ": " << e.what();
            throw EvaluationError(os.str(), e.equation());
        }
    }
    std::vector<double> x(problem.size());
    for (std::size_t j = 0; j < problem.size(); ++j) x[j] = values[problem.unknowns[j].index()];
    local.residual_norm = scaled_residual_norm(problem, scaling, x, lambda);
    if (stats != nullptr) *stats = std::move(local);
    return x;
}

std::vector<double> solve_sequence(const BltOrdering& ordering, const FlatProblem& problem,
                                   std::span<const double> starts, double lambda, const SolverConfig& config) {
    const Scaling s = scale(problem, starts, lambda);
    return solve_sequence(ordering, problem, starts, lambda, config, s);
}

// ---------------------------------------------------------------------------
// Continuation

std::vector<double> HomotopyTrace::lambdas() const {
    std::vector<double> out;
    out.reserve(steps.size());
    for (const auto& s : steps) out.push_back(s.lambda);
    return out;
}

namespace {

HomotopyStep record(double lambda, const SequenceStats& st) {
    return {lambda, st.total_iterations, st.max_component_iterations, st.damping_events, st.residual_norm};
}

}  // namespace

HomotopyTrace continuation(const FlatProblem& problem, const HomotopySchedule& schedule, const SolverConfig& config,
                           const ContinuationOptions& options) {
    config.validate();
    schedule.validate();
    HomotopyTrace trace;
    const std::vector<double> x0 = options.start.empty() ? problem.start_vector() : options.start;
    if (x0.size() != problem.size()) throw DomainError("continuation: start vector has wrong size");

    trace.scaling = scale(problem, x0, 0.0);
    trace.blt_simplified = blt_decompose(problem, LambdaRegime::Simplified);
    trace.blt_full = blt_decompose(problem, LambdaRegime::Full);
    tear_all(trace.blt_simplified, problem);
    tear_all(trace.blt_full, problem);

    SequenceStats st;
    if (options.direct) {
        try {
            auto x = solve_sequence(trace.blt_full, problem, x0, 1.0, config, trace.scaling, &st);
            trace.steps.push_back(record(1.0, st));
            trace.snapshots.push_back(std::move(x));
            trace.direct = true;
            return trace;
        } catch (const ConvergenceFailure& e) {
            trace.rejected.push_back({1.0, e.what()});
        } catch (const EvaluationError& e) {
            trace.rejected.push_back({1.0, e.what()});
        }
    }

    std::vector<double> x = solve_sequence(trace.blt_simplified, problem, x0, 0.0, config, trace.scaling, &st);
    trace.steps.push_back(record(0.0, st));
    trace.snapshots.push_back(x);

    // Homotopy-free (or already consistent) problems need no intermediate steps.
    try {
        const double r1 = scaled_residual_norm(problem, trace.scaling, x, 1.0);
        if (r1 <= config.residual_tol) {
            SequenceStats done;
            done.residual_norm = r1;
            trace.steps.push_back(record(1.0, done));
            trace.snapshots.push_back(x);
            return trace;
        }
    } catch (const EvaluationError&) {
    }

    double lambda = 0.0;
    double step = schedule.initial_step;
    while (lambda < 1.0) {
        const double target = std::min(1.0, lambda + step);
        try {
            auto xn = solve_sequence(trace.blt_full, problem, x, target, config, trace.scaling, &st);
            x = std::move(xn);
            lambda = target;
            trace.steps.push_back(record(lambda, st));
            trace.snapshots.push_back(x);
            if (st.max_component_iterations <= config.max_iterations / 3) step *= schedule.growth;
        } catch (const Error& e) {
            if (dynamic_cast<const ConvergenceFailure*>(&e) == nullptr &&
                dynamic_cast<const EvaluationError*>(&e) == nullptr) {
                throw;
            }
            trace.rejected.push_back({target, e.what()});
            step *= schedule.shrink;
            if (step < schedule.min_step) {
                std::ostringstream os;
                os << "homotopy stalled: possible singularity near lambda = " << lambda << " (step " << step
                   << " below minimum " << schedule.min_step << ")";
                throw HomotopyStalled(os.str(), std::move(trace));
            }
        }
    }
    return trace;
}

std::vector<double> resolved_values(const FlatProblem& problem, std::span<const double> x) {
    std::vector<double> values = problem.values;
    problem.scatter(x, values);
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[problem.representative[i].index()];
    return out;
}

// ---------------------------------------------------------------------------
// Verification

VerificationResult verify_steady_state(const Model& model, std::span<const double> values, double horizon, double dt,
                                       const SolverConfig& config) {
    if (!(dt > 0.0) || !(horizon >= 0.0)) throw VerificationError("verification needs dt > 0 and horizon >= 0");
    if (values.size() != model.variables().size()) throw VerificationError("verification values have wrong size");

    Model sim = model;
    std::vector<double> vals(values.begin(), values.end());
    std::vector<VarId> states;
    std::vector<VarId> previous;
    for (std::size_t i = 0; i < model.variables().size(); ++i) {
        const auto& d = model.variables()[i];
        if (!d.derivative_of) continue;
        const VarId s = *d.derivative_of;
        const VarId der = var_id(i);
        VariableDescriptor prev;
        prev.name = "previous(" + model.variable(s).name + ")";
        prev.nominal = model.variable(s).nominal;
        prev.start = vals[s.index()];
        prev.role = VariableRole::FixedParameter;
        prev.kind = model.variable(s).kind;
        const VarId pv = sim.add_variable(prev);
        vals.push_back(prev.start);
        sim.add_equation(
            "euler(" + model.variable(s).name + ")",
            [s, der, pv, dt](const EvalContext& c) { return c(der) - (c(s) - c(pv)) / dt; },
            EquationPhase::SimulationOnly, model.variable(s).nominal / dt);
        states.push_back(s);
        previous.push_back(pv);
    }
    for (std::size_t i = 0; i < model.variables().size(); ++i) {
        if (model.variables()[i].role == VariableRole::State &&
            std::find(states.begin(), states.end(), var_id(i)) == states.end()) {
            throw VerificationError("state '" + model.variables()[i].name + "' has no derivative variable");
        }
    }

    AssemblyOptions opt;
    opt.phase = Phase::Simulation;
    opt.values = vals;
    FlatProblem p;
    BltOrdering blt;
    try {
        p = assemble(sim, opt);
        blt = blt_decompose(p, LambdaRegime::Full);
    } catch (const Error& e) {
        throw VerificationError(std::string("simulation problem is not solvable: ") + e.what());
    }

    std::vector<double> x = p.start_vector();
    const Scaling scaling = scale(p, x, 1.0);
    std::vector<double> x0(states.size());
    for (std::size_t k = 0; k < states.size(); ++k) x0[k] = p.value_of(states[k]);

    VerificationResult result;
    const int steps = static_cast<int>(std::ceil(horizon / dt - 1e-9));
    SequenceStats st;
    for (int n = 0; n < steps; ++n) {
        for (std::size_t k = 0; k < states.size(); ++k) {
            std::vector<double> full = p.values;
            p.scatter(x, full);
            p.values[previous[k].index()] = full[p.representative[states[k].index()].index()];
        }
        try {
            x = solve_sequence(blt, p, x, 1.0, config, scaling, &st);
        } catch (const Error& e) {
            std::ostringstream os;
            os << "implicit Euler step " << n + 1 << " failed: " << e.what();
            throw VerificationError(os.str());
        }
        result.newton_iterations += st.total_iterations;
        ++result.steps;
        const auto full = resolved_values(p, x);
        for (std::size_t k = 0; k < states.size(); ++k) {
            const double ref = std::max(std::abs(x0[k]), model.variable(states[k]).nominal);
            const double d = std::abs(full[states[k].index()] - x0[k]) / ref;
            if (d > result.drift) {
                result.drift = d;
                result.worst_state = model.variable(states[k]).name;
            }
        }
    }
    return result;
}

}  // namespace ssinit

#pragma once

// Scaled damped Newton on strong components, sequential BLT solution,
// adaptive homotopy continuation and steady-state verification.

#include <span>
#include <string>
#include <vector>

#include "ssinit/eqsys.hpp"
#include "ssinit/structure.hpp"

namespace ssinit {

struct SolverConfig {
    double residual_tol = 1e-8;
    double step_tol = 1e-10;
    int max_iterations = 50;
    double contraction = 0.5;
    int max_halvings = 10;
    /// Iterate only on tearing variables inside torn components.
    bool use_tearing = false;

    /// Throws ConfigError on invalid settings.
    void validate() const;
};

struct HomotopySchedule {
    double initial_step = 0.1;
    double growth = 2.0;
    double shrink = 0.5;
    double min_step = 1e-4;

    void validate() const;
};

/// Change of coordinates: unknown i is divided by unknown_nominal[i], residual row e by row_scale[e].
struct Scaling {
    std::vector<double> unknown_nominal;
    std::vector<double> row_scale;
    std::vector<std::string> diagnostics;
};

/// Nominal scaling of unknowns; rows scaled by max(nominal_residual, |J diag(nominal)| row inf-norm) at x0.
Scaling scale(const FlatProblem& problem, std::span<const double> x0, double lambda = 0.0);

/// Scaled residual inf-norm of the whole problem at unknown vector x.
double scaled_residual_norm(const FlatProblem& problem, const Scaling& scaling, std::span<const double> x,
                            double lambda);

struct NewtonStats {
    int iterations = 0;
    int damping_events = 0;
    int jacobian_evaluations = 0;
    double residual_norm = 0.0;
    double step_norm = 0.0;
    std::vector<double> residual_history;
};

/// Solves one strong component in place on the full values vector (indexed by variable id).
/// Throws ConvergenceFailure, or EvaluationError for non-finite Jacobian entries.
NewtonStats newton_solve(const StrongComponent& component, const FlatProblem& problem, const Scaling& scaling,
                         std::vector<double>& values, double lambda, const SolverConfig& config);

/// Forward-difference Jacobian of the component rows with respect to its variables, unscaled.
/// Row-major: rows follow component.equations, columns follow component.variables.
std::vector<double> fd_jacobian(const StrongComponent& component, const FlatProblem& problem,
                                std::span<const double> values, double lambda);

/// Whole problem as a single component.
StrongComponent whole_system(const FlatProblem& problem);

struct SequenceStats {
    std::vector<NewtonStats> components;
    int total_iterations = 0;
    int max_component_iterations = 0;
    int damping_events = 0;
    double residual_norm = 0.0;
};

/// Solves the components in order; returns the unknown vector.
std::vector<double> solve_sequence(const BltOrdering& ordering, const FlatProblem& problem,
                                   std::span<const double> starts, double lambda, const SolverConfig& config,
                                   const Scaling& scaling, SequenceStats* stats = nullptr);

std::vector<double> solve_sequence(const BltOrdering& ordering, const FlatProblem& problem,
                                   std::span<const double> starts, double lambda, const SolverConfig& config = {});

struct HomotopyStep {
    double lambda = 0.0;
    int iterations = 0;
    int max_component_iterations = 0;
    int damping_events = 0;
    double residual_norm = 0.0;
};

struct RejectedStep {
    double lambda = 0.0;
    std::string reason;
};

struct HomotopyTrace {
    std::vector<HomotopyStep> steps;
    std::vector<std::vector<double>> snapshots;
    std::vector<RejectedStep> rejected;
    BltOrdering blt_simplified;
    BltOrdering blt_full;
    Scaling scaling;
    bool direct = false;

    std::vector<double> lambdas() const;
    const std::vector<double>& solution() const { return snapshots.back(); }
    bool complete() const noexcept { return !steps.empty() && steps.back().lambda == 1.0; }
};

/// Continuation gave up because the step fell below the minimum.
class HomotopyStalled : public Error {
public:
    HomotopyStalled(const std::string& what, HomotopyTrace trace) : Error(what), trace_(std::move(trace)) {}
    const HomotopyTrace& trace() const noexcept { return trace_; }

private:
    HomotopyTrace trace_;
};

struct ContinuationOptions {
    /// Try lambda = 1 from the start vector before falling back to the full path.
    bool direct = false;
    /// Unknown vector to start from; the problem's start vector when empty.
    std::vector<double> start;
};

HomotopyTrace continuation(const FlatProblem& problem, const HomotopySchedule& schedule, const SolverConfig& config,
                           const ContinuationOptions& options = {});

/// Value of every model variable, with aliases and eliminated constants resolved.
std::vector<double> resolved_values(const FlatProblem& problem, std::span<const double> x);

struct VerificationResult {
    double drift = 0.0;
    std::string worst_state;
    int steps = 0;
    int newton_iterations = 0;
};

/// Implicit Euler on the simulation-phase equations from `values` (one per model variable).
/// Throws VerificationError when a step cannot be solved.
VerificationResult verify_steady_state(const Model& model, std::span<const double> values, double horizon, double dt,
                                       const SolverConfig& config = {});

}  // namespace ssinit

#pragma once

// Flat representation of an initialization problem: variables, residual
// equations with homotopy pairs, and phase-dependent assembly with the
// structural eliminations (constants, aliases, zero-derivative propagation).

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <unordered_map>
#include <variant>
#include <vector>

#include "ssinit/errors.hpp"

namespace ssinit {

struct VarId {
    std::uint32_t value = 0;

    constexpr std::size_t index() const noexcept { return value; }
    friend constexpr auto operator<=>(VarId, VarId) = default;
};

inline constexpr VarId var_id(std::size_t i) noexcept { return VarId{static_cast<std::uint32_t>(i)}; }

enum class VariableRole { State, Algebraic, FixedParameter, UnknownParameter };

/// Physical kind of a variable; drives tearing preferences and reporting.
enum class VariableKind {
    Pressure,
    Temperature,
    Composition,
    Current,
    MassFlow,
    Enthalpy,
    Voltage,
    Power,
    HeatFlow,
    Derivative,
    Signal,
    Other,
};

std::string_view to_string(VariableRole role) noexcept;
std::string_view to_string(VariableKind kind) noexcept;

struct VariableDescriptor {
    std::string name;
    double nominal = 1.0;
    double start = 0.0;
    double min = -std::numeric_limits<double>::infinity();
    double max = std::numeric_limits<double>::infinity();
    VariableRole role = VariableRole::Algebraic;
    VariableKind kind = VariableKind::Other;
    std::string unit;
    /// Set on derivative variables: the state they differentiate.
    std::optional<VarId> derivative_of;
};

/// Throws ModelError if nominal <= 0 or start lies outside [min, max].
void validate(const VariableDescriptor& v);

/// Blend of an actual expression and its simplified counterpart.
/// Throws DomainError when lambda is outside [0, 1].
double homotopy_combine(double actual, double simplified, double lambda);

enum class HomotopyMode { Blend, Simplified, Actual };

struct IncidenceRecorder {
    std::vector<VarId> reads;
    int homotopy_calls = 0;
};

/// Read-only view handed to residual evaluators.
class EvalContext {
public:
    EvalContext(std::span<const double> values, std::span<const VarId> representative, double lambda,
                HomotopyMode mode = HomotopyMode::Blend, IncidenceRecorder* recorder = nullptr) noexcept
        : values_(values), rep_(representative), lambda_(lambda), mode_(mode), recorder_(recorder) {}

    double operator()(VarId v) const {
        if (recorder_ != nullptr) recorder_->reads.push_back(v);
        return values_[rep_[v.index()].index()];
    }

    double lambda() const noexcept {
        switch (mode_) {
            case HomotopyMode::Simplified: return 0.0;
            case HomotopyMode::Actual: return 1.0;
            case HomotopyMode::Blend: break;
        }
        return lambda_;
    }

    /// Modelica-style homotopy(actual, simplified). Arguments may be values or
    /// nullary callables; callables are evaluated only where their weight is nonzero.
    template <class A, class S>
    double homotopy(A&& actual, S&& simplified) const {
        if (recorder_ != nullptr) ++recorder_->homotopy_calls;
        const double l = lambda();
        if (l == 0.0) return eval(simplified);
        if (l == 1.0) return eval(actual);
        return homotopy_combine(eval(actual), eval(simplified), l);
    }

private:
    template <class T>
    static double eval(T&& t) {
        if constexpr (std::is_invocable_v<T>) {
            return static_cast<double>(t());
        } else {
            return static_cast<double>(t);
        }
    }

    std::span<const double> values_;
    std::span<const VarId> rep_;
    double lambda_;
    HomotopyMode mode_;
    IncidenceRecorder* recorder_;
};

using Residual = std::function<double(const EvalContext&)>;

enum class EquationPhase { InitialOnly, SimulationOnly, Both };

/// Structural hints that let assembly eliminate trivial equations symbolically.
namespace tag {
/// residual = var - value
struct FixConstant {
    VarId var;
    double value;
};
/// residual = a - b
struct Alias {
    VarId a;
    VarId b;
};
/// target equals a combination of the inputs that vanishes when all inputs are zero.
struct DerivativeLinear {
    VarId target;
    std::vector<VarId> inputs;
};
/// Reduces to a = b once the derivative is known to be zero.
struct ZeroDerivativeAlias {
    VarId derivative;
    VarId a;
    VarId b;
};
}  // namespace tag

using StructureTag =
    std::variant<std::monostate, tag::FixConstant, tag::Alias, tag::DerivativeLinear, tag::ZeroDerivativeAlias>;

struct EquationDescriptor {
    std::string name;
    Residual residual;
    std::vector<VarId> incidence_full;
    std::vector<VarId> incidence_simplified;
    EquationPhase phase = EquationPhase::Both;
    double nominal_residual = 1.0;
    StructureTag tag;
    bool has_homotopy = false;
};

/// Variables and equations of a flattened model, all phases included.
class Model {
public:
    VarId add_variable(VariableDescriptor v);
    std::size_t add_equation(std::string name, Residual residual, EquationPhase phase = EquationPhase::Both,
                             double nominal_residual = 1.0, StructureTag tag = {});

    /// Convenience helpers for tagged equations.
    std::size_t add_alias(std::string name, VarId a, VarId b, EquationPhase phase = EquationPhase::Both);
    std::size_t add_fix(std::string name, VarId v, double value, EquationPhase phase = EquationPhase::Both);

    const std::vector<VariableDescriptor>& variables() const noexcept { return variables_; }
    std::vector<VariableDescriptor>& variables() noexcept { return variables_; }
    const std::vector<EquationDescriptor>& equations() const;
    std::vector<EquationDescriptor>& mutable_equations();

    const VariableDescriptor& variable(VarId v) const { return variables_.at(v.index()); }
    VariableDescriptor& variable(VarId v) { return variables_.at(v.index()); }
    std::optional<VarId> find(std::string_view name) const;
    VarId require(std::string_view name) const;

    /// Start values (and parameter values) of every variable.
    std::vector<double> start_values() const;

    /// Records incidence of every equation by evaluating it at the start values.
    void finalize() const;

    void remove_equation(std::string_view name);

private:
    std::vector<VariableDescriptor> variables_;
    mutable std::vector<EquationDescriptor> equations_;
    std::unordered_map<std::string, VarId> by_name_;
    mutable bool finalized_ = false;
};

enum class Phase { Initialization, Simulation };
enum class LambdaRegime { Simplified, Full };

inline LambdaRegime regime_for(double lambda) noexcept {
    return lambda == 0.0 ? LambdaRegime::Simplified : LambdaRegime::Full;
}

struct Elimination {
    enum class Kind { Constant, Alias };
    VarId var;
    Kind kind;
    double value = 0.0;
    VarId target{};
    std::string equation;
};

struct FlatProblem {
    std::vector<VariableDescriptor> variables;
    std::vector<EquationDescriptor> equations;
    std::vector<VarId> unknowns;
    /// Alias map, fully compressed; equations read variable v at values[representative[v]].
    std::vector<VarId> representative;
    /// Current value of every variable slot (parameters, constants, and unknown start values).
    std::vector<double> values;
    /// Position of a variable in `unknowns`, or -1.
    std::vector<int> unknown_pos;
    std::vector<Elimination> eliminated;
    LambdaRegime regime = LambdaRegime::Simplified;
    Phase phase = Phase::Initialization;
    std::size_t equations_before_elimination = 0;
    std::size_t unknowns_before_elimination = 0;

    std::size_t size() const noexcept { return unknowns.size(); }
    std::vector<double> start_vector() const;
    /// Writes unknown values into a full-size values vector.
    void scatter(std::span<const double> x, std::vector<double>& full) const;
    const std::vector<VarId>& incidence(std::size_t eq, LambdaRegime regime) const {
        return regime == LambdaRegime::Simplified ? equations[eq].incidence_simplified : equations[eq].incidence_full;
    }
    double value_of(VarId v) const { return values[representative[v.index()].index()]; }
    std::optional<VarId> find(std::string_view name) const;
};

struct AssemblyOptions {
    Phase phase = Phase::Initialization;
    /// When false, states are treated as known inputs (pure simulation-phase algebra).
    bool states_unknown = true;
    bool eliminate = true;
    /// Overrides the model start values when non-empty (size must equal the variable count).
    std::vector<double> values;
};

/// Selects the phase's equations, applies the structural eliminations and checks squareness.
/// Throws StructuralSingularity naming unmatched equations/variables when non-square.
FlatProblem assemble(const Model& model, const AssemblyOptions& options);

/// Initialization-phase assembly with all eliminations.
FlatProblem assemble_initialization_problem(const Model& model);

/// Residuals of the active equations at unknown vector x.
/// Throws EvaluationError naming the equation on non-finite values or domain errors.
std::vector<double> residual_eval(const FlatProblem& problem, std::span<const double> x, double lambda);

/// Evaluates a single equation with the given full values vector, wrapping failures.
double evaluate_equation(const FlatProblem& problem, std::size_t eq, std::span<const double> full_values,
                         double lambda, HomotopyMode mode = HomotopyMode::Blend);

}  // namespace ssinit

#include "ssinit/eqsys.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ssinit/structure.hpp"

namespace ssinit {

std::string_view to_string(VariableRole role) noexcept {
    switch (role) {
        case VariableRole::State: return "state";
        case VariableRole::Algebraic: return "algebraic";
        case VariableRole::FixedParameter: return "fixed-parameter";
        case VariableRole::UnknownParameter: return "unknown-parameter";
    }
    return "unknown";
}

std::string_view to_string(VariableKind kind) noexcept {
    switch (kind) {
        case VariableKind::Pressure: return "pressure";
        case VariableKind::Temperature: return "temperature";
        case VariableKind::Composition: return "composition";
        case VariableKind::Current: return "current";
        case VariableKind::MassFlow: return "mass-flow";
        case VariableKind::Enthalpy: return "enthalpy";
        case VariableKind::Voltage: return "voltage";
        case VariableKind::Power: return "power";
        case VariableKind::HeatFlow: return "heat-flow";
        case VariableKind::Derivative: return "derivative";
        case VariableKind::Signal: return "signal";
        case VariableKind::Other: return "other";
    }
    return "other";
}

void validate(const VariableDescriptor& v) {
    if (!(v.nominal > 0.0) || !std::isfinite(v.nominal)) {
        throw ModelError("variable '" + v.name + "': nominal must be positive");
    }
    if (!(v.min <= v.max)) throw ModelError("variable '" + v.name + "': min > max");
    if (!(v.start >= v.min && v.start <= v.max)) {
        std::ostringstream os;
        os << "variable '" << v.name << "': start " << v.start << " outside [" << v.min << ", " << v.max << "]";
        throw ModelError(os.str());
    }
}

double homotopy_combine(double actual, double simplified, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw DomainError("homotopy parameter outside [0, 1]");
    }
    return lambda * actual + (1.0 - lambda) * simplified;
}

// ---------------------------------------------------------------------------
// Model

VarId Model::add_variable(VariableDescriptor v) {
    validate(v);
    if (by_name_.contains(v.name)) throw ModelError("duplicate variable name '" + v.name + "'");
    const VarId id = var_id(variables_.size());
    by_name_.emplace(v.name, id);
    variables_.push_back(std::move(v));
    finalized_ = false;
    return id;
}

std::size_t Model::add_equation(std::string name, Residual residual, EquationPhase phase, double nominal_residual,
                                StructureTag tag) {
    if (!(nominal_residual > 0.0)) throw ModelError("equation '" + name + "': nominal residual must be positive");
    EquationDescriptor eq;
    eq.name = std::move(name);
    eq.residual = std::move(residual);
    eq.phase = phase;
    eq.nominal_residual = nominal_residual;
    eq.tag = std::move(tag);
    equations_.push_back(std::move(eq));
    finalized_ = false;
    return equations_.size() - 1;
}

std::size_t Model::add_alias(std::string name, VarId a, VarId b, EquationPhase phase) {
    const double nom = std::max(variable(a).nominal, variable(b).nominal);
    return add_equation(
        std::move(name), [a, b](const EvalContext& c) { return c(a) - c(b); }, phase, nom, tag::Alias{a, b});
}

std::size_t Model::add_fix(std::string name, VarId v, double value, EquationPhase phase) {
    return add_equation(
        std::move(name), [v, value](const EvalContext& c) { return c(v) - value; }, phase, variable(v).nominal,
        tag::FixConstant{v, value});
}

const std::vector<EquationDescriptor>& Model::equations() const {
    finalize();
    return equations_;
}

std::vector<EquationDescriptor>& Model::mutable_equations() {
    finalize();
    return equations_;
}

std::optional<VarId> Model::find(std::string_view name) const {
    const auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

VarId Model::require(std::string_view name) const {
    if (auto v = find(name)) return *v;
    throw ModelError("no variable named '" + std::string(name) + "'");
}

std::vector<double> Model::start_values() const {
    std::vector<double> out(variables_.size());
    for (std::size_t i = 0; i < variables_.size(); ++i) out[i] = variables_[i].start;
    return out;
}

namespace {

std::vector<VarId> sorted_unique(std::vector<VarId> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace

void Model::finalize() const {
    if (finalized_) return;
    const std::vector<double> values = start_values();
    std::vector<VarId> identity(variables_.size());
    for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = var_id(i);

    for (auto& eq : equations_) {
        IncidenceRecorder simplified;
        IncidenceRecorder full;
        try {
            (void)eq.residual(EvalContext(values, identity, 0.0, HomotopyMode::Blend, &simplified));
            (void)eq.residual(EvalContext(values, identity, 0.5, HomotopyMode::Blend, &full));
        } catch (const Error& e) {
            throw ModelError("equation '" + eq.name + "' cannot be evaluated at start values: " + e.what());
        }
        eq.incidence_simplified = sorted_unique(std::move(simplified.reads));
        eq.incidence_full = sorted_unique(std::move(full.reads));
        eq.has_homotopy = full.homotopy_calls > 0;
    }
    finalized_ = true;
}

void Model::remove_equation(std::string_view name) {
    const auto it = std::find_if(equations_.begin(), equations_.end(),
                                 [&](const EquationDescriptor& e) { return e.name == name; });
    if (it == equations_.end()) throw ModelError("no equation named '" + std::string(name) + "'");
    equations_.erase(it);
}

// ---------------------------------------------------------------------------
// FlatProblem

std::vector<double> FlatProblem::start_vector() const {
    std::vector<double> x(unknowns.size());
    for (std::size_t i = 0; i < unknowns.size(); ++i) x[i] = values[unknowns[i].index()];
    return x;
}

void FlatProblem::scatter(std::span<const double> x, std::vector<double>& full) const {
    for (std::size_t i = 0; i < unknowns.size(); ++i) full[unknowns[i].index()] = x[i];
}

std::optional<VarId> FlatProblem::find(std::string_view name) const {
    for (std::size_t i = 0; i < variables.size(); ++i) {
        if (variables[i].name == name) return var_id(i);
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Assembly

namespace {

bool phase_active(EquationPhase eq, Phase phase) {
    switch (eq) {
        case EquationPhase::Both: return true;
        case EquationPhase::InitialOnly: return phase == Phase::Initialization;
        case EquationPhase::SimulationOnly: return phase == Phase::Simulation;
    }
    return false;
}

bool role_unknown(VariableRole role, const AssemblyOptions& opt) {
    switch (role) {
        case VariableRole::FixedParameter: return false;
        case VariableRole::UnknownParameter: return opt.phase == Phase::Initialization;
        case VariableRole::State: return opt.states_unknown;
        case VariableRole::Algebraic: return true;
    }
    return false;
}

class Eliminator {
public:
    Eliminator(const std::vector<VariableDescriptor>& vars, const AssemblyOptions& opt, std::vector<double>& values)
        : values_(values), parent_(vars.size()), known_(vars.size()) {
        for (std::size_t i = 0; i < vars.size(); ++i) {
            parent_[i] = i;
            known_[i] = !role_unknown(vars[i].role, opt);
        }
    }

    std::size_t find(std::size_t v) {
        while (parent_[v] != v) {
            parent_[v] = parent_[parent_[v]];
            v = parent_[v];
        }
        return v;
    }

    bool known(VarId v) { return known_[find(v.index())]; }

    bool is_zero_constant(VarId v) {
        const std::size_t r = find(v.index());
        return known_[r] && values_[r] == 0.0;
    }

    bool fix(VarId v, double value) {
        const std::size_t r = find(v.index());
        if (known_[r]) return false;
        known_[r] = true;
        values_[r] = value;
        return true;
    }

    bool alias(VarId a, VarId b) {
        std::size_t ra = find(a.index());
        std::size_t rb = find(b.index());
        if (ra == rb) return false;
        if (known_[ra] && known_[rb]) return false;
        // Representative: the known member, otherwise the earlier declaration.
        if (known_[rb] || (!known_[ra] && rb < ra)) std::swap(ra, rb);
        parent_[rb] = ra;
        return true;
    }

private:
    std::vector<double>& values_;
    std::vector<std::size_t> parent_;
    std::vector<bool> known_;
};

[[noreturn]] void throw_non_square(const FlatProblem& p) {
    const Matching m = maximum_matching(p, LambdaRegime::Full);
    std::vector<std::string> eqs;
    std::vector<std::string> vars;
    for (std::size_t e : m.unmatched_equations) eqs.push_back(p.equations[e].name);
    for (VarId v : underdetermined_variables(p, LambdaRegime::Full, m)) vars.push_back(p.variables[v.index()].name);
    std::ostringstream os;
    os << "structurally singular problem: " << p.equations.size() << " equations for " << p.unknowns.size()
       << " unknowns";
    if (!vars.empty()) {
        os << "; unmatched variables:";
        for (const auto& n : vars) os << ' ' << n;
    }
    if (!eqs.empty()) {
        os << "; surplus equations:";
        for (const auto& n : eqs) os << ' ' << n;
    }
    throw StructuralSingularity(os.str(), std::move(eqs), std::move(vars));
}

}  // namespace

FlatProblem assemble(const Model& model, const AssemblyOptions& options) {
    const auto& all_eqs = model.equations();
    FlatProblem p;
    p.variables = model.variables();
    p.phase = options.phase;
    p.values = options.values.empty() ? model.start_values() : options.values;
    if (p.values.size() != p.variables.size()) throw ModelError("assembly values vector has wrong size");

    std::vector<const EquationDescriptor*> active;
    for (const auto& eq : all_eqs) {
        if (phase_active(eq.phase, options.phase)) active.push_back(&eq);
    }
    p.equations_before_elimination = active.size();
    for (const auto& v : p.variables) {
        if (role_unknown(v.role, options)) ++p.unknowns_before_elimination;
    }

    Eliminator el(p.variables, options, p.values);
    std::vector<bool> dropped(active.size(), false);

    bool changed = options.eliminate;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < active.size(); ++i) {
            if (dropped[i]) continue;
            const EquationDescriptor& eq = *active[i];
            bool drop = false;
            if (const auto* t = std::get_if<tag::FixConstant>(&eq.tag)) {
                if (el.fix(t->var, t->value)) {
                    p.eliminated.push_back({t->var, Elimination::Kind::Constant, t->value, t->var, eq.name});
                    drop = true;
                }
            } else if (const auto* t = std::get_if<tag::Alias>(&eq.tag)) {
                if (el.alias(t->a, t->b)) {
                    p.eliminated.push_back({t->b, Elimination::Kind::Alias, 0.0, t->a, eq.name});
                    drop = true;
                }
            } else if (const auto* t = std::get_if<tag::DerivativeLinear>(&eq.tag)) {
                const bool all_zero = std::all_of(t->inputs.begin(), t->inputs.end(),
                                                  [&](VarId v) { return el.is_zero_constant(v); });
                if (all_zero && el.fix(t->target, 0.0)) {
                    p.eliminated.push_back({t->target, Elimination::Kind::Constant, 0.0, t->target, eq.name});
                    drop = true;
                }
            } else if (const auto* t = std::get_if<tag::ZeroDerivativeAlias>(&eq.tag)) {
                if (el.is_zero_constant(t->derivative) && el.alias(t->a, t->b)) {
                    p.eliminated.push_back({t->b, Elimination::Kind::Alias, 0.0, t->a, eq.name});
                    drop = true;
                }
            }
            if (drop) {
                dropped[i] = true;
                changed = true;
            }
        }
    }

    const std::size_t n = p.variables.size();
    p.representative.resize(n);
    for (std::size_t i = 0; i < n; ++i) p.representative[i] = var_id(el.find(i));
    // Aliased members take the representative's value so reports read consistently.
    for (std::size_t i = 0; i < n; ++i) p.values[i] = p.values[p.representative[i].index()];

    p.unknown_pos.assign(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (p.representative[i].index() == i && !el.known(var_id(i))) {
            p.unknown_pos[i] = static_cast<int>(p.unknowns.size());
            p.unknowns.push_back(var_id(i));
        }
    }

    auto map_incidence = [&](const std::vector<VarId>& inc) {
        std::vector<VarId> out;
        out.reserve(inc.size());
        for (VarId v : inc) {
            const VarId r = p.representative[v.index()];
            if (p.unknown_pos[r.index()] >= 0) out.push_back(r);
        }
        return sorted_unique(std::move(out));
    };

    for (std::size_t i = 0; i < active.size(); ++i) {
        if (dropped[i]) continue;
        EquationDescriptor eq = *active[i];
        eq.incidence_full = map_incidence(eq.incidence_full);
        eq.incidence_simplified = map_incidence(eq.incidence_simplified);
        p.equations.push_back(std::move(eq));
    }

    if (p.equations.size() != p.unknowns.size()) throw_non_square(p);
    return p;
}

FlatProblem assemble_initialization_problem(const Model& model) {
    AssemblyOptions opt;
    opt.phase = Phase::Initialization;
    return assemble(model, opt);
}

double evaluate_equation(const FlatProblem& problem, std::size_t eq, std::span<const double> full_values,
                         double lambda, HomotopyMode mode) {
    const EquationDescriptor& e = problem.equations[eq];
    double r = 0.0;
    try {
        r = e.residual(EvalContext(full_values, problem.representative, lambda, mode));
    } catch (const EvaluationError&) {
        throw;
    } catch (const Error& ex) {
        throw EvaluationError("equation '" + e.name + "': " + ex.what(), e.name);
    }
    if (!std::isfinite(r)) throw EvaluationError("equation '" + e.name + "' produced a non-finite residual", e.name);
    return r;
}

std::vector<double> residual_eval(const FlatProblem& problem, std::span<const double> x, double lambda) {
    if (x.size() != problem.unknowns.size()) throw DomainError("residual_eval: unknown vector has wrong size");
    std::vector<double> full = problem.values;
    problem.scatter(x, full);
    std::vector<double> r(problem.equations.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = evaluate_equation(problem, i, full, lambda);
    return r;
}

}  // namespace ssinit

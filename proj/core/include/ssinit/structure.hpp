#pragma once

// Structural analysis of a FlatProblem: maximum bipartite matching between
// equations and unknowns, block-lower-triangular ordering into strong
// components, and greedy tearing of the non-trivial components.

#include <cstddef>
#include <map>
#include <vector>

#include "ssinit/eqsys.hpp"

namespace ssinit {

struct Matching {
    /// Unknown position assigned to each equation, or -1.
    std::vector<int> unknown_of_equation;
    /// Equation assigned to each unknown position, or -1.
    std::vector<int> equation_of_unknown;
    std::vector<std::size_t> unmatched_equations;
    std::vector<std::size_t> unmatched_unknowns;

    std::size_t cardinality() const noexcept { return unknown_of_equation.size() - unmatched_equations.size(); }
    bool perfect() const noexcept { return unmatched_equations.empty() && unmatched_unknowns.empty(); }
};

/// Maximum-cardinality matching by augmenting paths, scanning equations and
/// their incidence in declaration order. Never throws.
Matching maximum_matching(const FlatProblem& problem, LambdaRegime regime);

/// Perfect matching or StructuralSingularity listing unmatched rows and columns.
Matching match_variables(const FlatProblem& problem, LambdaRegime regime);

/// Unknowns left unmatched by at least one maximum matching (alternating-path closure).
std::vector<VarId> underdetermined_variables(const FlatProblem& problem, LambdaRegime regime, const Matching& m);

/// One causalized step inside a torn component: equation solved for variable.
struct Assignment {
    std::size_t equation;
    VarId variable;
};

struct StrongComponent {
    /// Equation indices in ascending order.
    std::vector<std::size_t> equations;
    /// variables[k] is matched to equations[k].
    std::vector<VarId> variables;
    std::vector<VarId> tearing_variables;
    std::vector<std::size_t> torn_equations;
    /// Causal sequence evaluated for given tearing values (empty when untorn).
    std::vector<Assignment> assignments;

    std::size_t size() const noexcept { return equations.size(); }
    bool torn() const noexcept { return !tearing_variables.empty(); }
};

struct BltOrdering {
    std::vector<StrongComponent> components;
    LambdaRegime regime = LambdaRegime::Full;

    std::size_t max_size() const noexcept;
    /// size -> number of components
    std::map<std::size_t, std::size_t> histogram() const;
    std::vector<std::size_t> sizes() const;
};

/// Strong components of the matched dependency graph in solution order; ties
/// between independent components are broken by their smallest equation index.
BltOrdering blt_decompose(const FlatProblem& problem, LambdaRegime regime);

struct TearingPreferences {
    std::vector<VariableKind> ranking{VariableKind::Pressure, VariableKind::Temperature, VariableKind::Composition,
                                      VariableKind::Current};
};

/// Greedy tearing: causalize equations with a single unknown left; when stuck,
/// tear a variable of the best-ranked kind, falling back to the variable that
/// unlocks the most equations.
StrongComponent tear(const StrongComponent& component, const FlatProblem& problem, LambdaRegime regime,
                     const TearingPreferences& preferences = {});

/// Applies tear() to every component of size > 1.
void tear_all(BltOrdering& ordering, const FlatProblem& problem, const TearingPreferences& preferences = {});

}  // namespace ssinit

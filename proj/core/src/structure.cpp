#include "ssinit/structure.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <sstream>

namespace ssinit {

namespace {

// Incidence of each equation as unknown positions.
std::vector<std::vector<int>> adjacency(const FlatProblem& p, LambdaRegime regime) {
    std::vector<std::vector<int>> adj(p.equations.size());
    for (std::size_t e = 0; e < p.equations.size(); ++e) {
        for (VarId v : p.incidence(e, regime)) {
            const int pos = p.unknown_pos[v.index()];
            if (pos >= 0) adj[e].push_back(pos);
        }
    }
    return adj;
}

class Augmenter {
public:
    Augmenter(const std::vector<std::vector<int>>& adj, std::vector<int>& eq_of_var, std::vector<int>& var_of_eq)
        : adj_(adj), eq_of_var_(eq_of_var), var_of_eq_(var_of_eq), visited_(eq_of_var.size(), 0) {}

    bool augment(int eq) {
        ++stamp_;
        return dfs(eq);
    }

private:
    bool dfs(int eq) {
        for (int v : adj_[eq]) {
            if (visited_[v] == stamp_) continue;
            visited_[v] = stamp_;
            if (eq_of_var_[v] < 0 || dfs(eq_of_var_[v])) {
                eq_of_var_[v] = eq;
                var_of_eq_[eq] = v;
                return true;
            }
        }
        return false;
    }

    const std::vector<std::vector<int>>& adj_;
    std::vector<int>& eq_of_var_;
    std::vector<int>& var_of_eq_;
    std::vector<unsigned> visited_;
    unsigned stamp_ = 0;
};

}  // namespace

Matching maximum_matching(const FlatProblem& problem, LambdaRegime regime) {
    const auto adj = adjacency(problem, regime);
    Matching m;
    m.unknown_of_equation.assign(problem.equations.size(), -1);
    m.equation_of_unknown.assign(problem.unknowns.size(), -1);

    // Cheap pass first, then augmenting paths for the rest.
    for (std::size_t e = 0; e < adj.size(); ++e) {
        for (int v : adj[e]) {
            if (m.equation_of_unknown[v] < 0) {
                m.equation_of_unknown[v] = static_cast<int>(e);
                m.unknown_of_equation[e] = v;
                break;
            }
        }
    }
    Augmenter aug(adj, m.equation_of_unknown, m.unknown_of_equation);
    for (std::size_t e = 0; e < adj.size(); ++e) {
        if (m.unknown_of_equation[e] < 0) (void)aug.augment(static_cast<int>(e));
    }
    for (std::size_t e = 0; e < adj.size(); ++e) {
        if (m.unknown_of_equation[e] < 0) m.unmatched_equations.push_back(e);
    }
    for (std::size_t v = 0; v < m.equation_of_unknown.size(); ++v) {
        if (m.equation_of_unknown[v] < 0) m.unmatched_unknowns.push_back(v);
    }
    return m;
}

std::vector<VarId> underdetermined_variables(const FlatProblem& problem, LambdaRegime regime, const Matching& m) {
    // Equations incident on each unknown.
    std::vector<std::vector<std::size_t>> eqs_of_var(problem.unknowns.size());
    for (std::size_t e = 0; e < problem.equations.size(); ++e) {
        for (VarId v : problem.incidence(e, regime)) {
            const int pos = problem.unknown_pos[v.index()];
            if (pos >= 0) eqs_of_var[pos].push_back(e);
        }
    }
    std::vector<bool> seen(problem.unknowns.size(), false);
    std::queue<std::size_t> q;
    for (std::size_t v : m.unmatched_unknowns) {
        seen[v] = true;
        q.push(v);
    }
    while (!q.empty()) {
        const std::size_t v = q.front();
        q.pop();
        for (std::size_t e : eqs_of_var[v]) {
            const int w = m.unknown_of_equation[e];
            if (w >= 0 && !seen[w]) {
                seen[w] = true;
                q.push(static_cast<std::size_t>(w));
            }
        }
    }
    std::vector<VarId> out;
    for (std::size_t v = 0; v < seen.size(); ++v) {
        if (seen[v]) out.push_back(problem.unknowns[v]);
    }
    return out;
}

Matching match_variables(const FlatProblem& problem, LambdaRegime regime) {
    Matching m = maximum_matching(problem, regime);
    if (m.perfect()) return m;
    std::vector<std::string> eqs;
    std::vector<std::string> vars;
    for (std::size_t e : m.unmatched_equations) eqs.push_back(problem.equations[e].name);
    for (std::size_t v : m.unmatched_unknowns) vars.push_back(problem.variables[problem.unknowns[v].index()].name);
    std::ostringstream os;
    os << "structural singularity: matching covers " << m.cardinality() << " of " << problem.equations.size()
       << " equations";
    if (!vars.empty()) {
        os << "; unmatched variables:";
        for (const auto& n : vars) os << ' ' << n;
    }
    if (!eqs.empty()) {
        os << "; unmatched equations:";
        for (const auto& n : eqs) os << ' ' << n;
    }
    throw StructuralSingularity(os.str(), std::move(eqs), std::move(vars));
}

// ---------------------------------------------------------------------------
// BLT

std::size_t BltOrdering::max_size() const noexcept {
    std::size_t m = 0;
    for (const auto& c : components) m = std::max(m, c.size());
    return m;
}

std::map<std::size_t, std::size_t> BltOrdering::histogram() const {
    std::map<std::size_t, std::size_t> h;
    for (const auto& c : components) ++h[c.size()];
    return h;
}

std::vector<std::size_t> BltOrdering::sizes() const {
    std::vector<std::size_t> s;
    s.reserve(components.size());
    for (const auto& c : components) s.push_back(c.size());
    return s;
}

namespace {

// Iterative Tarjan; returns component id per node.
std::vector<int> strongly_connected(const std::vector<std::vector<int>>& succ, int& count) {
    const int n = static_cast<int>(succ.size());
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    std::vector<std::pair<int, std::size_t>> call;
    int next = 0;
    count = 0;
    for (int root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        call.emplace_back(root, 0);
        index[root] = low[root] = next++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            auto& [v, it] = call.back();
            if (it < succ[v].size()) {
                const int w = succ[v][it++];
                if (index[w] < 0) {
                    index[w] = low[w] = next++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
            } else {
                const int done = v;
                if (low[done] == index[done]) {
                    int w = -1;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        comp[w] = count;
                    } while (w != done);
                    ++count;
                }
                call.pop_back();
                if (!call.empty()) {
                    const int parent = call.back().first;
                    low[parent] = std::min(low[parent], low[done]);
                }
            }
        }
    }
    return comp;
}

}  // namespace

BltOrdering blt_decompose(const FlatProblem& problem, LambdaRegime regime) {
    const Matching m = match_variables(problem, regime);
    const auto adj = adjacency(problem, regime);
    const std::size_t n = problem.equations.size();

    // Edge e -> f when e reads the unknown computed by f.
    std::vector<std::vector<int>> succ(n);
    for (std::size_t e = 0; e < n; ++e) {
        for (int v : adj[e]) {
            const int f = m.equation_of_unknown[v];
            if (f != static_cast<int>(e)) succ[e].push_back(f);
        }
    }
    int ncomp = 0;
    const std::vector<int> comp = strongly_connected(succ, ncomp);

    std::vector<std::vector<std::size_t>> members(ncomp);
    for (std::size_t e = 0; e < n; ++e) members[comp[e]].push_back(e);

    // Kahn on the condensation: a component is ready when everything it reads is solved.
    std::vector<std::vector<int>> dependents(ncomp);
    std::vector<int> pending(ncomp, 0);
    for (int c = 0; c < ncomp; ++c) {
        std::vector<int> deps;
        for (std::size_t e : members[c]) {
            for (int f : succ[e]) {
                if (comp[f] != c) deps.push_back(comp[f]);
            }
        }
        std::sort(deps.begin(), deps.end());
        deps.erase(std::unique(deps.begin(), deps.end()), deps.end());
        pending[c] = static_cast<int>(deps.size());
        for (int d : deps) dependents[d].push_back(c);
    }
    using Key = std::pair<std::size_t, int>;  // (smallest equation index, component)
    std::priority_queue<Key, std::vector<Key>, std::greater<>> ready;
    for (int c = 0; c < ncomp; ++c) {
        if (pending[c] == 0) ready.emplace(members[c].front(), c);
    }

    BltOrdering out;
    out.regime = regime;
    while (!ready.empty()) {
        const int c = ready.top().second;
        ready.pop();
        StrongComponent sc;
        sc.equations = members[c];
        for (std::size_t e : sc.equations) sc.variables.push_back(problem.unknowns[m.unknown_of_equation[e]]);
        out.components.push_back(std::move(sc));
        for (int d : dependents[c]) {
            if (--pending[d] == 0) ready.emplace(members[d].front(), d);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Tearing

StrongComponent tear(const StrongComponent& component, const FlatProblem& problem, LambdaRegime regime,
                     const TearingPreferences& preferences) {
    StrongComponent out = component;
    out.tearing_variables.clear();
    out.torn_equations.clear();
    out.assignments.clear();
    if (component.size() <= 1) return out;

    const std::size_t n = component.size();
    // Local incidence restricted to the component's variables.
    std::vector<std::vector<std::size_t>> eq_vars(n);
    std::vector<std::vector<std::size_t>> var_eqs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& inc = problem.incidence(component.equations[i], regime);
        for (std::size_t k = 0; k < n; ++k) {
            if (std::binary_search(inc.begin(), inc.end(), component.variables[k])) {
                eq_vars[i].push_back(k);
                var_eqs[k].push_back(i);
            }
        }
    }

    std::vector<bool> var_known(n, false), eq_done(n, false);
    std::vector<std::size_t> unknown_count(n);
    for (std::size_t i = 0; i < n; ++i) unknown_count[i] = eq_vars[i].size();

    auto mark_known = [&](std::size_t k) {
        var_known[k] = true;
        for (std::size_t i : var_eqs[k]) --unknown_count[i];
    };
    auto rank_of = [&](std::size_t k) {
        const VariableKind kind = problem.variables[component.variables[k].index()].kind;
        const auto& r = preferences.ranking;
        const auto it = std::find(r.begin(), r.end(), kind);
        return it == r.end() ? r.size() : static_cast<std::size_t>(it - r.begin());
    };

    std::size_t remaining_vars = n;
    while (remaining_vars > 0) {
        bool progressed = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (eq_done[i] || unknown_count[i] != 1) continue;
            std::size_t k = 0;
            while (var_known[eq_vars[i][k]]) ++k;
            const std::size_t v = eq_vars[i][k];
            eq_done[i] = true;
            out.assignments.push_back({component.equations[i], component.variables[v]});
            mark_known(v);
            --remaining_vars;
            progressed = true;
            break;  // restart from the lowest index for determinism
        }
        if (progressed) continue;

        // Stuck: pick a tearing variable.
        std::size_t best = n;
        std::tuple<std::size_t, std::size_t, std::size_t> best_key{};
        for (std::size_t k = 0; k < n; ++k) {
            if (var_known[k]) continue;
            std::size_t unlocks = 0, occurrences = 0;
            for (std::size_t i : var_eqs[k]) {
                if (eq_done[i]) continue;
                ++occurrences;
                if (unknown_count[i] == 2) ++unlocks;
            }
            // Lower is better: kind rank, then most unlocked equations, then most occurrences.
            const auto key = std::make_tuple(rank_of(k), n - unlocks, n - occurrences);
            if (best == n || key < best_key) {
                best = k;
                best_key = key;
            }
        }
        out.tearing_variables.push_back(component.variables[best]);
        mark_known(best);
        --remaining_vars;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!eq_done[i]) out.torn_equations.push_back(component.equations[i]);
    }
    return out;
}

void tear_all(BltOrdering& ordering, const FlatProblem& problem, const TearingPreferences& preferences) {
    for (auto& c : ordering.components) {
        if (c.size() > 1) c = tear(c, problem, ordering.regime, preferences);
    }
}

}  // namespace ssinit

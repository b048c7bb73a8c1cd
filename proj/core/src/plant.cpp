#include "ssinit/plant.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ssinit {

namespace {

struct PortRef {
    std::string component;
    std::string port;
};

PortRef split(const std::string& path) {
    const auto dot = path.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == path.size())
        throw ModelError("port reference '" + path + "' is not of the form component.port");
    return {path.substr(0, dot), path.substr(dot + 1)};
}

std::optional<PortDirection> direction_of(const Component& c, const std::string& port) {
    for (const auto& p : c.ports())
        if (p.name == port) return p.direction;
    return std::nullopt;
}

}  // namespace

void PlantGraph::connect(const std::string& from, const std::string& to, std::optional<StreamState> stream) {
    connections.push_back({from, to});
    if (stream) {
        design[from] = *stream;
        design[to] = *stream;
    }
}

const Component* PlantGraph::find(const std::string& name) const {
    for (const auto& c : components)
        if (c->name() == name) return c.get();
    return nullptr;
}

InputBlock* PlantGraph::input(const std::string& name) {
    for (auto& b : inputs)
        if (b.name == name) return &b;
    return nullptr;
}

OutputBlock* PlantGraph::output(const std::string& name) {
    for (auto& b : outputs)
        if (b.name == name) return &b;
    return nullptr;
}

void PlantGraph::set_backward(bool backward) {
    const BlockMode mode = backward ? BlockMode::Backward : BlockMode::Forward;
    for (auto& in : inputs) {
        if (in.partner.empty()) continue;
        in.mode = mode;
        if (OutputBlock* out = output(in.partner)) out->mode = mode;
    }
}

void insert_decoupler(PlantGraph& graph, const std::string& to, const std::string& name) {
    auto it = std::find_if(graph.connections.begin(), graph.connections.end(),
                           [&](const Connection& c) { return c.to == to; });
    if (it == graph.connections.end()) throw ModelError("no connection ends at '" + to + "'");
    if (graph.find(name) != nullptr) throw ModelError("component '" + name + "' already exists");
    const auto d = graph.design.find(to);
    if (d == graph.design.end()) throw ModelError("connection into '" + to + "' has no design stream");
    const StreamState s = d->second;
    graph.emplace<Decoupler>(name, DecouplerParams{media::enthalpy(s.T, s.X, *graph.species), s.X});
    const std::string from = it->from;
    graph.connections.erase(it);
    graph.connect(from, name + ".in", s);
    graph.connect(name + ".out", to, s);
}

FlatModel flatten(const PlantGraph& plant) {
    if (!plant.species) throw ModelError("plant has no species table");
    FlatModel flat;
    Model& model = flat.model;

    std::set<std::string> names;
    for (const auto& c : plant.components) {
        if (!c) throw ModelError("plant contains a null component");
        if (!names.insert(c->name()).second) throw ModelError("duplicate component name '" + c->name() + "'");
    }

    std::map<std::string, std::string> used;
    for (const auto& conn : plant.connections) {
        for (const auto& [path, want] : {std::pair{conn.from, PortDirection::Outlet}, {conn.to, PortDirection::Inlet}}) {
            const PortRef ref = split(path);
            const Component* c = plant.find(ref.component);
            if (c == nullptr) throw ModelError("connection references unknown component '" + ref.component + "'");
            const auto dir = direction_of(*c, ref.port);
            if (!dir) throw ModelError("component '" + ref.component + "' has no port '" + ref.port + "'");
            if (*dir != want)
                throw ModelError("port '" + path + "' is an " + (*dir == PortDirection::Inlet ? "inlet" : "outlet") +
                                 " but is used as an " + (want == PortDirection::Inlet ? "inlet" : "outlet"));
            if (!used.emplace(path, conn.from + " -> " + conn.to).second)
                throw ModelError("port '" + path + "' connected twice (" + used[path] + ", " + conn.from + " -> " +
                                 conn.to + ")");
        }
    }
    for (const auto& c : plant.components) {
        for (const auto& p : c->ports()) {
            const std::string path = c->name() + "." + p.name;
            if (used.count(path) == 0) throw ModelError("dangling port '" + path + "'");
        }
    }

    flat.balance = validate_balance(plant.inputs, plant.outputs, plant.scenario);

    std::map<std::string, std::pair<VarId, double>> inputs;
    for (const auto& c : plant.components) {
        std::map<std::string, StreamState> design;
        for (const auto& p : c->ports()) {
            auto it = plant.design.find(c->name() + "." + p.name);
            if (it != plant.design.end()) design[p.name] = it->second;
        }
        Builder b(model, plant.species, c->name(), std::move(design));
        Contribution contrib = c->contribute(b);
        for (auto& [local, port] : contrib.ports) flat.ports[c->name() + "." + local] = port;
        for (const auto& [local, var] : contrib.inputs) {
            inputs[c->name() + "." + local] = var;
            flat.signals[c->name() + "." + local] = var.first;
        }
        for (const auto& [local, var] : contrib.outputs) flat.signals[c->name() + "." + local] = var;
    }

    const auto& table = *plant.species;
    for (const auto& conn : plant.connections) {
        const FluidPort& a = flat.ports.at(conn.from);
        const FluidPort& b = flat.ports.at(conn.to);
        const std::string n = "connect(" + conn.from + ", " + conn.to + ")";
        model.add_alias(n + ".p", b.p, a.p);
        model.add_alias(n + ".w", b.w, a.w);
        model.add_alias(n + ".h", b.h, a.h);
        for (std::size_t i = 0; i < a.X.size(); ++i) model.add_alias(n + ".X[" + table[i].name + "]", b.X[i], a.X[i]);
        flat.connection_equations += 3 + a.X.size();
        flat.connections.push_back(conn);
    }

    std::set<std::string> driven;
    for (const auto& block : plant.inputs) {
        auto it = inputs.find(block.actuator);
        if (it == inputs.end())
            throw ModelError("input block '" + block.name + "' drives unknown actuator '" + block.actuator + "'");
        if (!driven.insert(block.actuator).second)
            throw ModelError("actuator '" + block.actuator + "' is driven by two input blocks");
        const VarId u = it->second.first;
        flat.input_blocks[block.name] = add_block(model, block, plant.scenario, u, model.variable(u).nominal);
    }
    for (const auto& [name, var] : inputs) {
        if (driven.count(name) == 0) model.add_fix(name + ".default", var.first, var.second);
    }
    for (const auto& block : plant.outputs) {
        VarId y;
        if (auto it = flat.signals.find(block.sensor); it != flat.signals.end()) {
            y = it->second;
        } else if (auto v = model.find(block.sensor)) {
            y = *v;
        } else {
            throw ModelError("output block '" + block.name + "' reads unknown sensor '" + block.sensor + "'");
        }
        flat.output_blocks[block.name] = add_block(model, block, plant.scenario, y, model.variable(y).nominal);
    }

    flat.initialization_size = assemble_initialization_problem(model).size();
    flat.simulation_size = assemble(model, {.phase = Phase::Simulation, .states_unknown = false}).size();
    return flat;
}

namespace {

std::vector<double> port_fractions(const FluidPort& port, std::span<const double> values) {
    std::vector<double> X(port.X.size() + 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < port.X.size(); ++i) {
        X[i] = values[port.X[i].index()];
        sum += X[i];
    }
    X.back() = 1.0 - sum;
    return X;
}

double enthalpy_flow(const FluidPort& port, std::span<const double> values) {
    return values[port.w.index()] * values[port.h.index()];
}

std::vector<double> species_flows(const FluidPort& port, std::span<const double> values) {
    auto X = port_fractions(port, values);
    for (double& x : X) x *= values[port.w.index()];
    return X;
}

}  // namespace

ConservationReport check_conservation(const PlantGraph& plant, const FlatModel& flat, std::span<const double> values) {
    if (values.size() != flat.model.variables().size())
        throw ModelError("conservation check needs one value per model variable");
    ConservationReport r;
    const auto& table = *plant.species;

    for (const auto& conn : flat.connections) {
        const FluidPort& a = flat.ports.at(conn.from);
        const FluidPort& b = flat.ports.at(conn.to);
        const auto mismatch = [&](VarId x, VarId y) {
            const double nominal = std::max(flat.model.variable(x).nominal, flat.model.variable(y).nominal);
            return std::abs(values[x.index()] - values[y.index()]) / nominal;
        };
        double worst = std::max({mismatch(a.p, b.p), mismatch(a.w, b.w), mismatch(a.h, b.h)});
        for (std::size_t i = 0; i < a.X.size(); ++i) worst = std::max(worst, mismatch(a.X[i], b.X[i]));
        if (worst >= r.connection) {
            r.connection = worst;
            r.worst_connection = conn.from + " -> " + conn.to;
        }
    }

    for (const auto& [path, port] : flat.ports) {
        const auto X = port_fractions(port, values);
        double sum = 0.0;
        for (double x : X) {
            sum += x;
            r.min_fraction = std::min(r.min_fraction, x);
        }
        r.fraction_sum = std::max(r.fraction_sum, std::abs(sum - 1.0));
    }

    for (const auto& c : plant.components) {
        const std::string& n = c->name();
        if (dynamic_cast<const HeatExchanger*>(c.get()) != nullptr) {
            const double hot = enthalpy_flow(flat.ports.at(n + ".hot_in"), values) -
                               enthalpy_flow(flat.ports.at(n + ".hot_out"), values);
            const double cold = enthalpy_flow(flat.ports.at(n + ".cold_out"), values) -
                                enthalpy_flow(flat.ports.at(n + ".cold_in"), values);
            const double duty = std::max({std::abs(hot), std::abs(cold), 1e-300});
            const double closure = std::abs(hot - cold) / duty;
            if (closure >= r.hx_closure) {
                r.hx_closure = closure;
                r.worst_hx = n;
            }
        } else if (const auto* comb = dynamic_cast<const Combustor*>(c.get())) {
            std::vector<double> in(table.size(), 0.0);
            for (const auto& p : comb->ports()) {
                if (p.direction != PortDirection::Inlet) continue;
                const auto f = species_flows(flat.ports.at(n + "." + p.name), values);
                for (std::size_t i = 0; i < f.size(); ++i) in[i] += f[i];
            }
            const auto a_in = atom_flows(in, table);
            const auto a_out = atom_flows(species_flows(flat.ports.at(n + ".out"), values), table);
            const double scale = std::max({a_in[0], a_in[1], a_in[2], a_in[3], 1e-300});
            double worst = 0.0;
            for (std::size_t k = 0; k < 4; ++k) worst = std::max(worst, std::abs(a_in[k] - a_out[k]) / scale);
            if (worst >= r.atom_balance) {
                r.atom_balance = worst;
                r.worst_combustor = n;
            }
        }
    }
    return r;
}

void hold_inputs(const PlantGraph& plant, const FlatModel& flat, std::vector<double>& values) {
    if (family(plant.scenario) != ScenarioFamily::Simulation) return;
    for (const auto& block : plant.inputs) {
        const auto it = flat.input_blocks.find(block.name);
        if (it == flat.input_blocks.end()) continue;
        values[it->second.u_in.index()] = block.normalize ? 0.0 : values[it->second.u_out.index()];
    }
}

}  // namespace ssinit

#include "ssinit_tools/config.hpp"

#include <fstream>
#include <set>

namespace ssinit::media {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SaturationCurve, a, T_min, T_max)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ReactionParams, name, stoichiometry, k0, Ea, dH, dG)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SpeciesData, name, molar_mass, cp, h_formation, s_ref, atoms)

}  // namespace ssinit::media

namespace ssinit {

void to_json(nlohmann::json& j, LossLaw law) {
    j = law == LossLaw::AlwaysLinear ? "always_linear" : "quadratic_homotopy";
}

void from_json(const nlohmann::json& j, LossLaw& law) {
    const auto s = j.get<std::string>();
    if (s == "always_linear") {
        law = LossLaw::AlwaysLinear;
    } else if (s == "quadratic_homotopy") {
        law = LossLaw::QuadraticWithHomotopy;
    } else {
        throw ConfigError("unknown loss law '" + s + "'");
    }
}

void to_json(nlohmann::json& j, BlockMode mode) { j = mode == BlockMode::Backward ? "bwd" : "fwd"; }
void from_json(const nlohmann::json& j, BlockMode& mode) { mode = parse_mode(j.get<std::string>()); }

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(StreamState, p, w, T, X)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SourceParams, w, T, X)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PressureLossParams, dp_nom, w_nom, rho_nom, law)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(DecouplerParams, h_des, X_des)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(CompressorParams, beta, eta_is)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TurbineParams, K_t, eta_is, w_nom, p_nom)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(IntercoolerParams, volume, T_out)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(CondenserParams, volume, saturation, T_out)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(CombustorParams, volume, inlets)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ChannelParams, volume, surface, gamma_nom, w_nom, p_nom, inlet_loss)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(HxParams, modules, volumes, hot, cold, wall_capacity)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ElectrodeParams, k, Ea)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(FuelCellParams, volumes, area, anode, cathode, R_ohm, anode_electrode,
                                                cathode_electrode, alpha, diffusion_H2, diffusion_H2O, diffusion_O2,
                                                T_nom, a, b, pen_capacity, reforming, shift, p_H2_des, p_H2O_des,
                                                p_O2_des, j_des)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(InputBlock, name, actuator, mode, u_des, u_norm, normalize, partner)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(OutputBlock, name, sensor, mode, y_des, y_offdes, y_norm, normalize)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(SolverConfig, residual_tol, step_tol, max_iterations, contraction,
                                                max_halvings, use_tearing)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(HomotopySchedule, initial_step, growth, shrink, min_step)

namespace cli {

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(VerifySettings, horizon, dt, max_drift)

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::string& where, std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    std::set<std::string> known;
    for (const char* k : required) {
        known.insert(k);
        if (!j.contains(k)) throw ConfigError(where + ": missing '" + k + "'");
    }
    for (const char* k : optional) known.insert(k);
    for (const auto& [key, value] : j.items()) {
        if (known.count(key) == 0) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

bool same_species(const media::SpeciesData& a, const media::SpeciesData& b) {
    return a.name == b.name && a.molar_mass == b.molar_mass && a.cp == b.cp && a.h_formation == b.h_formation &&
           a.s_ref == b.s_ref && a.atoms == b.atoms;
}

json species_to_json(const media::SpeciesTable& table) {
    json out = json::array();
    for (const auto& s : table.species()) {
        bool builtin = false;
        try {
            builtin = same_species(s, media::SpeciesTable::builtin(s.name));
        } catch (const Error&) {
        }
        if (builtin) {
            out.push_back(s.name);
        } else {
            out.push_back(s);
        }
    }
    return out;
}

media::SpeciesTable species_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ConfigError("plant.species: expected a non-empty array");
    std::vector<media::SpeciesData> list;
    for (const auto& s : j) {
        if (s.is_string()) {
            try {
                list.push_back(media::SpeciesTable::builtin(s.get<std::string>()));
            } catch (const Error& e) {
                throw ConfigError("plant.species: " + std::string(e.what()));
            }
        } else {
            list.push_back(s.get<media::SpeciesData>());
        }
    }
    try {
        return media::SpeciesTable(std::move(list));
    } catch (const Error& e) {
        throw ConfigError("plant.species: " + std::string(e.what()));
    }
}

json component_to_json(const Component& c) {
    json j{{"name", c.name()}, {"type", std::string(c.type())}};
    const Component* p = &c;
    json params = json::object();
    if (const auto* x = dynamic_cast<const FluidSource*>(p)) {
        params = x->params();
    } else if (const auto* x = dynamic_cast<const FluidSink*>(p)) {
        params = {{"p", x->pressure()}};
    } else if (const auto* x = dynamic_cast<const PressureLoss*>(p)) {
        params = x->params();
    } else if (const auto* x = dynamic_cast<const Decoupler*>(p)) {
        params = x->params();
    } else if (const auto* x = dynamic_cast<const Compressor*>(p)) {
        params = x->params();
    } else if (const auto* x = dynamic_cast<const Turbine*>(p)) {
        params = x->params();
    } else if (const auto* x = dynamic_cast<const Intercooler*>(p)) {
        params = x->params();
    } else if (const auto* x = dynamic_cast<const Condenser*>(p)) {
        params = x->params();
    } else if (const auto* x = dynamic_cast<const Combustor*>(p)) {
        params = x->params();
    } else if (dynamic_cast<const Mixer*>(p) != nullptr) {
    } else if (const auto* x = dynamic_cast<const Splitter*>(p)) {
        params = {{"fraction", x->fraction()}};
    } else if (const auto* x = dynamic_cast<const HeatExchanger*>(p)) {
        params = x->params();
    } else if (const auto* x = dynamic_cast<const FuelCell*>(p)) {
        params = x->params();
    } else {
        throw ConfigError("component '" + c.name() + "' of type '" + std::string(c.type()) + "' is not serializable");
    }
    j["params"] = std::move(params);
    return j;
}

void add_component(PlantGraph& g, const json& j) {
    require_keys(j, "component", {"name", "type"}, {"params"});
    const auto name = j.at("name").get<std::string>();
    const auto type = j.at("type").get<std::string>();
    const json params = j.value("params", json::object());
    const std::string where = "component '" + name + "'";
    if (!params.is_object()) throw ConfigError(where + ": params must be an object");
    if (type == "source") {
        g.emplace<FluidSource>(name, params.get<SourceParams>());
    } else if (type == "sink") {
        require_keys(params, where, {"p"}, {});
        g.emplace<FluidSink>(name, params.at("p").get<double>());
    } else if (type == "pressure_loss") {
        g.emplace<PressureLoss>(name, params.get<PressureLossParams>());
    } else if (type == "decoupler") {
        g.emplace<Decoupler>(name, params.get<DecouplerParams>());
    } else if (type == "compressor") {
        g.emplace<Compressor>(name, params.get<CompressorParams>());
    } else if (type == "turbine") {
        g.emplace<Turbine>(name, params.get<TurbineParams>());
    } else if (type == "intercooler") {
        g.emplace<Intercooler>(name, params.get<IntercoolerParams>());
    } else if (type == "condenser") {
        g.emplace<Condenser>(name, params.get<CondenserParams>());
    } else if (type == "combustor") {
        g.emplace<Combustor>(name, params.get<CombustorParams>());
    } else if (type == "mixer") {
        g.emplace<Mixer>(name);
    } else if (type == "splitter") {
        require_keys(params, where, {"fraction"}, {});
        g.emplace<Splitter>(name, params.at("fraction").get<double>());
    } else if (type == "heat_exchanger") {
        g.emplace<HeatExchanger>(name, params.get<HxParams>());
    } else if (type == "fuel_cell") {
        g.emplace<FuelCell>(name, params.get<FuelCellParams>());
    } else {
        throw ConfigError(where + ": unknown type '" + type + "'");
    }
}

template <class F>
auto guarded(const std::string& where, F&& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(where + ": " + e.what());
    } catch (const Error& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

}  // namespace

nlohmann::json plant_to_json(const PlantGraph& plant) {
    if (!plant.species) throw ConfigError("plant has no species table");
    json j;
    j["species"] = species_to_json(*plant.species);
    j["scenario"] = short_name(plant.scenario);
    json comps = json::array();
    for (const auto& c : plant.components) comps.push_back(component_to_json(*c));
    j["components"] = std::move(comps);
    json conns = json::array();
    for (const auto& c : plant.connections) {
        json e{{"from", c.from}, {"to", c.to}};
        if (auto it = plant.design.find(c.from); it != plant.design.end()) e["design"] = it->second;
        conns.push_back(std::move(e));
    }
    j["connections"] = std::move(conns);
    j["inputs"] = plant.inputs;
    j["outputs"] = plant.outputs;
    return j;
}

PlantGraph plant_from_json(const nlohmann::json& j) {
    return guarded("plant", [&] {
        require_keys(j, "plant", {"species", "components", "connections"}, {"scenario", "inputs", "outputs"});
        PlantGraph g;
        g.species = std::make_shared<const media::SpeciesTable>(species_from_json(j.at("species")));
        if (j.contains("scenario")) g.scenario = parse_scenario(j.at("scenario").get<std::string>());
        for (const auto& c : j.at("components")) add_component(g, c);
        for (const auto& c : j.at("connections")) {
            require_keys(c, "connection", {"from", "to"}, {"design"});
            std::optional<StreamState> design;
            if (c.contains("design")) design = c.at("design").get<StreamState>();
            g.connect(c.at("from").get<std::string>(), c.at("to").get<std::string>(), design);
        }
        if (j.contains("inputs")) g.inputs = j.at("inputs").get<std::vector<InputBlock>>();
        if (j.contains("outputs")) g.outputs = j.at("outputs").get<std::vector<OutputBlock>>();
        return g;
    });
}

nlohmann::json config_to_json(const RunConfig& config) {
    json j;
    j["schema"] = config_schema;
    if (config.mode) j["mode"] = *config.mode;
    j["solver"] = config.solver;
    j["homotopy"] = config.homotopy;
    j["verify"] = config.verify;
    j["load_outputs"] = config.load_outputs;
    j["plant"] = plant_to_json(config.plant);
    return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
    return guarded("config", [&] {
        require_keys(j, "config", {"schema", "plant"}, {"mode", "solver", "homotopy", "verify", "load_outputs"});
        if (j.at("schema") != config_schema)
            throw ConfigError("config: unsupported schema " + j.at("schema").dump() + ", expected \"" +
                              config_schema + "\"");
        RunConfig c;
        if (j.at("plant").is_string()) {
            if (j.at("plant") != "demo") throw ConfigError("config: the only named plant is \"demo\"");
            c.plant = build_demo_plant();
        } else {
            c.plant = plant_from_json(j.at("plant"));
        }
        if (j.contains("mode")) c.mode = j.at("mode").get<BlockMode>();
        c.solver = j.value("solver", SolverConfig{});
        c.homotopy = j.value("homotopy", HomotopySchedule{});
        c.verify = j.value("verify", VerifySettings{});
        c.load_outputs = j.value("load_outputs", std::vector<std::string>{});
        c.solver.validate();
        c.homotopy.validate();
        if (!(c.verify.dt > 0.0) || !(c.verify.horizon >= 0.0) || !(c.verify.max_drift >= 0.0))
            throw ConfigError("config: verify needs dt > 0, horizon >= 0 and max_drift >= 0");
        return c;
    });
}

nlohmann::json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

RunConfig load_config(const std::filesystem::path& path) { return config_from_json(read_json(path)); }

RunConfig demo_config() {
    RunConfig c;
    c.plant = build_demo_plant();
    c.mode = BlockMode::Forward;
    c.load_outputs = {"turbine_power"};
    return c;
}

}  // namespace cli
}  // namespace ssinit

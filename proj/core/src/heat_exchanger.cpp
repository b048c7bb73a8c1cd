#include "ssinit/components.hpp"
#include "volume.hpp"

namespace ssinit {

namespace {

void validate_channel(const ChannelParams& c, const char* side) {
    const std::string s = side;
    if (!(c.volume > 0.0) || !(c.surface > 0.0)) throw ModelError("heat exchanger " + s + ": geometry must be positive");
    if (!(c.gamma_nom > 0.0) || !(c.w_nom > 0.0) || !(c.p_nom > 0.0))
        throw ModelError("heat exchanger " + s + ": nominal data must be positive");
    c.inlet_loss.validate();
}

StreamState outlet_design(const Builder& b, const std::string& in, const std::string& out) {
    return b.has_design(out) ? b.design(out) : b.design(in);
}

}  // namespace

void HxParams::validate() const {
    if (modules < 1 || volumes < 1) throw ModelError("heat exchanger: needs at least one module and one volume");
    if (!(wall_capacity > 0.0)) throw ModelError("heat exchanger: wall capacity must be positive");
    validate_channel(hot, "hot side");
    validate_channel(cold, "cold side");
}

Contribution HeatExchanger::contribute(Builder& b) const {
    params_.validate();
    FluidPort hot_in = b.port("hot_in", PortDirection::Inlet);
    FluidPort cold_in = b.port("cold_in", PortDirection::Inlet);
    const auto hot = detail::channel_variables(b, "hot", hot_in, params_.hot, params_.modules, params_.volumes,
                                               b.design("hot_in"), outlet_design(b, "hot_in", "hot_out"));
    const auto cold = detail::channel_variables(b, "cold", cold_in, params_.cold, params_.modules, params_.volumes,
                                                b.design("cold_in"), outlet_design(b, "cold_in", "cold_out"));
    const std::size_t n = hot.size();
    std::vector<VarId> wall(n);
    std::vector<VarId> dwall(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t kc = n - 1 - k;
        const double Th = b.model().variable(hot.cells[k].T).start;
        const double Tc = b.model().variable(cold.cells[kc].T).start;
        std::tie(wall[k], dwall[k]) = detail::state(b, "wall.v" + std::to_string(k + 1) + ".T",
                                                    {.nominal = std::max(0.5 * (Th + Tc), 300.0),
                                                     .start = 0.5 * (Th + Tc),
                                                     .min = 150.0,
                                                     .max = 4000.0,
                                                     .kind = VariableKind::Temperature,
                                                     .unit = "K"});
    }
    std::vector<VarId> cold_surface(n);
    for (std::size_t k = 0; k < n; ++k) cold_surface[n - 1 - k] = wall[k];
    detail::channel_equations(b, hot, wall);
    detail::channel_equations(b, cold, cold_surface);
    const double C = params_.wall_capacity;
    const double qn = std::max(params_.hot.gamma_nom * params_.hot.surface * 10.0, 1.0);
    for (std::size_t k = 0; k < n; ++k) {
        const VarId dT = dwall[k];
        const VarId Qh = hot.Q[k];
        const VarId Qc = cold.Q[n - 1 - k];
        b.equation(
            "wall.v" + std::to_string(k + 1) + ".energy",
            [=](const EvalContext& c) { return C * c(dT) + c(Qh) + c(Qc); }, EquationPhase::Both, qn);
    }
    Contribution c;
    c.ports["hot_out"] = hot.outlet(b.qualify("hot_out"));
    c.ports["cold_out"] = cold.outlet(b.qualify("cold_out"));
    c.ports["hot_in"] = std::move(hot_in);
    c.ports["cold_in"] = std::move(cold_in);
    return c;
}

}  // namespace ssinit

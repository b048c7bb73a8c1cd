#include <array>
#include <cmath>

#include "ssinit/plant.hpp"

namespace ssinit {

namespace {

namespace ec = electrochem;

constexpr double p_ambient = 1.0e5;
constexpr double beta_compressor = 4.5;
constexpr double dp_cooler = 5e3;
constexpr double dp_recuperator_module = 2e3;
constexpr double dp_cell_inlet = 3e3;
constexpr double dp_cell_outlet = 3e3;
constexpr double dp_exhaust = 3e3;

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
        if (hi - lo <= 1e-14 * std::max(1.0, std::abs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

/// Dense Gaussian elimination with partial pivoting.
std::vector<double> solve_dense(std::vector<std::vector<double>> A, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(A[i][k]) > std::abs(A[piv][k])) piv = i;
        std::swap(A[k], A[piv]);
        std::swap(b[k], b[piv]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = A[i][k] / A[k][k];
            for (std::size_t j = k; j < n; ++j) A[i][j] -= f * A[k][j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= A[k][j] * x[j];
        x[k] = s / A[k][k];
    }
    return x;
}

struct Molar {
    std::vector<double> n;
};

Molar to_molar(double w, const std::vector<double>& X, const media::SpeciesTable& t) {
    Molar m{std::vector<double>(t.size())};
    for (std::size_t i = 0; i < t.size(); ++i) m.n[i] = w * X[i] / t[i].molar_mass;
    return m;
}

std::pair<double, std::vector<double>> to_mass(const Molar& m, const media::SpeciesTable& t) {
    double w = 0.0;
    std::vector<double> X(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        X[i] = m.n[i] * t[i].molar_mass;
        w += X[i];
    }
    for (double& x : X) x /= w;
    return {w, X};
}

std::vector<double> partial_pressures(double p, const std::vector<double>& X, const media::SpeciesTable& t) {
    auto Y = media::mole_fractions(X, t);
    for (double& y : Y) y *= p;
    return Y;
}

/// Cell voltage at uniform conditions: the stream state of the outlet volumes.
double cell_voltage(const FuelCellParams& f, double T, double p_a, double p_c, const std::vector<double>& pp_a,
                    const std::vector<double>& pp_c, std::size_t iH2, std::size_t iH2O, std::size_t iO2) {
    const double j = f.j_des;
    const double ocp = ec::open_circuit_potential(T, pp_a[iH2], pp_a[iH2O], pp_c[iO2]);
    const double conc = ec::concentration_loss(T, pp_a[iH2], pp_a[iH2O], pp_c[iO2],
                                               ec::tpb_pressure(p_a, pp_a[iH2], T, f.diffusion_H2, j, false),
                                               ec::tpb_pressure(p_a, pp_a[iH2O], T, f.diffusion_H2O, j, true),
                                               ec::tpb_pressure(p_c, pp_c[iO2], T, f.diffusion_O2, j, false));
    const double act =
        ec::activation_loss(j, ec::exchange_current(T, f.anode_electrode.k, f.anode_electrode.Ea), T, f.alpha) +
        ec::activation_loss(j, ec::exchange_current(T, f.cathode_electrode.k, f.cathode_electrode.Ea), T, f.alpha);
    return ocp - f.R_ohm * j - conc - act;
}

/// Steady counter-flow recuperator with constant cp: hot, cold and wall temperatures per volume.
struct HxSolution {
    std::vector<double> T_hot, T_cold, T_wall;
};

HxSolution solve_recuperator(const HxParams& hx, const StreamState& hot_in, const StreamState& cold_in,
                             const std::vector<double>& p_hot, const std::vector<double>& p_cold,
                             const media::SpeciesTable& t) {
    const int V = hx.volumes;
    const std::size_t n = static_cast<std::size_t>(hx.modules * V);
    const double cp_h = media::cp_mix(hot_in.X, t);
    const double cp_c = media::cp_mix(cold_in.X, t);
    const double Ch = hot_in.w * cp_h;
    const double Cc = cold_in.w * cp_c;
    std::vector<std::vector<double>> A(3 * n, std::vector<double>(3 * n, 0.0));
    std::vector<double> b(3 * n, 0.0);
    const auto h = [&](std::size_t k) { return k; };
    const auto c = [&](std::size_t k) { return n + k; };
    const auto w = [&](std::size_t k) { return 2 * n + k; };
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t kc = n - 1 - k;
        const double gh = heat_transfer_coefficient(hx.hot.gamma_nom, hot_in.w, hx.hot.w_nom, p_hot[k / V],
                                                    hx.hot.p_nom) *
                          hx.hot.surface;
        const double gc = heat_transfer_coefficient(hx.cold.gamma_nom, cold_in.w, hx.cold.w_nom, p_cold[kc / V],
                                                    hx.cold.p_nom) *
                          hx.cold.surface;
        // hot volume k
        A[h(k)][h(k)] = -Ch - gh;
        A[h(k)][w(k)] = gh;
        if (k == 0) {
            b[h(k)] = -Ch * hot_in.T;
        } else {
            A[h(k)][h(k - 1)] = Ch;
        }
        // cold volume kc faces wall k
        A[c(kc)][c(kc)] = -Cc - gc;
        A[c(kc)][w(k)] = gc;
        if (kc == 0) {
            b[c(kc)] = -Cc * cold_in.T;
        } else {
            A[c(kc)][c(kc - 1)] = Cc;
        }
        // wall k
        A[w(k)][w(k)] = gh + gc;
        A[w(k)][h(k)] = -gh;
        A[w(k)][c(kc)] = -gc;
    }
    const auto x = solve_dense(std::move(A), std::move(b));
    HxSolution s;
    s.T_hot.assign(x.begin(), x.begin() + n);
    s.T_cold.assign(x.begin() + n, x.begin() + 2 * n);
    s.T_wall.assign(x.begin() + 2 * n, x.end());
    return s;
}

StreamState stream(double p, double w, double T, std::vector<double> X) { return {p, w, T, std::move(X)}; }

}  // namespace

DemoDesign design_demo_point() {
    DemoDesign d;
    d.species = std::make_shared<const media::SpeciesTable>(media::SpeciesTable::standard());
    const auto& t = *d.species;
    const std::size_t iCH4 = t.index_of("CH4"), iH2 = t.index_of("H2"), iH2O = t.index_of("H2O"),
                      iCO = t.index_of("CO"), iCO2 = t.index_of("CO2"), iO2 = t.index_of("O2"),
                      iN2 = t.index_of("N2");
    const auto mix = [&](std::initializer_list<std::pair<std::size_t, double>> parts) {
        std::vector<double> X(t.size(), 0.0);
        for (const auto& [i, x] : parts) X[i] = x;
        return X;
    };
    const auto X_mod = mix({{iCO2, 0.70}, {iO2, 0.25}, {iH2O, 0.03}, {iN2, 0.02}});
    const auto X_fuel = mix({{iCH4, 0.3077}, {iH2O, 0.6923}});
    const double T_fuel = 800.0;
    const double w_m = d.moderator_flow;
    const double w_f = d.fuel_flow;
    const double I = d.current;
    const double n_e = I / (2.0 * media::F);

    // Pressures follow from the fixed design losses.
    const double p_c_in = p_ambient;
    const double p_c_out = beta_compressor * p_c_in;
    const double p_cond = p_c_out - dp_cooler;
    const std::vector<double> p_cold{p_cond - dp_recuperator_module, p_cond - 2 * dp_recuperator_module};
    const double p_cath = p_cold.back() - dp_cell_inlet;
    const double p_comb = p_cath - dp_cell_outlet;
    const double p_an = p_comb + dp_cell_outlet;
    const double p_fuel = p_an + dp_cell_inlet;
    const std::vector<double> p_hot{p_ambient + dp_exhaust + dp_recuperator_module, p_ambient + dp_exhaust};
    const double p_t_out = p_hot.front() + dp_recuperator_module;

    // Compression, intercooling and condensation.
    d.compressor = {beta_compressor, 0.85};
    const double h_c_in = media::enthalpy(300.0, X_mod, t);
    const double h_c_is = media::enthalpy(media::isentropic_temperature(300.0, 1.0, beta_compressor, X_mod, t), X_mod, t);
    const double h_c_out = h_c_in + (h_c_is - h_c_in) / d.compressor.eta_is;
    const double T_c_out = media::temperature(h_c_out, X_mod, t);
    d.compressor_power = w_m * (h_c_out - h_c_in);
    d.intercooler = {0.05, 320.0};
    d.condenser = CondenserParams{};
    d.condenser.volume = 0.05;
    const auto split = condenser_split(p_cond, X_mod, d.condenser, t);
    d.condensate = w_m * split.liquid_fraction;
    const double w_g = w_m - d.condensate;
    const auto X_g = split.X_out;
    const double T_cond = d.condenser.T_out;

    // Fuel cell parameters.
    FuelCellParams& f = d.fuel_cell;
    f.volumes = 5;
    f.area = 5.0;
    f.j_des = I / (f.area * f.volumes);
    f.R_ohm = 3e-5;
    f.alpha = 0.5;
    f.pen_capacity = 5e3;
    f.reforming = media::steam_reforming();
    f.reforming.k0 = 2000.0;
    f.shift = media::water_gas_shift();
    f.shift.k0 = 5000.0;

    // Anode outlet composition: complete reforming, electrochemical conversion, shift equilibrium.
    Molar an = to_molar(w_f, X_fuel, t);
    an.n[iCO] += an.n[iCH4];
    an.n[iH2] += 3.0 * an.n[iCH4];
    an.n[iH2O] -= an.n[iCH4];
    an.n[iCH4] = 0.0;
    an.n[iH2] -= n_e;
    an.n[iH2O] += n_e;
    const auto shift_equilibrium = [&](double T) {
        Molar m = an;
        const double K = media::equilibrium_constant(f.shift, T);
        const double x = bisect(
            [&](double e) { return (m.n[iCO2] + e) * (m.n[iH2] + e) - K * (m.n[iCO] - e) * (m.n[iH2O] - e); }, 0.0,
            std::min(m.n[iCO], m.n[iH2O]));
        m.n[iCO] -= x;
        m.n[iH2O] -= x;
        m.n[iCO2] += x;
        m.n[iH2] += x;
        return to_mass(m, t);
    };

    const auto set_electrochemistry = [&](double T_nom) {
        f.T_nom = T_nom;
        const double nF = ec::electrons * media::F;
        const auto k_for = [&](double j0, double Ea) {
            return j0 * nF / (media::R * T_nom) * std::exp(Ea / (media::R * T_nom));
        };
        f.anode_electrode = {k_for(5000.0, 1.0e5), 1.0e5};
        f.cathode_electrode = {k_for(2000.0, 1.2e5), 1.2e5};
        const double lump = 4.0 * media::F / (media::R * T_nom * f.j_des);
        f.diffusion_H2 = 0.05 * lump;
        f.diffusion_H2O = 0.05 * lump;
        f.diffusion_O2 = 0.1 * lump;
    };
    set_electrochemistry(1100.0);

    const auto cathode_outlet = [&](double w_in, const std::vector<double>& X_in) {
        Molar m = to_molar(w_in, X_in, t);
        m.n[iO2] -= 0.5 * n_e;
        return to_mass(m, t);
    };
    const auto [w_co, X_co] = cathode_outlet(w_g, X_g);

    // Recuperator geometry.
    HxParams& hx = d.recuperator;
    hx.modules = 2;
    hx.volumes = 3;
    hx.wall_capacity = 2e4;

    d.turbine.eta_is = 0.88;
    d.combustor = {0.05, 2};

    double T_cold_out = 1000.0;
    double T_fc = 1100.0;
    double E = 0.8;
    StreamState comb_out, turb_out, hot_out, anode_out;
    std::vector<double> X_ao;
    double w_ao = 0.0;
    HxSolution hxs;
    for (int it = 0; it < 200; ++it) {
        d.loop_iterations = it + 1;
        // Fuel cell outlet temperature from the overall energy balance.
        const double H_in = w_f * media::enthalpy(T_fuel, X_fuel, t) + w_g * media::enthalpy(T_cold_out, X_g, t);
        for (int k = 0; k < 50; ++k) {
            const auto [w_a, X_a] = shift_equilibrium(T_fc);
            const double P_el = E * I;
            const double T_new = bisect(
                [&](double T) {
                    return w_a * media::enthalpy(T, X_a, t) + w_co * media::enthalpy(T, X_co, t) + P_el - H_in;
                },
                300.0, 3000.0);
            set_electrochemistry(T_new);
            const auto pp_a = partial_pressures(p_an, X_a, t);
            const auto pp_c = partial_pressures(p_cath, X_co, t);
            const double E_new = cell_voltage(f, T_new, p_an, p_cath, pp_a, pp_c, iH2, iH2O, iO2);
            const bool done = std::abs(T_new - T_fc) < 1e-10 && std::abs(E_new - E) < 1e-13;
            T_fc = T_new;
            E = E_new;
            w_ao = w_a;
            X_ao = X_a;
            if (done) break;
        }
        // Combustor: adiabatic complete combustion of both cell exhausts.
        std::vector<double> m(t.size(), 0.0);
        for (std::size_t i = 0; i < t.size(); ++i) m[i] = w_ao * X_ao[i] + w_co * X_co[i];
        const auto burnt = complete_combustion(m, t);
        double w_tot = 0.0;
        for (double x : burnt) w_tot += x;
        std::vector<double> X_comb(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) X_comb[i] = burnt[i] / w_tot;
        const double H_comb = w_ao * media::enthalpy(T_fc, X_ao, t) + w_co * media::enthalpy(T_fc, X_co, t);
        const double T_comb = media::temperature(H_comb / w_tot, X_comb, t);
        comb_out = stream(p_comb, w_tot, T_comb, X_comb);
        // Turbine expansion.
        const double h_t_in = H_comb / w_tot;
        const double h_t_is = media::enthalpy(media::isentropic_temperature(T_comb, p_comb, p_t_out, X_comb, t), X_comb, t);
        const double h_t_out = h_t_in - d.turbine.eta_is * (h_t_in - h_t_is);
        turb_out = stream(p_t_out, w_tot, media::temperature(h_t_out, X_comb, t), X_comb);
        d.turbine_power = w_tot * (h_t_in - h_t_out);
        // Recuperator.
        hx.hot = {0.05, 8.0, 100.0, w_tot, p_t_out, {dp_recuperator_module, w_tot, 1.0, LossLaw::AlwaysLinear}};
        hx.cold = {0.05, 8.0, 100.0, w_g, p_cond, {dp_recuperator_module, w_g, 1.0, LossLaw::AlwaysLinear}};
        const StreamState cold_in = stream(p_cond, w_g, T_cond, X_g);
        hxs = solve_recuperator(hx, turb_out, cold_in, p_hot, p_cold, t);
        const double T_new = hxs.T_cold.back();
        const bool converged = std::abs(T_new - T_cold_out) < 1e-10;
        T_cold_out = T_new;
        if (converged) break;
    }
    hot_out = stream(p_hot.back(), comb_out.w, hxs.T_hot.back(), comb_out.X);
    d.recuperator_duty = comb_out.w * (media::enthalpy(turb_out.T, comb_out.X, t) -
                                       media::enthalpy(hot_out.T, comb_out.X, t));
    d.combustor_temperature = comb_out.T;
    d.cell_voltage = E;
    d.stack_power = E * I;

    // Frozen fuel-cell data and simplified polarization through the design point.
    const auto pp_a = partial_pressures(p_an, X_ao, t);
    const auto pp_c = partial_pressures(p_cath, X_co, t);
    f.p_H2_des = pp_a[iH2];
    f.p_H2O_des = pp_a[iH2O];
    f.p_O2_des = pp_c[iO2];
    f.anode = {0.01, 5.0, 200.0, w_f, p_fuel, {dp_cell_inlet, w_f, 1.0, LossLaw::AlwaysLinear}};
    f.cathode = {0.01, 5.0, 200.0, w_g, p_cold.back(), {dp_cell_inlet, w_g, 1.0, LossLaw::AlwaysLinear}};
    const FuelCell probe("probe", f);
    f.b = probe.frozen_ocp() - probe.frozen_concentration_loss(f.j_des);
    f.a = (d.cell_voltage - f.b) / I;
    if (!(f.a < 0.0)) f.a = -1e-7;

    const double rho_t = media::density(p_comb, comb_out.T, comb_out.X, t);
    const double beta_t = p_comb / p_t_out;
    d.turbine.K_t = comb_out.w / (std::sqrt(p_comb * rho_t) * std::sqrt(1.0 - 1.0 / (beta_t * beta_t)));
    d.turbine.w_nom = comb_out.w;
    d.turbine.p_nom = p_comb;

    const auto loss = [&](const StreamState& up, double dp) {
        return PressureLossParams{dp, up.w, media::density(up.p, up.T, up.X, t), LossLaw::QuadraticWithHomotopy};
    };
    const StreamState s_mod = stream(p_c_in, w_m, 300.0, X_mod);
    const StreamState s_comp = stream(p_c_out, w_m, T_c_out, X_mod);
    const StreamState s_ic = stream(p_c_out, w_m, d.intercooler.T_out, X_mod);
    const StreamState s_cool = stream(p_cond, w_m, d.intercooler.T_out, X_mod);
    const StreamState s_cond = stream(p_cond, w_g, T_cond, X_g);
    const StreamState s_recup = stream(p_cold.back(), w_g, T_cold_out, X_g);
    const StreamState s_cath = stream(p_cath, w_co, T_fc, X_co);
    const StreamState s_cath_loss = stream(p_comb, w_co, T_fc, X_co);
    const StreamState s_fuel = stream(p_fuel, w_f, T_fuel, X_fuel);
    anode_out = stream(p_an, w_ao, T_fc, X_ao);
    const StreamState s_an_loss = stream(p_comb, w_ao, T_fc, X_ao);
    const StreamState s_sink = stream(p_ambient, comb_out.w, hot_out.T, comb_out.X);

    d.losses["cool_loss"] = loss(s_ic, dp_cooler);
    d.losses["cathode_loss"] = loss(s_cath, dp_cell_outlet);
    d.losses["anode_loss"] = loss(anode_out, dp_cell_outlet);
    d.losses["exhaust_loss"] = loss(hot_out, dp_exhaust);

    auto& s = d.streams;
    s["moderator.out"] = s_mod;
    s["compressor.in"] = s_mod;
    s["compressor.out"] = s_comp;
    s["intercooler.in"] = s_comp;
    s["intercooler.out"] = s_ic;
    s["cool_loss.in"] = s_ic;
    s["cool_loss.out"] = s_cool;
    s["condenser.in"] = s_cool;
    s["condenser.out"] = s_cond;
    s["recuperator.cold_in"] = s_cond;
    s["recuperator.cold_out"] = s_recup;
    s["sofc.cathode_in"] = s_recup;
    s["sofc.cathode_out"] = s_cath;
    s["cathode_loss.in"] = s_cath;
    s["cathode_loss.out"] = s_cath_loss;
    s["combustor.in2"] = s_cath_loss;
    s["fuel.out"] = s_fuel;
    s["sofc.anode_in"] = s_fuel;
    s["sofc.anode_out"] = anode_out;
    s["anode_loss.in"] = anode_out;
    s["anode_loss.out"] = s_an_loss;
    s["combustor.in1"] = s_an_loss;
    s["combustor.out"] = comb_out;
    s["turbine.in"] = comb_out;
    s["turbine.out"] = turb_out;
    s["recuperator.hot_in"] = turb_out;
    s["recuperator.hot_out"] = hot_out;
    s["exhaust_loss.in"] = hot_out;
    s["exhaust_loss.out"] = s_sink;
    s["sink.in"] = s_sink;
    return d;
}

PlantGraph build_demo_plant(const DemoDesign& d) {
    PlantGraph g;
    g.species = d.species;
    const auto& s = d.streams;
    const auto X_of = [&](const std::string& port) { return s.at(port).X; };

    g.emplace<FluidSource>("moderator", SourceParams{d.moderator_flow, s.at("moderator.out").T, X_of("moderator.out")});
    g.emplace<Compressor>("compressor", d.compressor);
    g.emplace<Intercooler>("intercooler", d.intercooler);
    g.emplace<PressureLoss>("cool_loss", d.losses.at("cool_loss"));
    g.emplace<Condenser>("condenser", d.condenser);
    g.emplace<HeatExchanger>("recuperator", d.recuperator);
    g.emplace<FuelCell>("sofc", d.fuel_cell);
    g.emplace<PressureLoss>("cathode_loss", d.losses.at("cathode_loss"));
    g.emplace<FluidSource>("fuel", SourceParams{d.fuel_flow, s.at("fuel.out").T, X_of("fuel.out")});
    g.emplace<PressureLoss>("anode_loss", d.losses.at("anode_loss"));
    g.emplace<Combustor>("combustor", d.combustor);
    g.emplace<Turbine>("turbine", d.turbine);
    g.emplace<PressureLoss>("exhaust_loss", d.losses.at("exhaust_loss"));
    g.emplace<FluidSink>("sink", p_ambient);

    const auto link = [&](const std::string& from, const std::string& to) { g.connect(from, to, s.at(from)); };
    link("moderator.out", "compressor.in");
    link("compressor.out", "intercooler.in");
    link("intercooler.out", "cool_loss.in");
    link("cool_loss.out", "condenser.in");
    link("condenser.out", "recuperator.cold_in");
    link("recuperator.cold_out", "sofc.cathode_in");
    link("sofc.cathode_out", "cathode_loss.in");
    link("cathode_loss.out", "combustor.in2");
    link("fuel.out", "sofc.anode_in");
    link("sofc.anode_out", "anode_loss.in");
    link("anode_loss.out", "combustor.in1");
    link("combustor.out", "turbine.in");
    link("turbine.out", "recuperator.hot_in");
    link("recuperator.hot_out", "exhaust_loss.in");
    link("exhaust_loss.out", "sink.in");
    // Component outlet streams not set by a connection start from the downstream design.
    for (const auto& [port, state] : s) g.design.try_emplace(port, state);

    for (const auto& [to, name] : std::vector<std::pair<std::string, std::string>>{
             {"compressor.in", "dec_compressor"},
             {"intercooler.in", "dec_intercooler"},
             {"condenser.in", "dec_condenser"},
             {"recuperator.cold_in", "dec_recuperator_cold"},
             {"sofc.cathode_in", "dec_cathode"},
             {"sofc.anode_in", "dec_anode"},
             {"combustor.in1", "dec_combustor_anode"},
             {"combustor.in2", "dec_combustor_cathode"},
             {"turbine.in", "dec_turbine"},
             {"recuperator.hot_in", "dec_recuperator_hot"},
         }) {
        insert_decoupler(g, to, name);
    }

    g.inputs.push_back({.name = "fuel_flow",
                        .actuator = "fuel.w",
                        .u_des = d.fuel_flow,
                        .u_norm = d.fuel_flow,
                        .partner = "turbine_power"});
    g.inputs.push_back({.name = "moderator_flow",
                        .actuator = "moderator.w",
                        .u_des = d.moderator_flow,
                        .u_norm = d.moderator_flow,
                        .partner = "tit"});
    g.inputs.push_back({.name = "current", .actuator = "sofc.I", .u_des = d.current, .u_norm = d.current});
    g.outputs.push_back({.name = "turbine_power",
                         .sensor = "turbine.power",
                         .y_des = d.turbine_power,
                         .y_offdes = 0.8 * d.turbine_power,
                         .y_norm = d.turbine_power});
    g.outputs.push_back({.name = "tit",
                         .sensor = "combustor.T",
                         .y_des = d.combustor_temperature,
                         .y_offdes = d.combustor_temperature,
                         .y_norm = d.combustor_temperature});
    g.outputs.push_back({.name = "stack_power",
                         .sensor = "sofc.P",
                         .y_des = d.stack_power,
                         .y_offdes = d.stack_power,
                         .y_norm = d.stack_power});
    return g;
}

PlantGraph build_demo_plant() { return build_demo_plant(design_demo_point()); }

}  // namespace ssinit

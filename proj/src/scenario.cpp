#include "evoflow/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "evoflow/characteristics.hpp"
#include "evoflow/csv.hpp"
#include "evoflow/diagnostics.hpp"
#include "evoflow/euler1d.hpp"
#include "evoflow/thermo.hpp"

namespace evoflow::scenario {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct KindSpec {
    Kind kind;
    const char* name;
    const char* description;
    double default_t_end;
    int default_frames;
    std::set<std::string> keys;
};

const std::vector<KindSpec>& kind_table()
{
    static const std::vector<KindSpec> table = {
        {Kind::Sod, "sod",
         "Sod shock tube; three-wave structure validated against the exact Riemann fan",
         0.25, 50, {"rho_l", "u_l", "p_l", "rho_r", "u_r", "p_r", "x0"}},
        {Kind::SimpleWave, "simple_wave",
         "right-running isentropic simple wave that steepens into a shock",
         2.0, 100, {"eps", "rho0", "p0"}},
        {Kind::IsentropicAdvection, "isentropic_advection",
         "smooth density pulse carried by a uniform flow; entropy rides the trajectories",
         0.5, 25, {"amp", "u0", "rho0", "p0"}},
        {Kind::Uniform, "uniform",
         "uniform gas at rest, the quiet control case",
         0.5, 10, {"rho0", "u0", "p0"}},
        {Kind::Impulsive, "impulsive",
         "uniform gas accelerated through a smooth time ramp; purely nonstationary action",
         1.0, 60, {"U", "t_ramp", "rho0", "p0"}},
        {Kind::ShearLayer, "shear_layer",
         "stationary tanh shear profile with viscous stress supplied as input",
         0.5, 20, {"U", "delta", "mu", "rho0", "p0"}},
        {Kind::Carnot, "carnot",
         "Carnot cycle between two reservoirs, optionally perturbed by friction",
         1.0, 10, {"T_h", "T_c", "steps", "compression", "friction"}},
        {Kind::EntropyContact, "entropy_contact",
         "resting gas with a smooth entropy gradient; exercises the trajectory break relation",
         0.2, 10, {"amp", "delta", "rho0", "p0"}},
    };
    return table;
}

const std::set<std::string>& common_keys()
{
    static const std::set<std::string> keys = {
        "name", "N", "cfl", "gamma", "R", "t_end", "outputs", "frames",
        "seeds", "window"};
    return keys;
}

const KindSpec& spec_for(const std::string& name)
{
    for (const auto& spec : kind_table())
        if (name == spec.name) return spec;
    throw ConfigError("unknown scenario name '" + name + "'");
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, int line, const std::string& key)
{
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return d;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line) + ": value for '" + key +
                          "' is not a number: '" + v + "'");
    }
}

int parse_int(const std::string& v, int line, const std::string& key)
{
    const double d = parse_double(v, line, key);
    const int i = static_cast<int>(std::llround(d));
    if (std::abs(d - i) > 0.0)
        throw ConfigError("line " + std::to_string(line) + ": value for '" + key +
                          "' must be an integer");
    return i;
}

std::string g9(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text)
{
    struct Entry {
        int line;
        std::string value;
    };
    std::map<std::string, Entry> entries;

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        if (entries.count(key))
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" +
                              key + "'");
        entries[key] = {lineno, value};
    }

    const auto name_it = entries.find("name");
    if (name_it == entries.end())
        throw ConfigError("missing required key 'name'");

    ScenarioConfig cfg;
    cfg.name = name_it->second.value;
    const KindSpec* spec = nullptr;
    try {
        spec = &spec_for(cfg.name);
    } catch (const ConfigError&) {
        throw ConfigError("line " + std::to_string(name_it->second.line) +
                          ": unknown scenario name '" + cfg.name + "'");
    }
    cfg.kind = spec->kind;

    for (const auto& [key, entry] : entries) {
        if (key == "name") continue;
        if (!common_keys().count(key) && !spec->keys.count(key))
            throw ConfigError("line " + std::to_string(entry.line) + ": unknown key '" +
                              key + "' for scenario '" + cfg.name + "'");
    }

    auto fail = [&](const std::string& key, const std::string& what) -> void {
        throw ConfigError("line " + std::to_string(entries.at(key).line) + ": " + what);
    };
    auto get_d = [&](const std::string& key, double& out) {
        const auto it = entries.find(key);
        if (it != entries.end()) out = parse_double(it->second.value, it->second.line, key);
    };
    auto get_i = [&](const std::string& key, int& out) {
        const auto it = entries.find(key);
        if (it != entries.end()) out = parse_int(it->second.value, it->second.line, key);
    };

    get_i("N", cfg.N);
    get_d("cfl", cfg.cfl);
    get_d("gamma", cfg.gamma);
    get_d("R", cfg.R);
    get_d("t_end", cfg.t_end);
    get_i("frames", cfg.frames);
    get_i("seeds", cfg.seeds);
    get_i("window", cfg.window);
    get_d("rho_l", cfg.rho_l);
    get_d("u_l", cfg.u_l);
    get_d("p_l", cfg.p_l);
    get_d("rho_r", cfg.rho_r);
    get_d("u_r", cfg.u_r);
    get_d("p_r", cfg.p_r);
    get_d("x0", cfg.x0);
    get_d("eps", cfg.eps);
    get_d("amp", cfg.amp);
    get_d("u0", cfg.u0);
    get_d("rho0", cfg.rho0);
    get_d("p0", cfg.p0);
    get_d("U", cfg.U);
    get_d("t_ramp", cfg.t_ramp);
    get_d("delta", cfg.delta);
    get_d("mu", cfg.mu);
    get_d("T_h", cfg.T_h);
    get_d("T_c", cfg.T_c);
    get_i("steps", cfg.steps);
    get_d("compression", cfg.compression);
    get_d("friction", cfg.friction);

    if (const auto it = entries.find("outputs"); it != entries.end()) {
        std::stringstream ss(it->second.value);
        std::string tok;
        while (std::getline(ss, tok, ','))
            cfg.outputs.push_back(parse_double(trim(tok), it->second.line, "outputs"));
        if (cfg.outputs.empty()) fail("outputs", "outputs list is empty");
    }

    if (cfg.t_end == 0.0) cfg.t_end = spec->default_t_end;
    if (cfg.frames == 0) cfg.frames = spec->default_frames;

    if (entries.count("N") && cfg.N < 16) fail("N", "N must be >= 16");
    if (entries.count("cfl") && !(cfg.cfl > 0.0 && cfg.cfl <= 0.9))
        fail("cfl", "cfl must lie in (0, 0.9]");
    if (entries.count("gamma") && !(cfg.gamma > 1.0)) fail("gamma", "gamma must exceed 1");
    if (entries.count("R") && !(cfg.R > 0.0)) fail("R", "R must be positive");
    if (entries.count("t_end") && !(cfg.t_end > 0.0)) fail("t_end", "t_end must be positive");
    if (entries.count("frames") && cfg.frames < 3) fail("frames", "frames must be >= 3");
    if (entries.count("seeds") && cfg.seeds < 3) fail("seeds", "seeds must be >= 3");
    if (entries.count("window") && cfg.window != 0 && cfg.window < 4)
        fail("window", "window must be >= 4 cells");
    for (double t : cfg.outputs)
        if (t < 0.0 || t > cfg.t_end)
            fail("outputs", "output times must lie in [0, t_end]");

    switch (cfg.kind) {
        case Kind::Sod:
            if (!(cfg.rho_l > 0.0 && cfg.p_l > 0.0 && cfg.rho_r > 0.0 && cfg.p_r > 0.0))
                throw ConfigError("sod: left/right states must have positive rho and p");
            if (!(cfg.x0 > 0.0 && cfg.x0 < 1.0))
                throw ConfigError("sod: diaphragm x0 must lie in (0, 1)");
            break;
        case Kind::SimpleWave:
            if (!(cfg.eps > 0.0 && cfg.eps <= 0.3))
                throw ConfigError("simple_wave: eps must lie in (0, 0.3]");
            break;
        case Kind::IsentropicAdvection:
        case Kind::EntropyContact:
            if (!(cfg.amp > 0.0 && cfg.amp < 0.9))
                throw ConfigError(cfg.name + ": amp must lie in (0, 0.9)");
            break;
        case Kind::Impulsive:
            if (!(cfg.t_ramp > 0.0 && cfg.t_ramp <= cfg.t_end))
                throw ConfigError("impulsive: t_ramp must lie in (0, t_end]");
            break;
        case Kind::ShearLayer:
            if (!(cfg.delta > 0.0)) throw ConfigError("shear_layer: delta must be positive");
            if (!(cfg.mu >= 0.0)) throw ConfigError("shear_layer: mu must be >= 0");
            break;
        case Kind::Carnot:
            if (!(cfg.T_h > cfg.T_c && cfg.T_c > 0.0))
                throw ConfigError("carnot: need T_h > T_c > 0");
            if (cfg.steps < 8) throw ConfigError("carnot: steps must be >= 8");
            if (!(cfg.compression > 1.0))
                throw ConfigError("carnot: compression must exceed 1");
            if (!(cfg.friction >= 0.0)) throw ConfigError("carnot: friction must be >= 0");
            break;
        case Kind::Uniform:
            break;
    }
    if (!(cfg.rho0 > 0.0 && cfg.p0 > 0.0))
        throw ConfigError(cfg.name + ": rho0 and p0 must be positive");
    return cfg;
}

ScenarioConfig parse_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

const std::vector<ScenarioInfo>& list_scenarios()
{
    static const std::vector<ScenarioInfo> catalog = [] {
        std::vector<ScenarioInfo> v;
        for (const auto& spec : kind_table())
            v.push_back({spec.name, spec.description});
        return v;
    }();
    return catalog;
}

std::string RunReport::to_text() const
{
    std::ostringstream out;
    out << "scenario = " << scenario << '\n'
        << "N = " << N << '\n'
        << "gamma = " << g9(gamma) << '\n'
        << "R = " << g9(R) << '\n'
        << "cfl = " << g9(cfl) << '\n'
        << "t_end = " << g9(t_end) << '\n'
        << "mass_defect = " << g9(mass_defect) << '\n'
        << "momentum_defect = " << g9(momentum_defect) << '\n'
        << "energy_defect = " << g9(energy_defect) << '\n'
        << "l1_rho_error = " << g9(l1_rho_error) << '\n'
        << "entropy_drift = " << g9(entropy_drift) << '\n'
        << "instability_class = " << instability_class << '\n'
        << "K_max = " << g9(K_max) << '\n'
        << "noise_floor_K = " << g9(noise_floor_K) << '\n'
        << "event_count = " << event_count << '\n'
        << "t_star_analytic = " << g9(t_star_analytic) << '\n'
        << "t_star_first_event = " << g9(t_star_first_event) << '\n'
        << "break_relation_max_err = " << g9(break_relation_max_err) << '\n'
        << "clausius_dS = " << g9(clausius_dS) << '\n'
        << "clausius_integral = " << g9(clausius_integral) << '\n'
        << "clausius_verdict = " << clausius_verdict << '\n'
        << "first_law_residual = " << g9(first_law_residual) << '\n'
        << "wall_ms = " << g9(wall_ms) << '\n';
    if (!check_performed) {
        out << "check = not run\n";
    } else {
        out << "check = " << (check_passed ? "PASS" : "FAIL") << '\n';
        for (const auto& line : check_lines) out << line << '\n';
    }
    return out.str();
}

namespace {

std::vector<double> make_outputs(const ScenarioConfig& cfg)
{
    if (!cfg.outputs.empty()) {
        std::vector<double> out = cfg.outputs;
        std::sort(out.begin(), out.end());
        return out;
    }
    std::vector<double> out(cfg.frames + 1);
    for (int i = 0; i <= cfg.frames; ++i)
        out[i] = cfg.t_end * static_cast<double>(i) / cfg.frames;
    return out;
}

std::vector<double> make_seeds(const ScenarioConfig& cfg, double x_lo, double x_hi)
{
    std::vector<double> seeds(cfg.seeds);
    const double h = (x_hi - x_lo) / cfg.seeds;
    for (int k = 0; k < cfg.seeds; ++k) seeds[k] = x_lo + (k + 0.5) * h;
    return seeds;
}

void write_slices(const std::string& dir, const diagnostics::FlowFields& f)
{
    csv::Writer w(dir + "/slices.csv", "t,x,rho,u,p,s,a");
    for (Eigen::Index m = 0; m < f.nt(); ++m) {
        for (Eigen::Index j = 0; j < f.nx(); ++j) {
            const double rho = f.rho(m, j), u = f.u(m, j), p = f.p(m, j);
            w.row(f.t[m], f.x[j], rho, u, p, gasdyn_entropy(p, rho, f.gas),
                  sound_speed(p, rho, f.gas));
        }
    }
}

void write_diagnostics(const std::string& dir, const diagnostics::FlowFields& f,
                       const Eigen::ArrayXXd& A1, const Eigen::ArrayXXd& Anu,
                       const Eigen::ArrayXXd& K,
                       const diagnostics::SourceBreakdown& src,
                       const std::string& cls)
{
    csv::Writer w(dir + "/diagnostics.csv",
                  "t,x,A1,Anu,K,src_nonstat,src_force,src_visc,src_heat,class");
    for (Eigen::Index m = 0; m < f.nt(); ++m)
        for (Eigen::Index j = 0; j < f.nx(); ++j)
            w.row(f.t[m], f.x[j], A1(m, j), Anu(m, j), K(m, j),
                  src.nonstationary(m, j), src.nonpotential(m, j),
                  src.viscous(m, j), src.heat(m, j), cls);
}

void write_events(const std::string& dir,
                  const std::vector<diagnostics::TransitionEvent>& events)
{
    csv::Writer w(dir + "/events.csv", "t,x,window,K_before,K_after");
    for (const auto& e : events) w.row(e.t, e.x, e.window, e.K_before, e.K_after);
}

void write_empty_csvs(const std::string& dir)
{
    csv::Writer(dir + "/slices.csv", "t,x,rho,u,p,s,a");
    csv::Writer(dir + "/diagnostics.csv",
                "t,x,A1,Anu,K,src_nonstat,src_force,src_visc,src_heat,class");
    csv::Writer(dir + "/events.csv", "t,x,window,K_before,K_after");
}

struct ConservedSums {
    double mass, momentum, energy;
};

ConservedSums conserved_sums(const euler1d::PrimField& w, double dx,
                             const GasParams& gas)
{
    const double mass = w.rho.sum() * dx;
    const double mom = (w.rho * w.u).sum() * dx;
    const double E = (w.p / (gas.gamma - 1.0) + 0.5 * w.rho * w.u.square()).sum() * dx;
    return {mass, mom, E};
}

struct CheckList {
    bool passed = true;
    std::vector<std::string> lines;

    void require(bool ok, const std::string& what)
    {
        lines.push_back(std::string(ok ? "[PASS] " : "[FAIL] ") + what);
        passed = passed && ok;
    }
};

// Shared solver + diagnostics pipeline for the flow scenarios.
struct PipelineResult {
    euler1d::Solution1D sol;
    diagnostics::FlowFields fields;
    diagnostics::SourceBreakdown src;
    Eigen::ArrayXXd A1_xt, Anu_xt, K_xt;
    diagnostics::NoiseFloors floors;
    double K_max = 0.0;
    diagnostics::InstabilityClass cls = diagnostics::InstabilityClass::Stable;
    std::vector<diagnostics::TransitionEvent> events;
};

PipelineResult run_pipeline(const euler1d::RunConfig& rc, int window_cells)
{
    PipelineResult r;
    r.sol = euler1d::run(rc);
    r.fields = diagnostics::FlowFields::from_solution(r.sol);
    const diagnostics::Frame frame = diagnostics::frame_from_solution(r.sol);
    const diagnostics::EvolutionaryForm form =
        diagnostics::build_evolutionary_form(r.fields, frame);
    r.src = diagnostics::source_breakdown(r.fields);
    r.A1_xt = diagnostics::a1_viscous(r.fields).A1;
    r.Anu_xt = diagnostics::a_nu(r.fields);
    r.K_xt = diagnostics::commutator_on_grid(form, r.fields);
    r.K_max = diagnostics::evolutionary_commutator(form).max_abs;
    r.floors = diagnostics::noise_floor(r.fields,
                                        static_cast<int>(r.sol.trajectories.size()));
    r.cls = diagnostics::classify(r.src, r.A1_xt, r.floors);
    r.events = diagnostics::transition_detector(r.sol, window_cells);
    return r;
}

double max_entropy_drift(const euler1d::Solution1D& sol)
{
    double drift = 0.0;
    for (const auto& tr : sol.trajectories)
        for (double s : tr.s) drift = std::max(drift, std::abs(s - tr.s.front()));
    return drift;
}

// Analytic-field pipeline for the supplied-field scenarios.
struct AnalyticResult {
    diagnostics::FlowFields fields;
    diagnostics::SourceBreakdown src;
    Eigen::ArrayXXd A1_xt, Anu_xt, K_xt;
    diagnostics::NoiseFloors floors;
    double K_max = 0.0;
    diagnostics::InstabilityClass cls = diagnostics::InstabilityClass::Stable;
};

AnalyticResult run_analytic(const diagnostics::FlowFields& fields, int n_seeds)
{
    AnalyticResult r;
    r.fields = fields;
    const diagnostics::Frame frame = diagnostics::build_frame(r.fields, n_seeds);
    const diagnostics::EvolutionaryForm form =
        diagnostics::build_evolutionary_form(r.fields, frame);
    r.src = diagnostics::source_breakdown(r.fields);
    r.A1_xt = diagnostics::a1_viscous(r.fields).A1;
    r.Anu_xt = diagnostics::a_nu(r.fields);
    r.K_xt = diagnostics::commutator_on_grid(form, r.fields);
    r.K_max = diagnostics::evolutionary_commutator(form).max_abs;
    r.floors = diagnostics::noise_floor(r.fields, n_seeds);
    r.cls = diagnostics::classify(r.src, r.A1_xt, r.floors);
    return r;
}

}  // namespace

RunReport run_scenario(const ScenarioConfig& cfg, const std::string& out_dir,
                       bool check)
{
    namespace fs = std::filesystem;
    const auto t_begin = std::chrono::steady_clock::now();
    fs::create_directories(out_dir);

    const GasParams gas(cfg.gamma, cfg.R);
    RunReport rep;
    rep.scenario = cfg.name;
    rep.N = cfg.N;
    rep.gamma = cfg.gamma;
    rep.R = cfg.R;
    rep.cfl = cfg.cfl;
    rep.t_end = cfg.t_end;
    CheckList checks;

    const int window = cfg.window > 0 ? cfg.window : std::max(8, cfg.N / 8);

    auto finish = [&](RunReport& r) -> RunReport& {
        r.check_performed = check;
        if (check) {
            r.check_passed = checks.passed;
            r.check_lines = checks.lines;
        }
        r.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t_begin)
                        .count();
        std::ofstream out(out_dir + "/report.txt", std::ios::binary);
        out << r.to_text();
        return r;
    };

    if (cfg.kind == Kind::Carnot) {
        const auto cycle = thermo::carnot_cycle(gas, cfg.T_h, cfg.T_c, 1.0,
                                                cfg.compression, cfg.steps / 4,
                                                cfg.friction);
        const auto res = thermo::clausius(cycle);
        rep.clausius_dS = res.dS;
        rep.clausius_integral = res.heat_over_T;
        rep.clausius_verdict = thermo::to_string(res.verdict);
        rep.first_law_residual = thermo::first_law_residual(cycle);
        write_empty_csvs(out_dir);
        if (check) {
            const double loop_tol = std::max(1e-6 * std::pow(4000.0 / cfg.steps, 2.0), 1e-10);
            if (cfg.friction == 0.0) {
                checks.require(std::abs(res.heat_over_T) < loop_tol,
                               "|loop dQ/T| = " + g9(std::abs(res.heat_over_T)) +
                                   " < " + g9(loop_tol));
                checks.require(res.verdict == thermo::Clausius::Reversible,
                               "cycle classified reversible");
            } else {
                checks.require(res.verdict == thermo::Clausius::IrreversibleConsistent,
                               "cycle classified irreversible-consistent");
                checks.require(res.dS - res.heat_over_T > 0.0,
                               "dS - loop dQ/T = " + g9(res.dS - res.heat_over_T) + " > 0");
            }
        }
        return finish(rep);
    }

    if (cfg.kind == Kind::Impulsive || cfg.kind == Kind::ShearLayer) {
        diagnostics::FlowFields f;
        const auto outputs = make_outputs(cfg);
        f.t = Eigen::Map<const Eigen::ArrayXd>(outputs.data(),
                                               static_cast<Eigen::Index>(outputs.size()));
        const double dx = 1.0 / cfg.N;
        f.x = Eigen::ArrayXd::LinSpaced(cfg.N, 0.5 * dx, 1.0 - 0.5 * dx);
        f.gas = gas;
        f.bc = euler1d::Boundary::Transmissive;
        f.x_lo = 0.0;
        f.x_hi = 1.0;
        const Eigen::Index nt = f.t.size(), nx = f.x.size();
        f.rho = Eigen::ArrayXXd::Constant(nt, nx, cfg.rho0);
        f.p = Eigen::ArrayXXd::Constant(nt, nx, cfg.p0);
        f.u = Eigen::ArrayXXd::Zero(nt, nx);
        if (cfg.kind == Kind::Impulsive) {
            for (Eigen::Index m = 0; m < nt; ++m) {
                const double tau = std::clamp(f.t[m] / cfg.t_ramp, 0.0, 1.0);
                const double ramp = tau * tau * (3.0 - 2.0 * tau);
                f.u.row(m).setConstant(cfg.U * ramp);
            }
        } else {
            Eigen::ArrayXXd tau_field(nt, nx);
            for (Eigen::Index j = 0; j < nx; ++j) {
                const double arg = (f.x[j] - 0.5) / cfg.delta;
                const double uj = cfg.U * std::tanh(arg);
                const double dudx = cfg.U / cfg.delta / std::pow(std::cosh(arg), 2.0);
                for (Eigen::Index m = 0; m < nt; ++m) {
                    f.u(m, j) = uj;
                    tau_field(m, j) = cfg.mu * dudx;
                }
            }
            f.tau = tau_field;
        }

        const AnalyticResult r = run_analytic(f, cfg.seeds);
        rep.instability_class = diagnostics::to_string(r.cls);
        rep.K_max = r.K_max;
        rep.noise_floor_K = r.floors.K;
        write_slices(out_dir, r.fields);
        write_diagnostics(out_dir, r.fields, r.A1_xt, r.Anu_xt, r.K_xt, r.src,
                          rep.instability_class);
        write_events(out_dir, {});
        if (check) {
            if (cfg.kind == Kind::Impulsive) {
                checks.require(r.cls == diagnostics::InstabilityClass::ShockType,
                               "class = " + rep.instability_class + " (want ShockType)");
                checks.require(r.K_max >= 10.0 * r.floors.K,
                               "K_max = " + g9(r.K_max) + " >= 10x floor " +
                                   g9(r.floors.K));
            } else {
                checks.require(r.cls == diagnostics::InstabilityClass::TurbulentPulsation,
                               "class = " + rep.instability_class +
                                   " (want TurbulentPulsation)");
                checks.require(r.A1_xt.maxCoeff() > 0.0 && r.A1_xt.minCoeff() >= -1e-15,
                               "A1 > 0 over the layer");
            }
        }
        return finish(rep);
    }

    // Flow scenarios backed by the solver.
    euler1d::RunConfig rc;
    rc.n_cells = cfg.N;
    rc.cfl = cfg.cfl;
    rc.gas = gas;
    rc.t_end = cfg.t_end;
    rc.output_times = make_outputs(cfg);
    rc.trajectory_seeds = make_seeds(cfg, 0.0, 1.0);

    std::optional<double> t_star_analytic;
    switch (cfg.kind) {
        case Kind::Sod: {
            rc.bc = euler1d::Boundary::Transmissive;
            const PrimState l{cfg.rho_l, cfg.u_l, cfg.p_l};
            const PrimState r{cfg.rho_r, cfg.u_r, cfg.p_r};
            const double x0 = cfg.x0;
            rc.initial = [l, r, x0](double x) { return x < x0 ? l : r; };
            break;
        }
        case Kind::SimpleWave: {
            rc.bc = euler1d::Boundary::Periodic;
            const double a0 = std::sqrt(gas.gamma * cfg.p0 / cfg.rho0);
            const double sbar = cfg.p0 / std::pow(cfg.rho0, gas.gamma);
            const double eps = cfg.eps;
            const double g = gas.gamma;
            const double rho0 = cfg.rho0;
            rc.initial = [=](double x) {
                const double u = -eps * std::sin(2.0 * kPi * x);
                const double a = a0 + 0.5 * (g - 1.0) * u;
                const double rho = rho0 * std::pow(a / a0, 2.0 / (g - 1.0));
                return PrimState{rho, u, sbar * std::pow(rho, g)};
            };
            Eigen::ArrayXd xg = Eigen::ArrayXd::LinSpaced(cfg.N, 0.5 / cfg.N,
                                                          1.0 - 0.5 / cfg.N);
            Eigen::ArrayXd ug = -eps * (2.0 * kPi * xg).sin();
            const auto sf = characteristics::shock_formation(
                xg, ug, gas, PrimState{cfg.rho0, 0.0, cfg.p0});
            if (sf) t_star_analytic = sf->t_star;
            break;
        }
        case Kind::IsentropicAdvection: {
            rc.bc = euler1d::Boundary::Periodic;
            const double amp = cfg.amp, u0 = cfg.u0, rho0 = cfg.rho0, p0 = cfg.p0;
            rc.initial = [=](double x) {
                return PrimState{rho0 * (1.0 + amp * std::sin(2.0 * kPi * x)), u0, p0};
            };
            break;
        }
        case Kind::Uniform: {
            rc.bc = euler1d::Boundary::Periodic;
            const double rho0 = cfg.rho0, u0 = cfg.u0, p0 = cfg.p0;
            rc.initial = [=](double) { return PrimState{rho0, u0, p0}; };
            break;
        }
        case Kind::EntropyContact: {
            rc.bc = euler1d::Boundary::Transmissive;
            const double amp = cfg.amp, delta = cfg.delta, rho0 = cfg.rho0, p0 = cfg.p0;
            rc.initial = [=](double x) {
                return PrimState{rho0 * (1.0 + amp * std::tanh((x - 0.5) / delta)), 0.0, p0};
            };
            break;
        }
        default:
            throw ConfigError("unhandled scenario kind");
    }

    PipelineResult r = run_pipeline(rc, window);

    const ConservedSums s0 = conserved_sums(r.sol.slices.front(), r.sol.dx, gas);
    const ConservedSums s1 = conserved_sums(r.sol.slices.back(), r.sol.dx, gas);
    const double mom_scale = std::max(std::abs(s0.momentum),
                                      s0.mass * std::sqrt(gas.gamma * cfg.p0 / cfg.rho0));
    rep.mass_defect = std::abs(s1.mass - s0.mass) / std::abs(s0.mass);
    rep.momentum_defect = std::abs(s1.momentum - s0.momentum) / mom_scale;
    rep.energy_defect = std::abs(s1.energy - s0.energy) / std::abs(s0.energy);
    rep.entropy_drift = max_entropy_drift(r.sol);
    rep.instability_class = diagnostics::to_string(r.cls);
    rep.K_max = r.K_max;
    rep.noise_floor_K = r.floors.K;
    rep.event_count = static_cast<int>(r.events.size());
    if (!r.events.empty()) rep.t_star_first_event = r.events.front().t;
    if (t_star_analytic) rep.t_star_analytic = *t_star_analytic;

    if (cfg.kind == Kind::Sod) {
        const auto fan = euler1d::exact_riemann({cfg.rho_l, cfg.u_l, cfg.p_l},
                                                {cfg.rho_r, cfg.u_r, cfg.p_r}, gas);
        const auto& last = r.sol.slices.back();
        double l1 = 0.0;
        for (Eigen::Index j = 0; j < r.sol.x.size(); ++j) {
            const double xi = (r.sol.x[j] - cfg.x0) / cfg.t_end;
            l1 += std::abs(last.rho[j] - euler1d::sample(fan, xi).rho) * r.sol.dx;
        }
        rep.l1_rho_error = l1;
    }

    if (cfg.kind == Kind::EntropyContact) {
        const auto& last = r.sol.slices.back();
        double max_err = 0.0;
        for (Eigen::Index j = 0; j < r.sol.x.size(); ++j) {
            const PrimState w = last.at(j);
            const auto cm = characteristics::consistency_matrix(w, w.u, gas);
            const auto b = characteristics::break_nullspace(cm);
            const double got = b.d_a / b.d_s;
            const double want = characteristics::trajectory_break_relation(w, gas);
            max_err = std::max(max_err, std::abs(got - want) / std::abs(want));
        }
        rep.break_relation_max_err = max_err;
    }

    write_slices(out_dir, r.fields);
    write_diagnostics(out_dir, r.fields, r.A1_xt, r.Anu_xt, r.K_xt, r.src,
                      rep.instability_class);
    write_events(out_dir, r.events);

    if (check) {
        switch (cfg.kind) {
            case Kind::Sod: {
                checks.require(rep.l1_rho_error <= 2e-2,
                               "L1(rho) = " + g9(rep.l1_rho_error) + " <= 0.02");
                checks.require(rep.event_count >= 1,
                               "transition events present near the captured shock");
                break;
            }
            case Kind::Uniform: {
                checks.require(r.cls == diagnostics::InstabilityClass::Stable,
                               "class = " + rep.instability_class + " (want Stable)");
                checks.require(rep.event_count == 0, "zero transition events");
                checks.require(rep.mass_defect <= 1e-13 && rep.energy_defect <= 1e-13,
                               "conserved sums invariant");
                break;
            }
            case Kind::SimpleWave: {
                const bool have = rep.t_star_analytic > 0 && rep.t_star_first_event > 0;
                checks.require(have, "shock-formation time predicted and detected");
                if (have) {
                    const double rel = std::abs(rep.t_star_first_event - rep.t_star_analytic) /
                                       rep.t_star_analytic;
                    checks.require(rel <= 0.15,
                                   "first event within 15% of t* (rel = " + g9(rel) + ")");
                }
                break;
            }
            case Kind::IsentropicAdvection: {
                checks.require(r.cls == diagnostics::InstabilityClass::Stable,
                               "class = " + rep.instability_class + " (want Stable)");
                const double s_scale = cfg.p0 / std::pow(cfg.rho0 * (1.0 - cfg.amp), gas.gamma);
                checks.require(rep.entropy_drift <= 0.1 * s_scale,
                               "entropy drift along trajectories bounded");
                break;
            }
            case Kind::EntropyContact: {
                checks.require(rep.break_relation_max_err <= 1e-10,
                               "trajectory break relation matches nullspace, err = " +
                                   g9(rep.break_relation_max_err));
                checks.require(rep.event_count == 0, "zero transition events");
                break;
            }
            default:
                break;
        }
    }
    return finish(rep);
}

}  // namespace evoflow::scenario

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace evoflow::scenario {

/// Malformed or invalid configuration; the message names the offending line.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Kind {
    Sod,
    SimpleWave,
    IsentropicAdvection,
    Uniform,
    Impulsive,
    ShearLayer,
    Carnot,
    EntropyContact,
};

struct ScenarioConfig {
    Kind kind = Kind::Uniform;
    std::string name = "uniform";

    int N = 400;
    double cfl = 0.8;
    double gamma = 1.4;
    double R = 1.0;
    double t_end = 0.0;           ///< 0 selects the scenario default
    std::vector<double> outputs;  ///< explicit output times; empty -> frames
    int frames = 0;               ///< 0 selects the scenario default
    int seeds = 96;
    int window = 0;               ///< 0 -> N/8

    // sod
    double rho_l = 1.0, u_l = 0.0, p_l = 1.0;
    double rho_r = 0.125, u_r = 0.0, p_r = 0.1;
    double x0 = 0.5;

    // wave / pulse scenarios
    double eps = 0.1;
    double amp = 0.2;
    double u0 = 1.0;
    double rho0 = 1.0;
    double p0 = 1.0;

    // impulsive / shear layer
    double U = 0.5;
    double t_ramp = 0.2;
    double delta = 0.1;
    double mu = 0.02;

    // carnot
    double T_h = 2.0;
    double T_c = 1.0;
    int steps = 4000;
    double compression = 2.0;
    double friction = 0.0;
};

/// Line-oriented `key = value` parser; `#` starts a comment; unknown keys or
/// keys that do not apply to the named scenario are rejected.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig parse_config_file(const std::string& path);

struct ScenarioInfo {
    std::string name;
    std::string description;
};

/// The canonical catalog, in stable order.
const std::vector<ScenarioInfo>& list_scenarios();

struct RunReport {
    std::string scenario;
    int N = 0;
    double gamma = 0.0, R = 0.0, cfl = 0.0, t_end = 0.0;

    double mass_defect = 0.0;
    double momentum_defect = 0.0;
    double energy_defect = 0.0;

    double l1_rho_error = -1.0;       ///< vs exact Riemann fan, sod only
    double entropy_drift = -1.0;      ///< max |s - s0| along trajectories
    std::string instability_class = "n/a";
    double K_max = -1.0;
    double noise_floor_K = -1.0;
    int event_count = 0;
    double t_star_analytic = -1.0;
    double t_star_first_event = -1.0;
    double break_relation_max_err = -1.0;

    double clausius_dS = 0.0;
    double clausius_integral = 0.0;
    std::string clausius_verdict = "n/a";
    double first_law_residual = 0.0;

    double wall_ms = 0.0;
    bool check_performed = false;
    bool check_passed = true;
    std::vector<std::string> check_lines;

    std::string to_text() const;
};

/// Executes the scenario, writing slices.csv, diagnostics.csv, events.csv and
/// report.txt into out_dir. With check=true the per-scenario thresholds are
/// evaluated and recorded in the report.
RunReport run_scenario(const ScenarioConfig& cfg, const std::string& out_dir,
                       bool check = false);

}  // namespace evoflow::scenario

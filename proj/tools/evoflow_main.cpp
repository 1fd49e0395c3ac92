#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "evoflow/euler1d.hpp"
#include "evoflow/scenario.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"evoflow: 1D compressible gas dynamics with evolutionary-relation diagnostics"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    bool check = false;

    auto* run = app.add_subcommand("run", "run a scenario config and write CSV outputs");
    run->add_option("config", config_path, "path to a key = value scenario config")->required();
    run->add_flag("--check", check, "evaluate the per-scenario acceptance thresholds");
    run->add_option("--out", out_dir, "output directory (default: $EVOFLOW_OUT or .)");

    auto* list = app.add_subcommand("list", "list the scenario catalog");
    auto* version = app.add_subcommand("version", "print the version");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const auto& s : evoflow::scenario::list_scenarios())
                std::cout << s.name << "  -  " << s.description << '\n';
            return 0;
        }
        if (version->parsed()) {
            std::cout << "evoflow 0.1.0\n";
            return 0;
        }
        if (out_dir.empty()) {
            const char* env = std::getenv("EVOFLOW_OUT");
            out_dir = (env != nullptr && *env != '\0') ? env : ".";
        }
        const auto cfg = evoflow::scenario::parse_config_file(config_path);
        const auto rep = evoflow::scenario::run_scenario(cfg, out_dir, check);
        std::cout << rep.to_text();
        if (check && !rep.check_passed) return 4;
        return 0;
    } catch (const evoflow::scenario::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const evoflow::euler1d::SolverError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

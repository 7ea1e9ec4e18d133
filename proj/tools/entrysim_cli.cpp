// Command-line front end: single-run and Monte Carlo execution, atmosphere
// table dump and config schema. Exit codes: 0 success, 2 configuration error,
// 3 runtime failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "entrysim/atmosphere.hpp"
#include "entrysim/config.hpp"
#include "entrysim/engine.hpp"
#include "entrysim/io.hpp"
#include "entrysim/montecarlo.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

entrysim::config::Config load_config(const std::string& config_path,
                                     const std::vector<std::string>& overrides) {
    entrysim::config::Config cfg{};
    if (!config_path.empty()) {
        cfg = entrysim::config::load_file(config_path);
    }
    for (const std::string& spec : overrides) {
        entrysim::config::apply_override(cfg, spec);
    }
    entrysim::config::validate(cfg);
    return cfg;
}

int cmd_run(const std::string& config_path, const std::string& output_dir,
            const std::vector<std::string>& overrides) {
    entrysim::config::Config cfg{};
    try {
        cfg = load_config(config_path, overrides);
    } catch (const entrysim::config::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    const entrysim::engine::RunResult result = entrysim::engine::run(cfg.scenario);
    if (result.report.outcome == entrysim::engine::Outcome::Aborted) {
        std::cerr << "run aborted: non-finite state during integration\n";
        return kExitRuntime;
    }

    std::filesystem::create_directories(output_dir);
    {
        std::ofstream csv(std::filesystem::path(output_dir) / "trajectory.csv");
        entrysim::io::write_trajectory_csv(csv, result.trajectory);
    }
    {
        std::ofstream json_out(std::filesystem::path(output_dir) / "report.json");
        json_out << entrysim::io::report_json(result.report).dump(2) << "\n";
    }

    const auto& r = result.report;
    std::cout << "outcome=" << entrysim::engine::outcome_name(r.outcome)
              << " impact_time_s=" << r.impact_time
              << " downrange_km=" << r.downrange / 1000.0
              << " miss_m=" << r.miss_distance
              << " peak_load_g=" << r.peak_applied_load << "\n";
    return kExitOk;
}

int cmd_montecarlo(const std::string& config_path, const std::string& output_dir,
                   const std::vector<std::string>& overrides) {
    entrysim::config::Config cfg{};
    try {
        cfg = load_config(config_path, overrides);
        if (!cfg.has_dispersion) {
            throw entrysim::config::ConfigError(
                "montecarlo requires a 'dispersion' section in the config");
        }
    } catch (const entrysim::config::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    entrysim::montecarlo::EnsembleResult result;
    try {
        result = entrysim::montecarlo::run_ensemble(entrysim::config::dispersion_spec(cfg));
    } catch (const std::runtime_error& e) {
        std::cerr << "ensemble failed: " << e.what() << "\n";
        return kExitRuntime;
    }

    std::filesystem::create_directories(output_dir);
    {
        std::ofstream json_out(std::filesystem::path(output_dir) / "ensemble.json");
        json_out << entrysim::io::ensemble_json(result.stats).dump(2) << "\n";
    }
    {
        std::ofstream csv(std::filesystem::path(output_dir) / "runs.csv");
        entrysim::io::write_runs_csv(csv, result.runs);
    }

    const auto& s = result.stats;
    std::cout << "n=" << s.n << " cep_m=" << s.cep << " miss_mean_m=" << s.miss_mean
              << " miss_max_m=" << s.miss_max << "\n";
    return kExitOk;
}

int cmd_atmosphere(double from_m, double to_m, double step_m) {
    if (!(from_m >= 0.0 && from_m < to_m && step_m > 0.0)) {
        std::cerr << "config error: require 0 <= from < to and step > 0\n";
        return kExitConfig;
    }
    std::cout << "altitude_m,temperature_k,pressure_pa,density_kg_m3,speed_of_sound_m_s\n";
    for (double h = from_m; h <= to_m + 1e-9; h += step_m) {
        const auto s = entrysim::atmosphere::sample(h);
        std::cout << entrysim::io::format_number(s.altitude_geometric) << ','
                  << entrysim::io::format_number(s.temperature) << ','
                  << entrysim::io::format_number(s.pressure) << ','
                  << entrysim::io::format_number(s.density) << ','
                  << entrysim::io::format_number(s.speed_of_sound) << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"entrysim: four-phase atmospheric-entry trajectory simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir = ".";
    std::vector<std::string> overrides;

    auto* run_cmd = app.add_subcommand("run", "Simulate a single trajectory");
    run_cmd->add_option("-c,--config", config_path, "JSON config file");
    run_cmd->add_option("-o,--output-dir", output_dir, "Output directory");
    run_cmd->add_option("--override", overrides, "key=value override, repeatable");

    auto* mc_cmd = app.add_subcommand("montecarlo", "Run a dispersion ensemble");
    mc_cmd->add_option("-c,--config", config_path, "JSON config file");
    mc_cmd->add_option("-o,--output-dir", output_dir, "Output directory");
    mc_cmd->add_option("--override", overrides, "key=value override, repeatable");

    double from_m = 0.0, to_m = 86000.0, step_m = 1000.0;
    auto* atm_cmd = app.add_subcommand("atmosphere", "Dump an atmosphere table as CSV");
    atm_cmd->add_option("from_m", from_m, "Start altitude, m");
    atm_cmd->add_option("to_m", to_m, "End altitude, m");
    atm_cmd->add_option("step_m", step_m, "Altitude step, m");

    auto* schema_cmd =
        app.add_subcommand("schema", "Print the config schema with defaults and units");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(config_path, output_dir, overrides);
        if (mc_cmd->parsed()) return cmd_montecarlo(config_path, output_dir, overrides);
        if (atm_cmd->parsed()) return cmd_atmosphere(from_m, to_m, step_m);
        if (schema_cmd->parsed()) {
            std::cout << entrysim::config::schema().dump(2) << "\n";
            return kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}

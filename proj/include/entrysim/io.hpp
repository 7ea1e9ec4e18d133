#pragma once

// CSV and JSON emission. Column order and key names are stable contracts;
// every number written is finite decimal text.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "entrysim/engine.hpp"
#include "entrysim/montecarlo.hpp"

namespace entrysim::io {

inline std::string format_number(double v) {
    if (!std::isfinite(v)) {
        throw std::runtime_error("io: refusing to serialize a non-finite number");
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline double checked(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw std::runtime_error(std::string("io: non-finite value for '") + name + "'");
    }
    return v;
}

inline void write_trajectory_csv(std::ostream& out, const engine::Trajectory& trajectory) {
    out << "t_s,x_m,y_m,z_m,v_m_s,theta_rad,psi_rad,phase,u_cmd,u_applied,mach,q_pa\n";
    for (const engine::TrajectorySample& s : trajectory) {
        out << format_number(s.state.t) << ',' << format_number(s.state.x) << ','
            << format_number(s.state.y) << ',' << format_number(s.state.z) << ','
            << format_number(s.state.v) << ',' << format_number(s.state.theta) << ','
            << format_number(s.state.psi) << ',' << guidance::phase_name(s.phase) << ','
            << format_number(s.u_cmd) << ',' << format_number(s.u_applied) << ','
            << format_number(s.mach) << ',' << format_number(s.dynamic_pressure) << '\n';
    }
}

inline nlohmann::json report_json(const engine::TerminalReport& report) {
    nlohmann::json j;
    j["outcome"] = engine::outcome_name(report.outcome);
    j["miss_distance_m"] = checked(report.miss_distance, "miss_distance_m");
    j["impact_time_s"] = checked(report.impact_time, "impact_time_s");
    j["impact_x_m"] = checked(report.impact_x, "impact_x_m");
    j["impact_z_m"] = checked(report.impact_z, "impact_z_m");
    j["downrange_m"] = checked(report.downrange, "downrange_m");
    j["peak_applied_load_g"] = checked(report.peak_applied_load, "peak_applied_load_g");
    j["peak_dynamic_pressure_pa"] =
        checked(report.peak_dynamic_pressure, "peak_dynamic_pressure_pa");
    j["saturation_fraction"] = checked(report.saturation_fraction, "saturation_fraction");
    nlohmann::json phases = nlohmann::json::object();
    for (const auto& [name, t] : report.phase_entry_times) {
        phases[name] = checked(t, "phase_entry_times");
    }
    j["phase_entry_times_s"] = phases;
    return j;
}

inline nlohmann::json ensemble_json(const montecarlo::EnsembleStats& stats) {
    nlohmann::json j;
    j["n"] = stats.n;
    j["miss_mean_m"] = checked(stats.miss_mean, "miss_mean_m");
    j["miss_std_m"] = checked(stats.miss_std, "miss_std_m");
    j["miss_min_m"] = checked(stats.miss_min, "miss_min_m");
    j["miss_max_m"] = checked(stats.miss_max, "miss_max_m");
    j["cep_m"] = checked(stats.cep, "cep_m");
    j["q50_m"] = checked(stats.q50, "q50_m");
    j["q90_m"] = checked(stats.q90, "q90_m");
    j["q95_m"] = checked(stats.q95, "q95_m");
    j["impact_time_mean_s"] = checked(stats.impact_time_mean, "impact_time_mean_s");
    j["impact_time_std_s"] = checked(stats.impact_time_std, "impact_time_std_s");
    j["downrange_mean_m"] = checked(stats.downrange_mean, "downrange_mean_m");
    j["downrange_std_m"] = checked(stats.downrange_std, "downrange_std_m");
    j["outcome_counts"] = stats.outcome_counts;
    return j;
}

inline void write_runs_csv(std::ostream& out, const std::vector<montecarlo::RunRecord>& runs) {
    out << "run_index,seed,mass_kg,gamma_deg,entry_altitude_m,density_multiplier,"
           "miss_m,impact_time_s,downrange_m,outcome\n";
    for (const montecarlo::RunRecord& r : runs) {
        out << r.run_index << ',' << r.seed << ',' << format_number(r.mass) << ','
            << format_number(r.gamma_deg) << ',' << format_number(r.entry_altitude) << ','
            << format_number(r.density_multiplier) << ','
            << format_number(r.report.miss_distance) << ','
            << format_number(r.report.impact_time) << ','
            << format_number(r.report.downrange) << ','
            << engine::outcome_name(r.report.outcome) << '\n';
    }
}

}  // namespace entrysim::io

#pragma once

// Config-file ingestion. JSON document with optional sections mirroring the
// scenario and dispersion settings; unknown keys are rejected by name. Angles
// are degrees in the file and radians internally.

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "entrysim/engine.hpp"
#include "entrysim/montecarlo.hpp"

namespace entrysim::config {

inline constexpr double kDegToRad = 3.14159265358979323846 / 180.0;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Config {
    engine::Scenario scenario{};
    montecarlo::DispersionSpec dispersion{};
    bool has_dispersion = false;
};

namespace detail {

struct FieldDef {
    const char* section;
    const char* key;
    const char* unit;
    const char* description;
};

// One row per config key; drives parsing, the schema dump and override lookup.
inline const std::vector<FieldDef>& field_defs() {
    static const std::vector<FieldDef> defs = {
        {"entry", "altitude_m", "m", "entry interface altitude"},
        {"entry", "speed_m_s", "m/s", "entry speed"},
        {"entry", "gamma_deg", "deg", "entry flight-path angle below horizon"},
        {"entry", "heading_deg", "deg", "entry heading (0 = downrange axis)"},
        {"vehicle", "mass_kg", "kg", "vehicle mass"},
        {"vehicle", "ref_area_m2", "m^2", "aerodynamic reference (wing) area"},
        {"vehicle", "lift_to_drag", "-", "lift-to-drag ratio K = CY/CX"},
        {"vehicle", "cx0", "-", "zero-lift drag coefficient"},
        {"vehicle", "cy_max", "-", "maximum lift coefficient magnitude"},
        {"guidance", "pullup_altitude_m", "m", "descent -> pull-up transition altitude"},
        {"guidance", "turn_radius_m", "m", "pull-up turn radius R"},
        {"guidance", "cruise_altitude_m", "m", "altitude-hold target H"},
        {"guidance", "k_alt_per_m", "1/m", "cruise altitude-error gain"},
        {"guidance", "k_sink_s_per_m", "s/m", "cruise sink-rate damping gain (0 disables)"},
        {"guidance", "k_terminal", "1/rad", "terminal seeker-angle gain"},
        {"guidance", "seeker_acquisition_range_m", "m", "seeker range gate"},
        {"guidance", "seeker_fov_half_angle_deg", "deg", "seeker conical field of view"},
        {"guidance", "seeker_noise_sigma_deg", "deg", "seeker angle noise, 1 sigma per channel"},
        {"guidance", "seeker_hold_time_s", "s", "stale-measurement hold in terminal phase"},
        {"simulation", "mode", "-", "planar | three_d"},
        {"simulation", "dt_s", "s", "integration step"},
        {"simulation", "max_time_s", "s", "simulation time limit"},
        {"simulation", "curvature_term", "-", "include Earth-curvature term in theta-dot"},
        {"simulation", "density_multiplier", "-", "uniform atmosphere density scale"},
        {"simulation", "seed", "-", "seeker noise RNG seed"},
        {"simulation", "emit_every", "-", "trajectory decimation (emit every Nth step)"},
        {"simulation", "target_x_m", "m", "target downrange position"},
        {"simulation", "target_z_m", "m", "target crossrange position"},
        {"dispersion", "n_runs", "-", "Monte Carlo run count"},
        {"dispersion", "base_seed", "-", "ensemble base seed"},
        {"dispersion", "mass_low_kg", "kg", "mass dispersion, uniform low"},
        {"dispersion", "mass_high_kg", "kg", "mass dispersion, uniform high"},
        {"dispersion", "gamma_low_deg", "deg", "entry angle dispersion, uniform low"},
        {"dispersion", "gamma_high_deg", "deg", "entry angle dispersion, uniform high"},
        {"dispersion", "altitude_low_m", "m", "entry altitude dispersion, uniform low"},
        {"dispersion", "altitude_high_m", "m", "entry altitude dispersion, uniform high"},
        {"dispersion", "density_multiplier_sigma", "-", "lognormal density dispersion sigma"},
        {"dispersion", "seeker_noise_sigma_deg", "deg", "seeker angle noise for ensemble runs"},
        {"dispersion", "target_offset_sigma_m", "m", "Gaussian target offset sigma per axis"},
    };
    return defs;
}

template <typename T>
inline T get_number(const nlohmann::json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError("config key '" + where + "' must be a number");
    return j.get<T>();
}

inline bool get_bool(const nlohmann::json& j, const std::string& where) {
    if (!j.is_boolean()) throw ConfigError("config key '" + where + "' must be a boolean");
    return j.get<bool>();
}

inline void apply_value(Config& cfg, const std::string& section, const std::string& key,
                        const nlohmann::json& value) {
    const std::string where = section + "." + key;
    engine::Scenario& s = cfg.scenario;
    montecarlo::DispersionSpec& d = cfg.dispersion;

    if (section == "entry") {
        if (key == "altitude_m") s.entry.entry_altitude = get_number<double>(value, where);
        else if (key == "speed_m_s") s.entry.entry_speed = get_number<double>(value, where);
        else if (key == "gamma_deg")
            s.entry.entry_gamma = get_number<double>(value, where) * kDegToRad;
        else if (key == "heading_deg")
            s.entry.entry_heading = get_number<double>(value, where) * kDegToRad;
        else throw ConfigError("unknown config key '" + where + "'");
    } else if (section == "vehicle") {
        if (key == "mass_kg") s.vehicle.mass = get_number<double>(value, where);
        else if (key == "ref_area_m2") s.vehicle.ref_area = get_number<double>(value, where);
        else if (key == "lift_to_drag")
            s.vehicle.lift_to_drag = get_number<double>(value, where);
        else if (key == "cx0") s.vehicle.cx0 = get_number<double>(value, where);
        else if (key == "cy_max") s.vehicle.cy_max = get_number<double>(value, where);
        else throw ConfigError("unknown config key '" + where + "'");
    } else if (section == "guidance") {
        if (key == "pullup_altitude_m")
            s.guidance.pullup_altitude = get_number<double>(value, where);
        else if (key == "turn_radius_m")
            s.guidance.turn_radius = get_number<double>(value, where);
        else if (key == "cruise_altitude_m")
            s.guidance.cruise_altitude = get_number<double>(value, where);
        else if (key == "k_alt_per_m") s.guidance.k_alt = get_number<double>(value, where);
        else if (key == "k_sink_s_per_m")
            s.guidance.k_sink = get_number<double>(value, where);
        else if (key == "k_terminal")
            s.guidance.k_terminal = get_number<double>(value, where);
        else if (key == "seeker_acquisition_range_m")
            s.guidance.seeker_acquisition_range = get_number<double>(value, where);
        else if (key == "seeker_fov_half_angle_deg")
            s.guidance.seeker_fov_half_angle = get_number<double>(value, where) * kDegToRad;
        else if (key == "seeker_noise_sigma_deg")
            s.guidance.seeker_noise_sigma = get_number<double>(value, where) * kDegToRad;
        else if (key == "seeker_hold_time_s")
            s.guidance.seeker_hold_time = get_number<double>(value, where);
        else throw ConfigError("unknown config key '" + where + "'");
    } else if (section == "simulation") {
        if (key == "mode") {
            if (!value.is_string()) throw ConfigError("config key '" + where + "' must be a string");
            const std::string mode = value.get<std::string>();
            if (mode == "planar") s.mode = engine::FlightMode::Planar;
            else if (mode == "three_d") s.mode = engine::FlightMode::ThreeD;
            else throw ConfigError("config key 'simulation.mode' must be 'planar' or 'three_d'");
        } else if (key == "dt_s") s.dt = get_number<double>(value, where);
        else if (key == "max_time_s") s.max_time = get_number<double>(value, where);
        else if (key == "curvature_term") s.curvature_term = get_bool(value, where);
        else if (key == "density_multiplier")
            s.density_multiplier = get_number<double>(value, where);
        else if (key == "seed") s.seed = get_number<std::uint64_t>(value, where);
        else if (key == "emit_every") s.emit_every = get_number<int>(value, where);
        else if (key == "target_x_m") s.target.x = get_number<double>(value, where);
        else if (key == "target_z_m") s.target.z = get_number<double>(value, where);
        else throw ConfigError("unknown config key '" + where + "'");
    } else if (section == "dispersion") {
        cfg.has_dispersion = true;
        if (key == "n_runs") d.n_runs = get_number<int>(value, where);
        else if (key == "base_seed") d.base_seed = get_number<std::uint64_t>(value, where);
        else if (key == "mass_low_kg") d.mass_low = get_number<double>(value, where);
        else if (key == "mass_high_kg") d.mass_high = get_number<double>(value, where);
        else if (key == "gamma_low_deg") d.gamma_low_deg = get_number<double>(value, where);
        else if (key == "gamma_high_deg") d.gamma_high_deg = get_number<double>(value, where);
        else if (key == "altitude_low_m") d.altitude_low = get_number<double>(value, where);
        else if (key == "altitude_high_m") d.altitude_high = get_number<double>(value, where);
        else if (key == "density_multiplier_sigma")
            d.density_multiplier_sigma = get_number<double>(value, where);
        else if (key == "seeker_noise_sigma_deg")
            d.seeker_noise_sigma = get_number<double>(value, where) * kDegToRad;
        else if (key == "target_offset_sigma_m")
            d.target_offset_sigma = get_number<double>(value, where);
        else throw ConfigError("unknown config key '" + where + "'");
    } else {
        throw ConfigError("unknown config section '" + section + "'");
    }
}

}  // namespace detail

inline Config parse(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
    Config cfg{};
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (!it.value().is_object()) {
            throw ConfigError("config section '" + it.key() + "' must be an object");
        }
        if (it.key() == "dispersion") cfg.has_dispersion = true;
        for (auto kv = it.value().begin(); kv != it.value().end(); ++kv) {
            detail::apply_value(cfg, it.key(), kv.key(), kv.value());
        }
    }
    return cfg;
}

inline Config load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse(doc);
}

// Overrides, applied after the file parse and before validation. Accepts
// "section.key=value" or an unambiguous bare key ("max_time" matches
// "simulation.max_time_s").
inline void apply_override(Config& cfg, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override '" + spec + "' is not of the form key=value");
    }
    const std::string key = spec.substr(0, eq);
    const std::string raw = spec.substr(eq + 1);

    std::string section, field;
    const auto dot = key.find('.');
    if (dot != std::string::npos) {
        section = key.substr(0, dot);
        field = key.substr(dot + 1);
    } else {
        // Bare key: match on the full key name or its unit-stripped stem.
        const auto stem_of = [](std::string k) {
            for (const char* suffix :
                 {"_m_s", "_per_m", "_s_per_m", "_kg", "_m2", "_deg", "_rad", "_m", "_s"}) {
                const std::size_t len = std::string(suffix).size();
                if (k.size() > len && k.compare(k.size() - len, len, suffix) == 0) {
                    return k.substr(0, k.size() - len);
                }
            }
            return k;
        };
        int matches = 0;
        for (const auto& def : detail::field_defs()) {
            if (key == def.key || key == stem_of(def.key)) {
                section = def.section;
                field = def.key;
                ++matches;
            }
        }
        if (matches == 0) throw ConfigError("unknown override key '" + key + "'");
        if (matches > 1) throw ConfigError("ambiguous override key '" + key + "'");
    }

    nlohmann::json value;
    if (section == "simulation" && field == "mode") {
        value = raw;
    } else if (raw == "true" || raw == "false") {
        value = (raw == "true");
    } else {
        try {
            std::size_t used = 0;
            const double num = std::stod(raw, &used);
            if (used != raw.size()) throw std::invalid_argument(raw);
            if (field == "seed" || field == "base_seed") {
                value = static_cast<std::uint64_t>(num);
            } else if (field == "n_runs" || field == "emit_every") {
                value = static_cast<int>(num);
            } else {
                value = num;
            }
        } catch (const std::exception&) {
            throw ConfigError("override value for '" + key + "' is not a number");
        }
    }
    detail::apply_value(cfg, section, field, value);
}

inline void validate(const Config& cfg) {
    try {
        cfg.scenario.validate();
        if (cfg.has_dispersion) {
            montecarlo::DispersionSpec spec = cfg.dispersion;
            spec.nominal = cfg.scenario;
            spec.validate();
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

// Dispersion spec with the nominal scenario attached.
inline montecarlo::DispersionSpec dispersion_spec(const Config& cfg) {
    montecarlo::DispersionSpec spec = cfg.dispersion;
    spec.nominal = cfg.scenario;
    return spec;
}

// Schema dump: every key with default, unit and description.
inline nlohmann::json schema() {
    const Config defaults{};
    const engine::Scenario& s = defaults.scenario;
    const montecarlo::DispersionSpec& d = defaults.dispersion;

    std::map<std::string, nlohmann::json> values = {
        {"entry.altitude_m", s.entry.entry_altitude},
        {"entry.speed_m_s", s.entry.entry_speed},
        {"entry.gamma_deg", s.entry.entry_gamma / kDegToRad},
        {"entry.heading_deg", s.entry.entry_heading / kDegToRad},
        {"vehicle.mass_kg", s.vehicle.mass},
        {"vehicle.ref_area_m2", s.vehicle.ref_area},
        {"vehicle.lift_to_drag", s.vehicle.lift_to_drag},
        {"vehicle.cx0", s.vehicle.cx0},
        {"vehicle.cy_max", s.vehicle.cy_max},
        {"guidance.pullup_altitude_m", s.guidance.pullup_altitude},
        {"guidance.turn_radius_m", s.guidance.turn_radius},
        {"guidance.cruise_altitude_m", s.guidance.cruise_altitude},
        {"guidance.k_alt_per_m", s.guidance.k_alt},
        {"guidance.k_sink_s_per_m", s.guidance.k_sink},
        {"guidance.k_terminal", s.guidance.k_terminal},
        {"guidance.seeker_acquisition_range_m", s.guidance.seeker_acquisition_range},
        {"guidance.seeker_fov_half_angle_deg", s.guidance.seeker_fov_half_angle / kDegToRad},
        {"guidance.seeker_noise_sigma_deg", s.guidance.seeker_noise_sigma / kDegToRad},
        {"guidance.seeker_hold_time_s", s.guidance.seeker_hold_time},
        {"simulation.mode", s.mode == engine::FlightMode::Planar ? "planar" : "three_d"},
        {"simulation.dt_s", s.dt},
        {"simulation.max_time_s", s.max_time},
        {"simulation.curvature_term", s.curvature_term},
        {"simulation.density_multiplier", s.density_multiplier},
        {"simulation.seed", s.seed},
        {"simulation.emit_every", s.emit_every},
        {"simulation.target_x_m", s.target.x},
        {"simulation.target_z_m", s.target.z},
        {"dispersion.n_runs", d.n_runs},
        {"dispersion.base_seed", d.base_seed},
        {"dispersion.mass_low_kg", d.mass_low},
        {"dispersion.mass_high_kg", d.mass_high},
        {"dispersion.gamma_low_deg", d.gamma_low_deg},
        {"dispersion.gamma_high_deg", d.gamma_high_deg},
        {"dispersion.altitude_low_m", d.altitude_low},
        {"dispersion.altitude_high_m", d.altitude_high},
        {"dispersion.density_multiplier_sigma", d.density_multiplier_sigma},
        {"dispersion.seeker_noise_sigma_deg", d.seeker_noise_sigma / kDegToRad},
        {"dispersion.target_offset_sigma_m", d.target_offset_sigma},
    };

    nlohmann::json out = nlohmann::json::object();
    for (const auto& def : detail::field_defs()) {
        const std::string path = std::string(def.section) + "." + def.key;
        nlohmann::json entry = nlohmann::json::object();
        entry["default"] = values.at(path);
        entry["unit"] = def.unit;
        entry["description"] = def.description;
        out[def.section][def.key] = entry;
    }
    return out;
}

}  // namespace entrysim::config

#pragma once

// Static atmosphere model: US Standard Atmosphere 1976 seven-layer profile for
// 0-86 km geometric altitude, isothermal exponential continuation above 86 km,
// hard vacuum above 150 km. The choice of atmosphere model is an assumption of
// this simulator; USSA-1976 is adopted as the de facto reference and its
// published tables serve as the validation oracle.

#include <cmath>
#include <stdexcept>

namespace entrysim::atmosphere {

inline constexpr double kGamma = 1.4;              // ratio of specific heats, air
inline constexpr double kGasConstant = 287.053;    // J/(kg K)
inline constexpr double kG0 = 9.80665;             // m/s^2, standard gravity
inline constexpr double kEarthRadiusPotential = 6356766.0;  // m, USSA-1976 convention
inline constexpr double kModelCeiling = 150000.0;  // m, vacuum clamp
inline constexpr double kTableTop = 86000.0;       // m, geometric top of layer tables
inline constexpr double kScaleHeightAbove86 = 7200.0;  // m, exponential continuation

struct AtmosphereSample {
    double altitude_geometric;  // m
    double temperature;         // K
    double pressure;            // Pa
    double density;             // kg/m^3
    double speed_of_sound;      // m/s
};

inline double speed_of_sound(double temperature) {
    if (!(temperature > 0.0)) {
        throw std::domain_error("speed_of_sound: temperature must be positive");
    }
    return std::sqrt(kGamma * kGasConstant * temperature);
}

// Geometric -> geopotential altitude, Re*h/(Re+h).
inline double geopotential_altitude(double geometric) {
    if (geometric < 0.0) {
        throw std::domain_error("geopotential_altitude: altitude must be non-negative");
    }
    return kEarthRadiusPotential * geometric / (kEarthRadiusPotential + geometric);
}

namespace detail {

// Layer bases in geopotential meters with lapse rates (K/m). Base temperature
// and pressure follow from the sea-level reference by the hydrostatic recursion.
inline constexpr int kNumLayers = 7;
inline constexpr double kLayerBase[kNumLayers + 1] = {
    0.0, 11000.0, 20000.0, 32000.0, 47000.0, 51000.0, 71000.0, 84852.0};
inline constexpr double kLapse[kNumLayers] = {
    -0.0065, 0.0, 0.001, 0.0028, 0.0, -0.0028, -0.002};

struct LayerTable {
    double temperature[kNumLayers + 1];
    double pressure[kNumLayers + 1];
};

inline const LayerTable& layer_table() {
    static const LayerTable table = [] {
        LayerTable t{};
        t.temperature[0] = 288.15;
        t.pressure[0] = 101325.0;
        for (int i = 0; i < kNumLayers; ++i) {
            const double dh = kLayerBase[i + 1] - kLayerBase[i];
            t.temperature[i + 1] = t.temperature[i] + kLapse[i] * dh;
            if (kLapse[i] == 0.0) {
                t.pressure[i + 1] =
                    t.pressure[i] * std::exp(-kG0 * dh / (kGasConstant * t.temperature[i]));
            } else {
                t.pressure[i + 1] =
                    t.pressure[i] * std::pow(t.temperature[i + 1] / t.temperature[i],
                                             -kG0 / (kGasConstant * kLapse[i]));
            }
        }
        return t;
    }();
    return table;
}

// Temperature and pressure at a geopotential altitude within the table span.
inline void evaluate_layers(double geopot, double& temperature, double& pressure) {
    const LayerTable& t = layer_table();
    int i = 0;
    while (i + 1 < kNumLayers && geopot >= kLayerBase[i + 1]) ++i;
    const double dh = geopot - kLayerBase[i];
    temperature = t.temperature[i] + kLapse[i] * dh;
    if (kLapse[i] == 0.0) {
        pressure = t.pressure[i] * std::exp(-kG0 * dh / (kGasConstant * t.temperature[i]));
    } else {
        pressure = t.pressure[i] * std::pow(temperature / t.temperature[i],
                                            -kG0 / (kGasConstant * kLapse[i]));
    }
}

struct TableTopState {
    double temperature;
    double pressure;
    double density;
};

inline const TableTopState& table_top() {
    static const TableTopState s = [] {
        TableTopState v{};
        evaluate_layers(geopotential_altitude(kTableTop), v.temperature, v.pressure);
        v.density = v.pressure / (kGasConstant * v.temperature);
        return v;
    }();
    return s;
}

}  // namespace detail

inline AtmosphereSample sample(double altitude_geometric) {
    if (altitude_geometric < 0.0) {
        throw std::domain_error("atmosphere::sample: altitude must be non-negative");
    }
    AtmosphereSample out{};
    out.altitude_geometric = altitude_geometric;
    if (altitude_geometric >= kModelCeiling) {
        // Vacuum clamp: temperature and speed of sound held at the continuation value.
        out.temperature = detail::table_top().temperature;
        out.pressure = 0.0;
        out.density = 0.0;
        out.speed_of_sound = speed_of_sound(out.temperature);
        return out;
    }
    if (altitude_geometric > kTableTop) {
        const auto& top = detail::table_top();
        const double decay =
            std::exp(-(altitude_geometric - kTableTop) / kScaleHeightAbove86);
        out.temperature = top.temperature;
        out.pressure = top.pressure * decay;
        out.density = top.density * decay;
        out.speed_of_sound = speed_of_sound(out.temperature);
        return out;
    }
    double temperature = 0.0;
    double pressure = 0.0;
    detail::evaluate_layers(geopotential_altitude(altitude_geometric), temperature, pressure);
    out.temperature = temperature;
    out.pressure = pressure;
    out.density = pressure / (kGasConstant * temperature);
    out.speed_of_sound = speed_of_sound(temperature);
    return out;
}

}  // namespace entrysim::atmosphere

#pragma once

// Point-mass equations of motion for a lifting entry vehicle. The commanded
// load factor U acts through the lift channel; achievable lift is bounded by
// dynamic pressure and the vehicle's maximum lift coefficient, so unflyable
// commands saturate instead of being rejected.

#include <cmath>
#include <stdexcept>

#include "entrysim/atmosphere.hpp"

namespace entrysim::dynamics {

inline constexpr double kG0 = 9.80665;            // m/s^2
inline constexpr double kEarthRadius = 6371000.0; // m, gravity/curvature radius

struct State {
    double t = 0.0;      // s
    double x = 0.0;      // m downrange
    double y = 0.0;      // m altitude
    double z = 0.0;      // m crossrange
    double v = 0.0;      // m/s
    double theta = 0.0;  // rad flight-path angle, positive above horizon
    double psi = 0.0;    // rad heading, 0 = downrange axis
};

struct VehicleParams {
    double mass = 1500.0;        // kg
    double ref_area = 2.0;       // m^2
    double lift_to_drag = 2.0;   // K = CY/CX
    double cx0 = 0.10;           // zero-lift drag coefficient
    double cy_max = 2.4;         // max lift coefficient magnitude

    void validate() const {
        if (!(mass > 0.0)) throw std::invalid_argument("vehicle.mass must be positive");
        if (!(ref_area > 0.0)) throw std::invalid_argument("vehicle.ref_area must be positive");
        if (!(lift_to_drag > 0.0))
            throw std::invalid_argument("vehicle.lift_to_drag must be positive");
        if (cx0 < 0.0) throw std::invalid_argument("vehicle.cx0 must be non-negative");
        if (!(cy_max > 0.0)) throw std::invalid_argument("vehicle.cy_max must be positive");
    }
};

struct GuidanceCommand {
    double u_vertical = 0.0;  // load factor, g units
    double u_lateral = 0.0;
};

struct StateDerivative {
    double dx = 0.0;
    double dy = 0.0;
    double dz = 0.0;
    double dv = 0.0;
    double dtheta = 0.0;
    double dpsi = 0.0;
};

struct AppliedLoad {
    GuidanceCommand applied;
    bool saturated = false;
};

inline double gravity(double altitude) {
    if (altitude < 0.0) altitude = 0.0;
    const double r = kEarthRadius / (kEarthRadius + altitude);
    return kG0 * r * r;
}

// Saturate a commanded load factor pair by the achievable lift coefficient.
// The command vector is scaled so its total lift coefficient does not exceed
// cy_max; in vacuum any nonzero command collapses to zero.
inline AppliedLoad achieved_load(const GuidanceCommand& command, double dynamic_pressure,
                                 const VehicleParams& vehicle, double g) {
    AppliedLoad out{command, false};
    const double magnitude =
        std::hypot(command.u_vertical, command.u_lateral);
    if (magnitude == 0.0) return out;
    if (dynamic_pressure <= 0.0) {
        out.applied = {0.0, 0.0};
        out.saturated = true;
        return out;
    }
    const double lift_required = magnitude * vehicle.mass * g;
    const double cy_required = lift_required / (dynamic_pressure * vehicle.ref_area);
    if (cy_required > vehicle.cy_max) {
        const double scale = vehicle.cy_max / cy_required;
        out.applied.u_vertical = command.u_vertical * scale;
        out.applied.u_lateral = command.u_lateral * scale;
        out.saturated = true;
    }
    return out;
}

inline AppliedLoad achieved_load(const GuidanceCommand& command, double dynamic_pressure,
                                 const VehicleParams& vehicle) {
    return achieved_load(command, dynamic_pressure, vehicle, kG0);
}

struct DerivativeDiagnostics {
    AppliedLoad load;
    double dynamic_pressure = 0.0;  // Pa
    double mach = 0.0;
    double drag = 0.0;              // N
};

// dV/dt = -D/m - g sin(theta)
// dtheta/dt = (g/V)(nv - cos(theta)) [+ (V/(Re+y)) cos(theta) on a round Earth]
// dpsi/dt = (g/V) nl / cos(theta)
template <typename AtmosphereFn>
inline StateDerivative derivatives(const State& state, const GuidanceCommand& command,
                                   const VehicleParams& vehicle, AtmosphereFn&& atmo,
                                   bool curvature_term, DerivativeDiagnostics* diag = nullptr) {
    if (!(state.v > 0.0)) {
        throw std::domain_error("dynamics::derivatives: speed must be positive");
    }
    const double g = gravity(state.y);
    const atmosphere::AtmosphereSample air = atmo(state.y < 0.0 ? 0.0 : state.y);
    const double q = 0.5 * air.density * state.v * state.v;

    const AppliedLoad load = achieved_load(command, q, vehicle, g);
    const double lift_vertical = load.applied.u_vertical * vehicle.mass * g;
    const double lift_lateral = load.applied.u_lateral * vehicle.mass * g;
    const double drag = q * vehicle.ref_area * vehicle.cx0 +
                        (std::fabs(lift_vertical) + std::fabs(lift_lateral)) /
                            vehicle.lift_to_drag;

    const double cos_theta = std::cos(state.theta);
    const double sin_theta = std::sin(state.theta);

    StateDerivative d{};
    d.dv = -drag / vehicle.mass - g * sin_theta;
    d.dtheta = (g / state.v) * (load.applied.u_vertical - cos_theta);
    if (curvature_term) {
        d.dtheta += (state.v / (kEarthRadius + state.y)) * cos_theta;
    }
    // Lateral channel; inert at cos(theta) ~ 0 (never reached in practice).
    d.dpsi = std::fabs(cos_theta) > 1e-9
                 ? (g / state.v) * load.applied.u_lateral / cos_theta
                 : 0.0;
    d.dx = state.v * cos_theta * std::cos(state.psi);
    d.dy = state.v * sin_theta;
    d.dz = state.v * cos_theta * std::sin(state.psi);

    if (diag != nullptr) {
        diag->load = load;
        diag->dynamic_pressure = q;
        diag->mach = air.speed_of_sound > 0.0 ? state.v / air.speed_of_sound : 0.0;
        diag->drag = drag;
    }
    return d;
}

}  // namespace entrysim::dynamics

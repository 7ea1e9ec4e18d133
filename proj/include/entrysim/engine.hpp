#pragma once

// Fixed-step RK4 integration of the closed-loop vehicle with the guidance
// command recomputed every step and held constant within it. Ground impact is
// refined by bisection on the crossing step; phase transitions are detected at
// step boundaries.

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "entrysim/atmosphere.hpp"
#include "entrysim/dynamics.hpp"
#include "entrysim/guidance.hpp"

namespace entrysim::engine {

enum class FlightMode { Planar, ThreeD };

enum class Outcome { Impact, Timeout, Aborted };

inline const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Impact: return "impact";
        case Outcome::Timeout: return "timeout";
        case Outcome::Aborted: return "aborted";
    }
    return "unknown";
}

struct Scenario {
    guidance::EntryConditions entry{};
    dynamics::VehicleParams vehicle{};
    guidance::GuidanceConfig guidance{};
    guidance::TargetPosition target{745000.0, 0.0};
    FlightMode mode = FlightMode::ThreeD;
    double dt = 0.01;          // s
    double max_time = 600.0;   // s
    bool curvature_term = false;
    double density_multiplier = 1.0;  // dispersion knob, scales atmosphere density
    std::uint64_t seed = 1;
    int emit_every = 1;        // trajectory decimation

    void validate() const {
        entry.validate();
        vehicle.validate();
        guidance.validate();
        if (!(dt > 0.0)) throw std::invalid_argument("simulation.dt must be positive");
        if (!(max_time > dt))
            throw std::invalid_argument("simulation.max_time must exceed dt");
        if (emit_every < 1)
            throw std::invalid_argument("simulation.emit_every must be >= 1");
        if (!(density_multiplier > 0.0))
            throw std::invalid_argument("simulation.density_multiplier must be positive");
    }
};

struct TrajectorySample {
    dynamics::State state;
    guidance::GuidancePhase phase = guidance::GuidancePhase::GravitationalDescent;
    double u_cmd = 0.0;      // commanded vertical load factor
    double u_applied = 0.0;  // achieved vertical load factor
    double mach = 0.0;
    double dynamic_pressure = 0.0;  // Pa
};

using Trajectory = std::vector<TrajectorySample>;

struct TerminalReport {
    double miss_distance = 0.0;   // m
    double impact_time = 0.0;     // s
    double impact_x = 0.0;        // m
    double impact_z = 0.0;        // m
    double downrange = 0.0;       // m, ground range along x at impact
    std::map<std::string, double> phase_entry_times;  // s, per visited phase
    double peak_applied_load = 0.0;       // g
    double peak_dynamic_pressure = 0.0;   // Pa
    double saturation_fraction = 0.0;
    Outcome outcome = Outcome::Timeout;
};

namespace detail {

inline bool finite(const dynamics::StateDerivative& d) {
    return std::isfinite(d.dx) && std::isfinite(d.dy) && std::isfinite(d.dz) &&
           std::isfinite(d.dv) && std::isfinite(d.dtheta) && std::isfinite(d.dpsi);
}

inline bool finite(const dynamics::State& s) {
    return std::isfinite(s.x) && std::isfinite(s.y) && std::isfinite(s.z) &&
           std::isfinite(s.v) && std::isfinite(s.theta) && std::isfinite(s.psi);
}

inline double wrap_pi(double a) {
    constexpr double kPi = 3.14159265358979323846;
    while (a > kPi) a -= 2.0 * kPi;
    while (a <= -kPi) a += 2.0 * kPi;
    return a;
}

}  // namespace detail

// Classic four-stage Runge-Kutta advance of the full state.
template <typename DerivFn>
inline dynamics::State rk4_step(const dynamics::State& state, double dt, DerivFn&& deriv) {
    if (!(dt > 0.0)) throw std::domain_error("rk4_step: dt must be positive");

    auto advance = [&](const dynamics::State& s, const dynamics::StateDerivative& d,
                       double h) {
        dynamics::State n = s;
        n.t = s.t + h;
        n.x = s.x + h * d.dx;
        n.y = s.y + h * d.dy;
        n.z = s.z + h * d.dz;
        n.v = s.v + h * d.dv;
        n.theta = s.theta + h * d.dtheta;
        n.psi = s.psi + h * d.dpsi;
        return n;
    };

    const dynamics::StateDerivative k1 = deriv(state);
    const dynamics::StateDerivative k2 = deriv(advance(state, k1, 0.5 * dt));
    const dynamics::StateDerivative k3 = deriv(advance(state, k2, 0.5 * dt));
    const dynamics::StateDerivative k4 = deriv(advance(state, k3, dt));
    if (!detail::finite(k1) || !detail::finite(k2) || !detail::finite(k3) ||
        !detail::finite(k4)) {
        throw std::domain_error("rk4_step: non-finite derivative");
    }

    dynamics::State out = state;
    out.t = state.t + dt;
    out.x = state.x + dt / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
    out.y = state.y + dt / 6.0 * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy);
    out.z = state.z + dt / 6.0 * (k1.dz + 2.0 * k2.dz + 2.0 * k3.dz + k4.dz);
    out.v = state.v + dt / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
    out.theta =
        state.theta + dt / 6.0 * (k1.dtheta + 2.0 * k2.dtheta + 2.0 * k3.dtheta + k4.dtheta);
    out.psi = detail::wrap_pi(
        state.psi + dt / 6.0 * (k1.dpsi + 2.0 * k2.dpsi + 2.0 * k3.dpsi + k4.dpsi));
    return out;
}

// Bisection on the step fraction of the ground crossing.
template <typename DerivFn>
inline dynamics::State refine_impact(const dynamics::State& state_before,
                                     const dynamics::State& state_after, DerivFn&& deriv) {
    if (!(state_before.y > 0.0) || state_after.y > 0.0) {
        throw std::logic_error("refine_impact: requires y_before > 0 >= y_after");
    }
    if (state_after.y == 0.0) return state_after;

    const double dt_full = state_after.t - state_before.t;
    double lo = 0.0, hi = 1.0;
    dynamics::State best = state_after;
    for (int iter = 0; iter < 60; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const dynamics::State probe = rk4_step(state_before, mid * dt_full, deriv);
        if (std::fabs(probe.y) < 1e-3) return probe;
        if (probe.y > 0.0) {
            lo = mid;
        } else {
            hi = mid;
            best = probe;
        }
    }
    return best;
}

struct RunResult {
    Trajectory trajectory;
    TerminalReport report;
};

inline RunResult run(const Scenario& scenario) {
    scenario.validate();

    dynamics::State state{};
    state.t = 0.0;
    state.x = 0.0;
    state.y = scenario.entry.entry_altitude;
    state.z = 0.0;
    state.v = scenario.entry.entry_speed;
    state.theta = -scenario.entry.entry_gamma;
    state.psi = scenario.mode == FlightMode::Planar ? 0.0 : scenario.entry.entry_heading;

    const bool planar = scenario.mode == FlightMode::Planar;
    guidance::Autopilot autopilot(scenario.guidance, planar);

    std::mt19937_64 rng(scenario.seed);
    std::normal_distribution<double> unit_normal(0.0, 1.0);
    auto noise = [&] { return unit_normal(rng); };

    auto atmo = [&](double h) {
        atmosphere::AtmosphereSample s = atmosphere::sample(h);
        s.density *= scenario.density_multiplier;
        s.pressure *= scenario.density_multiplier;
        return s;
    };

    RunResult result{};
    TerminalReport& report = result.report;
    report.phase_entry_times[guidance::phase_name(autopilot.phase())] = 0.0;

    long total_steps = 0;
    long saturated_steps = 0;

    auto record = [&](const dynamics::State& s, double u_cmd, double u_applied, double mach,
                      double q) {
        result.trajectory.push_back({s, autopilot.phase(), u_cmd, u_applied, mach, q});
    };

    dynamics::GuidanceCommand command{};
    auto deriv_with_command = [&](const dynamics::State& s) {
        return dynamics::derivatives(s, command, scenario.vehicle, atmo,
                                     scenario.curvature_term);
    };

    long step_index = 0;
    while (true) {
        const guidance::SeekerMeasurement measurement =
            guidance::seeker_measure(state, scenario.target, scenario.guidance, noise);
        const guidance::GuidancePhase prev_phase = autopilot.phase();
        autopilot.update_phase(state, measurement);
        if (autopilot.phase() != prev_phase) {
            report.phase_entry_times[guidance::phase_name(autopilot.phase())] = state.t;
        }
        command = autopilot.command(state, measurement);

        dynamics::DerivativeDiagnostics diag{};
        dynamics::StateDerivative d{};
        try {
            d = dynamics::derivatives(state, command, scenario.vehicle, atmo,
                                      scenario.curvature_term, &diag);
        } catch (const std::domain_error&) {
            report.outcome = Outcome::Aborted;
            break;
        }
        (void)d;

        const double applied_mag =
            std::hypot(diag.load.applied.u_vertical, diag.load.applied.u_lateral);
        if (applied_mag > report.peak_applied_load) report.peak_applied_load = applied_mag;
        if (diag.dynamic_pressure > report.peak_dynamic_pressure) {
            report.peak_dynamic_pressure = diag.dynamic_pressure;
        }
        ++total_steps;
        if (diag.load.saturated) ++saturated_steps;

        if (step_index % scenario.emit_every == 0) {
            record(state, command.u_vertical, diag.load.applied.u_vertical, diag.mach,
                   diag.dynamic_pressure);
        }

        dynamics::State next{};
        try {
            next = rk4_step(state, scenario.dt, deriv_with_command);
        } catch (const std::domain_error&) {
            report.outcome = Outcome::Aborted;
            break;
        }
        if (!detail::finite(next) || !(next.v > 0.0)) {
            report.outcome = Outcome::Aborted;
            break;
        }

        if (next.y <= 0.0) {
            const dynamics::State impact =
                refine_impact(state, next, deriv_with_command);
            state = impact;
            if (autopilot.phase() != guidance::GuidancePhase::Impact) {
                report.phase_entry_times[guidance::phase_name(
                    guidance::GuidancePhase::Impact)] = impact.t;
            }
            dynamics::State ground = impact;
            ground.y = 0.0;
            record(ground, command.u_vertical, diag.load.applied.u_vertical, diag.mach,
                   diag.dynamic_pressure);
            report.outcome = Outcome::Impact;
            report.impact_time = impact.t;
            report.impact_x = impact.x;
            report.impact_z = impact.z;
            report.downrange = impact.x;
            report.miss_distance = std::hypot(impact.x - scenario.target.x,
                                              impact.z - scenario.target.z);
            break;
        }

        state = next;
        ++step_index;
        if (state.t + 0.5 * scenario.dt >= scenario.max_time) {
            record(state, command.u_vertical, diag.load.applied.u_vertical, diag.mach,
                   diag.dynamic_pressure);
            report.outcome = Outcome::Timeout;
            report.impact_time = state.t;
            report.downrange = state.x;
            break;
        }
    }

    report.saturation_fraction =
        total_steps > 0 ? static_cast<double>(saturated_steps) / total_steps : 0.0;
    return result;
}

}  // namespace entrysim::engine

#pragma once

// Four-phase autopilot. Phase control laws:
//   1 gravitational descent: U = cos(theta)
//   2 constant-radius pull-up: U = V^2/(g R) + cos(theta)
//   3 altitude-hold cruise: U = k (H - Y) + cos(theta), plus a configurable
//     sink-rate damping term (the bare proportional law is an undamped phugoid)
//   4 terminal seeker pursuit: U = k phi
// plus the forward-only phase state machine and the infrared seeker model
// (range gate, conical field of view, additive Gaussian angle noise).

#include <cmath>
#include <stdexcept>

#include "entrysim/dynamics.hpp"

namespace entrysim::guidance {

enum class GuidancePhase {
    GravitationalDescent,
    PullUp,
    Cruise,
    Terminal,
    Impact,
};

inline const char* phase_name(GuidancePhase phase) {
    switch (phase) {
        case GuidancePhase::GravitationalDescent: return "gravitational_descent";
        case GuidancePhase::PullUp: return "pull_up";
        case GuidancePhase::Cruise: return "cruise";
        case GuidancePhase::Terminal: return "terminal";
        case GuidancePhase::Impact: return "impact";
    }
    return "unknown";
}

struct GuidanceConfig {
    double pullup_altitude = 85000.0;        // m
    double turn_radius = 45000.0;            // m
    double cruise_altitude = 35000.0;        // m, the hold target H
    double k_alt = 5e-4;                     // 1/m
    double k_sink = 0.013;                   // s/m, cruise sink-rate damping (0 = bare law)
    double k_terminal = 3000.0;              // load factor per radian of LOS angle
    double seeker_acquisition_range = 150000.0;  // m
    double seeker_fov_half_angle = 0.9;      // rad
    double seeker_noise_sigma = 1e-3;        // rad, per angle channel
    double seeker_hold_time = 0.5;           // s, stale-measurement hold in Terminal

    void validate() const {
        if (!(pullup_altitude > 0.0))
            throw std::invalid_argument("guidance.pullup_altitude must be positive");
        if (!(turn_radius > 0.0))
            throw std::invalid_argument("guidance.turn_radius must be positive");
        if (!(cruise_altitude > 0.0))
            throw std::invalid_argument("guidance.cruise_altitude must be positive");
        if (!(k_alt > 0.0)) throw std::invalid_argument("guidance.k_alt must be positive");
        if (k_sink < 0.0) throw std::invalid_argument("guidance.k_sink must be non-negative");
        if (!(k_terminal > 0.0))
            throw std::invalid_argument("guidance.k_terminal must be positive");
        if (!(seeker_acquisition_range > 0.0))
            throw std::invalid_argument("guidance.seeker_acquisition_range must be positive");
        if (!(seeker_fov_half_angle > 0.0) || seeker_fov_half_angle >= 1.5707963267948966)
            throw std::invalid_argument("guidance.seeker_fov_half_angle must be in (0, pi/2)");
        if (seeker_noise_sigma < 0.0)
            throw std::invalid_argument("guidance.seeker_noise_sigma must be non-negative");
        if (seeker_hold_time < 0.0)
            throw std::invalid_argument("guidance.seeker_hold_time must be non-negative");
    }
};

struct EntryConditions {
    double entry_altitude = 100000.0;  // m
    double entry_speed = 7600.0;       // m/s
    double entry_gamma = 3.5 * 3.14159265358979323846 / 180.0;  // rad below horizon
    double entry_heading = 0.0;        // rad

    void validate() const {
        if (!(entry_speed > 0.0))
            throw std::invalid_argument("entry.speed must be positive");
        if (!(entry_altitude > 0.0))
            throw std::invalid_argument("entry.altitude must be positive");
        const double deg = entry_gamma * 180.0 / 3.14159265358979323846;
        if (!(deg > 0.0 && deg < 15.0))
            throw std::invalid_argument("entry.gamma must be in (0, 15) degrees below horizon");
    }
};

struct TargetPosition {
    double x = 0.0;  // m downrange, at ground level
    double z = 0.0;  // m crossrange
};

struct SeekerMeasurement {
    bool acquired = false;
    double phi_elevation = 0.0;  // rad, target above (+) / below (-) the velocity vector
    double phi_azimuth = 0.0;    // rad, target right (+) / left (-) of the velocity vector
    double slant_range = 0.0;    // m
};

inline dynamics::GuidanceCommand control_phase1(const dynamics::State& state) {
    return {std::cos(state.theta), 0.0};
}

inline dynamics::GuidanceCommand control_phase2(const dynamics::State& state,
                                                double turn_radius) {
    if (!(turn_radius > 0.0)) throw std::domain_error("control_phase2: turn_radius <= 0");
    const double g = dynamics::gravity(state.y);
    return {state.v * state.v / (g * turn_radius) + std::cos(state.theta), 0.0};
}

inline dynamics::GuidanceCommand control_phase3(const dynamics::State& state, double k_alt,
                                                double cruise_altitude, double k_sink = 0.0) {
    double u = k_alt * (cruise_altitude - state.y) + std::cos(state.theta);
    if (k_sink != 0.0) u -= k_sink * state.v * std::sin(state.theta);
    return {u, 0.0};
}

inline dynamics::GuidanceCommand control_phase4(const SeekerMeasurement& measurement,
                                                double k_terminal) {
    if (!measurement.acquired) {
        throw std::logic_error("control_phase4: measurement not acquired");
    }
    return {k_terminal * measurement.phi_elevation, k_terminal * measurement.phi_azimuth};
}

// Line-of-sight angles in the velocity frame. NoiseFn yields standard-normal
// draws; it is not consulted when sigma is zero.
template <typename NoiseFn>
inline SeekerMeasurement seeker_measure(const dynamics::State& state,
                                        const TargetPosition& target,
                                        const GuidanceConfig& config, NoiseFn&& noise) {
    SeekerMeasurement m{};
    const double lx = target.x - state.x;
    const double ly = 0.0 - state.y;
    const double lz = target.z - state.z;
    m.slant_range = std::sqrt(lx * lx + ly * ly + lz * lz);
    if (m.slant_range <= 0.0) {
        m.acquired = true;
        return m;
    }

    const double ct = std::cos(state.theta), st = std::sin(state.theta);
    const double cp = std::cos(state.psi), sp = std::sin(state.psi);
    // Velocity frame: forward along V, up in the vertical plane, right completes it.
    const double forward = lx * ct * cp + ly * st + lz * ct * sp;
    const double up = -lx * st * cp + ly * ct - lz * st * sp;
    const double right = -lx * sp + lz * cp;

    m.phi_elevation = std::atan2(up, forward);
    m.phi_azimuth = std::atan2(right, forward);

    double cos_total = forward / m.slant_range;
    if (cos_total > 1.0) cos_total = 1.0;
    if (cos_total < -1.0) cos_total = -1.0;
    const double total_angle = std::acos(cos_total);

    m.acquired = m.slant_range <= config.seeker_acquisition_range &&
                 total_angle <= config.seeker_fov_half_angle;
    if (m.acquired && config.seeker_noise_sigma > 0.0) {
        m.phi_elevation += config.seeker_noise_sigma * noise();
        m.phi_azimuth += config.seeker_noise_sigma * noise();
    }
    return m;
}

// Forward-only transitions; thresholds are inclusive.
inline GuidancePhase next_phase(GuidancePhase phase, const dynamics::State& state,
                                const SeekerMeasurement& measurement,
                                const GuidanceConfig& config) {
    switch (phase) {
        case GuidancePhase::GravitationalDescent:
            return state.y <= config.pullup_altitude ? GuidancePhase::PullUp : phase;
        case GuidancePhase::PullUp:
            return (state.theta >= 0.0 || state.y <= config.cruise_altitude)
                       ? GuidancePhase::Cruise
                       : phase;
        case GuidancePhase::Cruise:
            return measurement.acquired ? GuidancePhase::Terminal : phase;
        case GuidancePhase::Terminal:
            return state.y <= 0.0 ? GuidancePhase::Impact : phase;
        case GuidancePhase::Impact:
            return phase;
    }
    return phase;
}

// Phase bookkeeping plus terminal-seeker latching: once Terminal, a lost
// measurement is held for seeker_hold_time, after which the command falls
// back to U = cos(theta).
class Autopilot {
public:
    explicit Autopilot(const GuidanceConfig& config, bool planar)
        : config_(config), planar_(planar) {}

    GuidancePhase phase() const { return phase_; }

    void update_phase(const dynamics::State& state, const SeekerMeasurement& measurement) {
        phase_ = next_phase(phase_, state, measurement, config_);
    }

    dynamics::GuidanceCommand command(const dynamics::State& state,
                                      const SeekerMeasurement& measurement) {
        dynamics::GuidanceCommand cmd{};
        switch (phase_) {
            case GuidancePhase::GravitationalDescent:
                cmd = control_phase1(state);
                break;
            case GuidancePhase::PullUp:
                cmd = control_phase2(state, config_.turn_radius);
                break;
            case GuidancePhase::Cruise:
                cmd = control_phase3(state, config_.k_alt, config_.cruise_altitude,
                                     config_.k_sink);
                break;
            case GuidancePhase::Terminal:
            case GuidancePhase::Impact: {
                if (measurement.acquired) {
                    held_ = measurement;
                    held_time_ = state.t;
                    have_held_ = true;
                }
                if (have_held_ && state.t - held_time_ <= config_.seeker_hold_time) {
                    cmd = control_phase4(held_, config_.k_terminal);
                } else {
                    cmd = control_phase1(state);  // stale seeker: coast
                }
                break;
            }
        }
        if (planar_) cmd.u_lateral = 0.0;
        return cmd;
    }

private:
    GuidanceConfig config_;
    bool planar_;
    GuidancePhase phase_ = GuidancePhase::GravitationalDescent;
    SeekerMeasurement held_{};
    double held_time_ = 0.0;
    bool have_held_ = false;
};

}  // namespace entrysim::guidance

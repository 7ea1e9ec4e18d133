#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "entrysim/guidance.hpp"

using namespace entrysim;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Noise source that must not be consulted.
struct ForbiddenNoise {
    double operator()() const {
        throw std::logic_error("noise consulted although sigma is zero");
    }
};

dynamics::State make_state(double x, double y, double v, double theta, double psi = 0.0,
                           double z = 0.0, double t = 0.0) {
    dynamics::State s{};
    s.t = t;
    s.x = x;
    s.y = y;
    s.z = z;
    s.v = v;
    s.theta = theta;
    s.psi = psi;
    return s;
}

}  // namespace

TEST_CASE("phase names") {
    CHECK(std::string(guidance::phase_name(guidance::GuidancePhase::GravitationalDescent)) ==
          "gravitational_descent");
    CHECK(std::string(guidance::phase_name(guidance::GuidancePhase::PullUp)) == "pull_up");
    CHECK(std::string(guidance::phase_name(guidance::GuidancePhase::Cruise)) == "cruise");
    CHECK(std::string(guidance::phase_name(guidance::GuidancePhase::Terminal)) == "terminal");
    CHECK(std::string(guidance::phase_name(guidance::GuidancePhase::Impact)) == "impact");
}

TEST_CASE("guidance config validation") {
    guidance::GuidanceConfig c{};
    CHECK_NOTHROW(c.validate());
    c.turn_radius = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.seeker_fov_half_angle = 2.0;  // >= pi/2
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("entry condition validation") {
    guidance::EntryConditions e{};
    CHECK_NOTHROW(e.validate());
    e.entry_gamma = -0.01;
    CHECK_THROWS_AS(e.validate(), std::invalid_argument);
    e = {};
    e.entry_gamma = 20.0 * kPi / 180.0;
    CHECK_THROWS_AS(e.validate(), std::invalid_argument);
}

TEST_CASE("phase 1 law: U = cos(theta)") {
    const auto cmd = guidance::control_phase1(make_state(0, 90000, 7600, -3.5 * kPi / 180.0));
    CHECK(cmd.u_vertical == doctest::Approx(0.998135).epsilon(1e-6));
    CHECK(cmd.u_lateral == 0.0);
}

TEST_CASE("phase 2 law: U = V^2/(gR) + cos(theta)") {
    // level flight at sea-level gravity
    const auto fast = guidance::control_phase2(make_state(0, 0, 7600, 0.0), 45000.0);
    CHECK(std::fabs(fast.u_vertical - 131.88) < 0.01);
    const auto slow = guidance::control_phase2(make_state(0, 0, 665.1, 0.0), 45000.0);
    CHECK(std::fabs(slow.u_vertical - 2.0) < 0.01);
    CHECK_THROWS_AS(guidance::control_phase2(make_state(0, 0, 100, 0.0), 0.0),
                    std::domain_error);
}

TEST_CASE("phase 3 law: U = k (H - Y) + cos(theta)") {
    const double k = 5e-4, cruise = 35000.0;
    CHECK(guidance::control_phase3(make_state(0, 30000, 1000, 0.0), k, cruise).u_vertical ==
          doctest::Approx(3.5).epsilon(1e-9));
    CHECK(guidance::control_phase3(make_state(0, 40000, 1000, 0.0), k, cruise).u_vertical ==
          doctest::Approx(-1.5).epsilon(1e-9));
    // sink-rate damping opposes the vertical speed
    const auto sinking = make_state(0, 35000, 1000, -0.01);
    const double bare = guidance::control_phase3(sinking, k, cruise).u_vertical;
    const double damped = guidance::control_phase3(sinking, k, cruise, 0.013).u_vertical;
    CHECK(damped - bare ==
          doctest::Approx(-0.013 * sinking.v * std::sin(sinking.theta)).epsilon(1e-12));
    CHECK(damped > bare);
}

TEST_CASE("phase 4 law: U = k phi, per channel") {
    guidance::SeekerMeasurement m{};
    m.acquired = true;
    m.phi_elevation = -0.02;
    m.phi_azimuth = 0.005;
    const auto cmd = guidance::control_phase4(m, 3000.0);
    CHECK(cmd.u_vertical == doctest::Approx(-60.0).epsilon(1e-12));
    CHECK(cmd.u_lateral == doctest::Approx(15.0).epsilon(1e-12));
    m.acquired = false;
    CHECK_THROWS_AS(guidance::control_phase4(m, 3000.0), std::logic_error);
}

TEST_CASE("seeker sees a target 45 degrees below a level velocity vector") {
    guidance::GuidanceConfig config{};
    config.seeker_noise_sigma = 0.0;
    const auto s = make_state(0.0, 10000.0, 1000.0, 0.0);
    const guidance::TargetPosition target{10000.0, 0.0};
    const auto m = guidance::seeker_measure(s, target, config, ForbiddenNoise{});
    CHECK(m.slant_range == doctest::Approx(std::sqrt(2.0) * 10000.0).epsilon(1e-9));
    CHECK(m.phi_elevation == doctest::Approx(-kPi / 4.0).epsilon(1e-9));
    CHECK(std::fabs(m.phi_azimuth) < 1e-12);
    CHECK(m.acquired);  // 45 deg < default 0.9 rad field of view, range well inside gate
}

TEST_CASE("seeker reads zero offset when the velocity vector points at the target") {
    guidance::GuidanceConfig config{};
    config.seeker_noise_sigma = 0.0;
    const auto s = make_state(0.0, 10000.0, 1000.0, -kPi / 4.0);
    const auto m =
        guidance::seeker_measure(s, {10000.0, 0.0}, config, ForbiddenNoise{});
    CHECK(m.acquired);
    CHECK(std::fabs(m.phi_elevation) < 1e-9);
    CHECK(std::fabs(m.phi_azimuth) < 1e-9);
}

TEST_CASE("seeker azimuth sign: target to the right is positive") {
    guidance::GuidanceConfig config{};
    config.seeker_noise_sigma = 0.0;
    const auto s = make_state(0.0, 5000.0, 1000.0, -0.5);
    const auto right = guidance::seeker_measure(s, {5000.0, 2000.0}, config, ForbiddenNoise{});
    CHECK(right.phi_azimuth > 0.0);
    const auto left = guidance::seeker_measure(s, {5000.0, -2000.0}, config, ForbiddenNoise{});
    CHECK(left.phi_azimuth < 0.0);
    CHECK(right.phi_azimuth == doctest::Approx(-left.phi_azimuth).epsilon(1e-12));
}

TEST_CASE("seeker range gate and field-of-view gate") {
    guidance::GuidanceConfig config{};
    config.seeker_noise_sigma = 0.0;
    config.seeker_acquisition_range = 20000.0;
    // straight-ahead geometry, range sweeps through the gate
    const auto s = make_state(0.0, 10000.0, 1000.0, -kPi / 4.0);
    const auto inside =
        guidance::seeker_measure(s, {10000.0, 0.0}, config, ForbiddenNoise{});
    CHECK(inside.acquired);
    config.seeker_acquisition_range = 14000.0;  // slant is ~14142 m
    const auto outside =
        guidance::seeker_measure(s, {10000.0, 0.0}, config, ForbiddenNoise{});
    CHECK_FALSE(outside.acquired);

    // level flight, target 45 deg below, field of view too narrow
    config.seeker_acquisition_range = 150000.0;
    config.seeker_fov_half_angle = 0.5;
    const auto level = make_state(0.0, 10000.0, 1000.0, 0.0);
    const auto blocked =
        guidance::seeker_measure(level, {10000.0, 0.0}, config, ForbiddenNoise{});
    CHECK_FALSE(blocked.acquired);
    CHECK(blocked.phi_elevation == doctest::Approx(-kPi / 4.0).epsilon(1e-9));  // still reported
}

TEST_CASE("seeker noise is additive per channel and skipped when sigma is zero") {
    guidance::GuidanceConfig config{};
    config.seeker_noise_sigma = 1e-3;
    const auto s = make_state(0.0, 10000.0, 1000.0, -kPi / 4.0);
    int draws = 0;
    auto unit_noise = [&] {
        ++draws;
        return 1.0;
    };
    const auto noisy = guidance::seeker_measure(s, {10000.0, 0.0}, config, unit_noise);
    CHECK(draws == 2);
    CHECK(noisy.phi_elevation == doctest::Approx(1e-3).epsilon(1e-9));
    CHECK(noisy.phi_azimuth == doctest::Approx(1e-3).epsilon(1e-9));

    config.seeker_noise_sigma = 0.0;
    CHECK_NOTHROW(guidance::seeker_measure(s, {10000.0, 0.0}, config, ForbiddenNoise{}));
}

TEST_CASE("phase transitions fire at the configured boundaries") {
    guidance::GuidanceConfig config{};
    guidance::SeekerMeasurement none{};
    using P = guidance::GuidancePhase;

    CHECK(guidance::next_phase(P::GravitationalDescent,
                               make_state(0, 90000, 7000, -0.06), none, config) ==
          P::GravitationalDescent);
    CHECK(guidance::next_phase(P::GravitationalDescent,
                               make_state(0, 85000, 7000, -0.06), none, config) == P::PullUp);

    CHECK(guidance::next_phase(P::PullUp, make_state(0, 60000, 7000, -0.02), none, config) ==
          P::PullUp);
    CHECK(guidance::next_phase(P::PullUp, make_state(0, 60000, 7000, 0.0), none, config) ==
          P::Cruise);
    CHECK(guidance::next_phase(P::PullUp, make_state(0, 35000, 7000, -0.02), none, config) ==
          P::Cruise);

    CHECK(guidance::next_phase(P::Cruise, make_state(0, 35000, 3000, 0.0), none, config) ==
          P::Cruise);
    guidance::SeekerMeasurement seen{};
    seen.acquired = true;
    CHECK(guidance::next_phase(P::Cruise, make_state(0, 35000, 3000, 0.0), seen, config) ==
          P::Terminal);

    CHECK(guidance::next_phase(P::Terminal, make_state(0, 100, 2000, -0.5), seen, config) ==
          P::Terminal);
    CHECK(guidance::next_phase(P::Terminal, make_state(0, 0, 2000, -0.5), seen, config) ==
          P::Impact);
    CHECK(guidance::next_phase(P::Impact, make_state(0, 90000, 7000, -0.06), none, config) ==
          P::Impact);
}

TEST_CASE("phase machine never steps backwards") {
    guidance::GuidanceConfig config{};
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> alt(0.0, 110000.0);
    std::uniform_real_distribution<double> angle(-0.5, 0.5);
    std::bernoulli_distribution seen(0.3);
    auto phase = guidance::GuidancePhase::GravitationalDescent;
    for (int i = 0; i < 2000; ++i) {
        guidance::SeekerMeasurement m{};
        m.acquired = seen(rng);
        const auto next = guidance::next_phase(
            phase, make_state(0, alt(rng), 5000, angle(rng)), m, config);
        CHECK(static_cast<int>(next) >= static_cast<int>(phase));
        phase = next;
    }
}

TEST_CASE("autopilot holds a stale terminal measurement then falls back to coasting") {
    guidance::GuidanceConfig config{};
    config.seeker_noise_sigma = 0.0;
    guidance::Autopilot ap(config, false);

    // walk the phase machine into Terminal
    guidance::SeekerMeasurement none{};
    ap.update_phase(make_state(0, 84000, 7000, -0.06), none);
    CHECK(ap.phase() == guidance::GuidancePhase::PullUp);
    ap.update_phase(make_state(0, 40000, 7000, 0.0), none);
    CHECK(ap.phase() == guidance::GuidancePhase::Cruise);
    guidance::SeekerMeasurement seen{};
    seen.acquired = true;
    seen.phi_elevation = 0.01;
    seen.phi_azimuth = -0.002;
    ap.update_phase(make_state(0, 35000, 3000, 0.0), seen);
    REQUIRE(ap.phase() == guidance::GuidancePhase::Terminal);

    // fresh measurement drives the pursuit law
    const auto fresh = ap.command(make_state(0, 35000, 3000, 0.0, 0, 0, 10.0), seen);
    CHECK(fresh.u_vertical == doctest::Approx(config.k_terminal * 0.01).epsilon(1e-12));
    CHECK(fresh.u_lateral == doctest::Approx(config.k_terminal * -0.002).epsilon(1e-12));

    // lost lock: held within the hold window
    const auto held = ap.command(make_state(0, 34000, 3000, -0.01, 0, 0, 10.3), none);
    CHECK(held.u_vertical == doctest::Approx(config.k_terminal * 0.01).epsilon(1e-12));

    // hold expired: coast at U = cos(theta)
    const auto stale_state = make_state(0, 33000, 3000, -0.05, 0, 0, 11.0);
    const auto stale = ap.command(stale_state, none);
    CHECK(stale.u_vertical == doctest::Approx(std::cos(stale_state.theta)).epsilon(1e-12));
    CHECK(stale.u_lateral == 0.0);
}

TEST_CASE("planar autopilot suppresses the lateral channel") {
    guidance::GuidanceConfig config{};
    guidance::Autopilot ap(config, true);
    guidance::SeekerMeasurement none{};
    ap.update_phase(make_state(0, 84000, 7000, -0.06), none);
    ap.update_phase(make_state(0, 40000, 7000, 0.0), none);
    guidance::SeekerMeasurement seen{};
    seen.acquired = true;
    seen.phi_elevation = 0.01;
    seen.phi_azimuth = 0.02;
    ap.update_phase(make_state(0, 35000, 3000, 0.0), seen);
    const auto cmd = ap.command(make_state(0, 35000, 3000, 0.0), seen);
    CHECK(cmd.u_lateral == 0.0);
    CHECK(cmd.u_vertical != 0.0);
}

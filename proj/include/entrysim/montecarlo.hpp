#pragma once

// Dispersion sampling and ensemble statistics. Each run draws its parameters
// from an RNG stream derived from (base_seed, run_index) by a SplitMix64
// counter construction, so results are independent of execution order and
// thread count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "entrysim/engine.hpp"

namespace entrysim::montecarlo {

struct DispersionSpec {
    int n_runs = 200;
    std::uint64_t base_seed = 1;
    engine::Scenario nominal{};

    double mass_low = 1450.0, mass_high = 1550.0;              // kg
    double gamma_low_deg = 3.0, gamma_high_deg = 4.0;          // deg below horizon
    double altitude_low = 90000.0, altitude_high = 100000.0;   // m
    double density_multiplier_sigma = 0.05;                    // lognormal
    double seeker_noise_sigma = 1e-3;                          // rad
    double target_offset_sigma = 0.0;                          // m, per axis

    void validate() const {
        if (n_runs < 1) throw std::invalid_argument("dispersion.n_runs must be >= 1");
        if (mass_low > mass_high)
            throw std::invalid_argument("dispersion.mass range must be ordered");
        if (gamma_low_deg > gamma_high_deg)
            throw std::invalid_argument("dispersion.gamma range must be ordered");
        if (altitude_low > altitude_high)
            throw std::invalid_argument("dispersion.altitude range must be ordered");
        if (density_multiplier_sigma < 0.0)
            throw std::invalid_argument("dispersion.density_multiplier_sigma must be >= 0");
        if (seeker_noise_sigma < 0.0)
            throw std::invalid_argument("dispersion.seeker_noise_sigma must be >= 0");
        if (target_offset_sigma < 0.0)
            throw std::invalid_argument("dispersion.target_offset_sigma must be >= 0");
        nominal.validate();
    }
};

struct RunRecord {
    int run_index = 0;
    std::uint64_t seed = 0;  // engine noise seed for this run
    double mass = 0.0;
    double gamma_deg = 0.0;
    double entry_altitude = 0.0;
    double density_multiplier = 1.0;
    engine::TerminalReport report;
};

struct EnsembleStats {
    int n = 0;  // runs executed
    double miss_mean = 0.0;
    double miss_std = 0.0;
    double miss_min = 0.0;
    double miss_max = 0.0;
    double cep = 0.0;
    double q50 = 0.0;
    double q90 = 0.0;
    double q95 = 0.0;
    double impact_time_mean = 0.0;
    double impact_time_std = 0.0;
    double downrange_mean = 0.0;
    double downrange_std = 0.0;
    std::map<std::string, int> outcome_counts;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t run_stream_seed(std::uint64_t base_seed, int run_index,
                                     std::uint64_t salt) {
    return splitmix64(splitmix64(base_seed ^ salt) ^
                      splitmix64(static_cast<std::uint64_t>(run_index) + salt));
}

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double std_of(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace detail

// Empirical quantile with linear interpolation between order statistics.
inline double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw std::domain_error("quantile: empty list");
    if (p < 0.0) p = 0.0;
    if (p > 1.0) p = 1.0;
    std::sort(values.begin(), values.end());
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= values.size()) return values.back();
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

// CEP as the empirical median miss radius.
inline double cep(const std::vector<double>& miss_distances) {
    if (miss_distances.empty()) throw std::domain_error("cep: empty list");
    return quantile(miss_distances, 0.5);
}

inline engine::Scenario sample_scenario(const DispersionSpec& spec, int run_index) {
    if (run_index < 0 || run_index >= spec.n_runs) {
        throw std::domain_error("sample_scenario: run_index out of range");
    }
    std::mt19937_64 rng(detail::run_stream_seed(spec.base_seed, run_index, 0x5eedULL));

    engine::Scenario s = spec.nominal;
    s.vehicle.mass =
        std::uniform_real_distribution<double>(spec.mass_low, spec.mass_high)(rng);
    const double gamma_deg = std::uniform_real_distribution<double>(
        spec.gamma_low_deg, spec.gamma_high_deg)(rng);
    s.entry.entry_gamma = gamma_deg * 3.14159265358979323846 / 180.0;
    s.entry.entry_altitude = std::uniform_real_distribution<double>(
        spec.altitude_low, spec.altitude_high)(rng);
    if (spec.density_multiplier_sigma > 0.0) {
        s.density_multiplier = std::exp(
            std::normal_distribution<double>(0.0, spec.density_multiplier_sigma)(rng));
    } else {
        s.density_multiplier = 1.0;
    }
    if (spec.target_offset_sigma > 0.0) {
        std::normal_distribution<double> offset(0.0, spec.target_offset_sigma);
        s.target.x += offset(rng);
        s.target.z += offset(rng);
    }
    s.guidance.seeker_noise_sigma = spec.seeker_noise_sigma;
    s.seed = detail::run_stream_seed(spec.base_seed, run_index, 0x0f15eULL);
    return s;
}

struct EnsembleResult {
    EnsembleStats stats;
    std::vector<RunRecord> runs;  // ordered by run_index
};

inline int ensemble_threads() {
    if (const char* env = std::getenv("SIM_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

inline EnsembleResult run_ensemble(const DispersionSpec& spec) {
    spec.validate();

    std::vector<RunRecord> runs(static_cast<std::size_t>(spec.n_runs));
    const int n_threads = std::min(ensemble_threads(), spec.n_runs);

    std::atomic<int> next_index{0};
    auto worker = [&] {
        for (;;) {
            const int i = next_index.fetch_add(1);
            if (i >= spec.n_runs) break;
            const engine::Scenario scenario = sample_scenario(spec, i);
            RunRecord rec{};
            rec.run_index = i;
            rec.seed = scenario.seed;
            rec.mass = scenario.vehicle.mass;
            rec.gamma_deg = scenario.entry.entry_gamma * 180.0 / 3.14159265358979323846;
            rec.entry_altitude = scenario.entry.entry_altitude;
            rec.density_multiplier = scenario.density_multiplier;
            rec.report = engine::run(scenario).report;
            runs[static_cast<std::size_t>(i)] = std::move(rec);
        }
    };

    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    EnsembleStats stats{};
    stats.n = spec.n_runs;
    std::vector<double> misses, times, ranges;
    for (const RunRecord& rec : runs) {
        stats.outcome_counts[engine::outcome_name(rec.report.outcome)] += 1;
        if (rec.report.outcome == engine::Outcome::Impact) {
            misses.push_back(rec.report.miss_distance);
            times.push_back(rec.report.impact_time);
            ranges.push_back(rec.report.downrange);
        }
    }
    if (misses.empty()) {
        throw std::runtime_error("run_ensemble: no run reached impact; no miss statistics");
    }

    stats.miss_mean = detail::mean_of(misses);
    stats.miss_std = detail::std_of(misses, stats.miss_mean);
    stats.miss_min = *std::min_element(misses.begin(), misses.end());
    stats.miss_max = *std::max_element(misses.begin(), misses.end());
    stats.cep = cep(misses);
    stats.q50 = quantile(misses, 0.5);
    stats.q90 = quantile(misses, 0.9);
    stats.q95 = quantile(misses, 0.95);
    stats.impact_time_mean = detail::mean_of(times);
    stats.impact_time_std = detail::std_of(times, stats.impact_time_mean);
    stats.downrange_mean = detail::mean_of(ranges);
    stats.downrange_std = detail::std_of(ranges, stats.downrange_mean);
    return {stats, std::move(runs)};
}

}  // namespace entrysim::montecarlo

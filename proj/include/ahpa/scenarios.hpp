#pragma once

#include "ahpa/core.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

namespace ahpa {

enum class ScenarioKind { NP, WP, SP, Noisy, Missing, TrendChange };

std::string_view to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(std::string_view text);

struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::SP;
    std::size_t length_minutes = 20160;
    std::uint64_t seed = 42;
    TimePoint start = from_epoch_minutes(28401120);  // 2024-01-01T00:00Z
    double base_level = 60.0;
    double amplitude = 40.0;
    double noise_sigma = 1.5;
    std::size_t period_minutes = 1440;

    double ar_phi = 0.8;             // NP
    double ar_sigma = 6.0;           // NP innovation sd
    double amplitude_jitter = 0.5;   // WP: per-cycle factor in [1-j, 1+j]
    std::size_t outlier_count = 30;  // NOISY
    double outlier_magnitude = 200.0;
    std::optional<std::size_t> missing_day;     // MISSING; seeded when empty
    std::optional<std::size_t> trend_break;     // TREND_CHANGE; seeded in [N/2, 3N/4] when empty
    double trend_slope_per_day = 10.0;
};

/// Scenario defaults for `kind` (see README for the parameter table).
ScenarioSpec default_scenario(ScenarioKind kind, std::uint64_t seed = 42);

/// Deterministic QPS trace for the archetype. Values are floored at 0.
TimeSeries generate(const ScenarioSpec& spec);

/// mt19937_64 with a fixed, library-independent mapping to doubles.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    /// Uniform in [0, 1) from the top 53 bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Integer uniform in [0, n).
    std::uint64_t below(std::uint64_t n);
    /// Box-Muller, cached second variate.
    double normal(double mean = 0.0, double sd = 1.0);

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

} // namespace ahpa

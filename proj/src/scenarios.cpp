#include "ahpa/scenarios.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace ahpa {

std::string_view to_string(ScenarioKind kind)
{
    switch (kind) {
    case ScenarioKind::NP: return "NP";
    case ScenarioKind::WP: return "WP";
    case ScenarioKind::SP: return "SP";
    case ScenarioKind::Noisy: return "NOISY";
    case ScenarioKind::Missing: return "MISSING";
    case ScenarioKind::TrendChange: return "TREND_CHANGE";
    }
    return "SP";
}

ScenarioKind parse_scenario_kind(std::string_view text)
{
    std::string key(text);
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    for (auto k : {ScenarioKind::NP, ScenarioKind::WP, ScenarioKind::SP, ScenarioKind::Noisy, ScenarioKind::Missing,
                   ScenarioKind::TrendChange}) {
        if (key == to_string(k)) return k;
    }
    if (key == "NOISYDATA") return ScenarioKind::Noisy;
    if (key == "MISSINGDATA") return ScenarioKind::Missing;
    if (key == "TRENDCHANGE") return ScenarioKind::TrendChange;
    throw EngineError(ErrorKind::InvalidConfig, "unknown scenario kind '" + std::string(text) + "'");
}

double Rng::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t n)
{
    // Rejection sampling keeps the draw unbiased.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
}

double Rng::normal(double mean, double sd)
{
    if (spare_) {
        const double z = *spare_;
        spare_.reset();
        return mean + sd * z;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    return mean + sd * r * std::cos(theta);
}

ScenarioSpec default_scenario(ScenarioKind kind, std::uint64_t seed)
{
    ScenarioSpec s;
    s.kind = kind;
    s.seed = seed;
    if (kind == ScenarioKind::WP) s.noise_sigma = 4.0;
    return s;
}

namespace {

bool periodic_kind(ScenarioKind k)
{
    return k != ScenarioKind::NP;
}

} // namespace

TimeSeries generate(const ScenarioSpec& spec)
{
    const std::size_t n = spec.length_minutes;
    const std::size_t p = spec.period_minutes;
    if (n == 0) throw EngineError(ErrorKind::InvalidConfig, "scenario length must be positive");
    if (periodic_kind(spec.kind) && (p < 2 || n < 2 * p)) {
        throw EngineError(ErrorKind::InvalidConfig, "scenario length must cover at least two periods");
    }
    if (spec.noise_sigma < 0.0 || spec.amplitude < 0.0) {
        throw EngineError(ErrorKind::InvalidConfig, "noise and amplitude must be non-negative");
    }
    if (spec.kind == ScenarioKind::Missing && n < 1440) {
        throw EngineError(ErrorKind::InvalidConfig, "MISSING needs at least one full day");
    }

    Rng rng(spec.seed);
    std::vector<double> y(n);

    if (spec.kind == ScenarioKind::NP) {
        if (!(std::abs(spec.ar_phi) < 1.0)) throw EngineError(ErrorKind::InvalidConfig, "AR coefficient must be in (-1, 1)");
        double x = rng.normal(0.0, spec.ar_sigma / std::sqrt(1.0 - spec.ar_phi * spec.ar_phi));
        for (std::size_t t = 0; t < n; ++t) {
            y[t] = spec.base_level + x;
            x = spec.ar_phi * x + rng.normal(0.0, spec.ar_sigma);
        }
    } else {
        const std::size_t cycles = (n + p - 1) / p;
        std::vector<double> factor(cycles, 1.0);
        if (spec.kind == ScenarioKind::WP) {
            for (auto& f : factor) f = rng.uniform(1.0 - spec.amplitude_jitter, 1.0 + spec.amplitude_jitter);
        }
        const double w = 2.0 * std::numbers::pi / static_cast<double>(p);
        for (std::size_t t = 0; t < n; ++t) {
            // Trough at the start of each cycle, peak half a cycle later.
            const double shape = -std::cos(w * static_cast<double>(t % p));
            y[t] = spec.base_level + spec.amplitude * factor[t / p] * shape + rng.normal(0.0, spec.noise_sigma);
        }
    }

    std::vector<std::optional<double>> values(n);
    if (spec.kind == ScenarioKind::Noisy) {
        for (std::size_t i = 0; i < spec.outlier_count; ++i) {
            y[rng.below(n)] += spec.outlier_magnitude;
        }
    }
    if (spec.kind == ScenarioKind::TrendChange) {
        const std::size_t lo = n / 2;
        const std::size_t hi = 3 * n / 4;
        const std::size_t at = spec.trend_break.value_or(lo + rng.below(hi - lo + 1));
        if (at >= n) throw EngineError(ErrorKind::InvalidConfig, "trend break beyond the trace");
        for (std::size_t t = at; t < n; ++t) {
            y[t] += spec.trend_slope_per_day * static_cast<double>(t - at) / 1440.0;
        }
    }
    for (std::size_t t = 0; t < n; ++t) values[t] = std::max(0.0, y[t]);

    if (spec.kind == ScenarioKind::Missing) {
        const std::size_t days = n / 1440;
        const std::size_t day = spec.missing_day.value_or(rng.below(days));
        if (day >= days) throw EngineError(ErrorKind::InvalidConfig, "missing day beyond the trace");
        for (std::size_t t = day * 1440; t < (day + 1) * 1440; ++t) values[t].reset();
    }
    return TimeSeries(spec.start, Minutes{1}, std::move(values), MetricKind::Qps);
}

} // namespace ahpa

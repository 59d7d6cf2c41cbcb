#pragma once

#include "ahpa/core.hpp"
#include "ahpa/decompose.hpp"

#include <functional>
#include <span>
#include <vector>

namespace ahpa {

struct ForecastStep {
    double seasonal_sum = 0.0;
    double trend = 0.0;
    double residual_margin = 0.0;
};

/// point[h] = seasonal_sum[h] + trend[h]; upper[h] = point[h] + residual_margin[h].
struct Forecast {
    TimePoint start{};          // time of the first forecast step
    Minutes step{1};
    std::size_t horizon = 0;
    double quantile = 0.95;
    std::vector<double> point;
    std::vector<double> upper;
    std::vector<ForecastStep> components;

    TimePoint time_at(std::size_t h) const { return start + step * static_cast<std::int64_t>(h); }
};

/// Maps a residual history to a per-step non-negative margin.
using MarginFunction = std::function<std::vector<double>(std::span<const double>, double quantile, std::size_t horizon)>;

struct ForecastOptions {
    double alpha = 0.3;
    double beta = 0.1;
    double quantile = 0.95;
    /// Floor point and upper at zero (QPS and percentage metrics).
    bool clamp_non_negative = false;
    /// Holt is fitted on trend[0, N - trend_edge_trim) and run trim steps further,
    /// skipping the edge samples whose smoothing windows were truncated.
    std::size_t trend_edge_trim = 0;
    /// Replaces the empirical-quantile margin when set.
    MarginFunction margin;
};

/// Holt's linear exponential smoothing; returns level + h*slope for h = 1..horizon.
std::vector<double> forecast_trend(std::span<const double> trend, std::size_t horizon, double alpha, double beta);

/// Each seasonal component repeats its last full cycle.
std::vector<double> shift_seasonal(const std::vector<std::vector<double>>& seasonals,
                                   std::span<const std::size_t> periods, std::size_t horizon);

/// Constant margin: nearest-rank quantile of the residuals, floored at 0.
std::vector<double> residual_margin(std::span<const double> residual, double quantile, std::size_t horizon);

Forecast compose_forecast(const Decomposition& decomposition, std::size_t horizon,
                          const ForecastOptions& options = {});

} // namespace ahpa

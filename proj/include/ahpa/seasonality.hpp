#pragma once

#include "ahpa/core.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace ahpa {

struct PeriodReport {
    std::vector<std::size_t> periods;  // strongest first
    std::vector<double> strengths;     // parallel to periods, each in [0, 1]
    bool is_periodic = false;

    /// Strength of the strongest period, 0 when aperiodic.
    double top_strength() const { return strengths.empty() ? 0.0 : strengths.front(); }

    friend bool operator==(const PeriodReport&, const PeriodReport&) = default;
};

struct DetectOptions {
    std::size_t max_periods = 2;
    double strength_threshold = 0.5;
    /// Periodogram peaks must exceed this multiple of the median power.
    double noise_floor_factor = 3.0;
    /// Minimum autocorrelation at the refined lag.
    double min_autocorrelation = 0.2;
    std::size_t max_candidates = 8;
    /// Throw INSUFFICIENT_DATA instead of reporting an aperiodic series.
    bool require_periodic = false;
};

/// Robust period detector: Huber-clipped, median-filtered, detrended series;
/// periodogram peaks above the noise floor refined and validated by the
/// autocorrelation, then scored by a trial seasonal fit.
PeriodReport detect_periods(std::span<const double> values, const DetectOptions& options = {});
PeriodReport detect_periods(const TimeSeries& series, const DetectOptions& options = {});

/// Seasonality strength 1 - var(R)/var(S+R) of a single-period trial fit, clamped to [0, 1].
double seasonality_strength(std::span<const double> values, std::size_t period);

/// Periodogram |X_k|^2 for k = 0..n/2 of the mean-removed values.
std::vector<double> periodogram(std::span<const double> values);

/// Sample autocorrelation for lags 0..n-1 (biased estimator, acf[0] == 1).
std::vector<double> autocorrelation(std::span<const double> values);

} // namespace ahpa

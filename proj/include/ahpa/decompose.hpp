#pragma once

#include "ahpa/core.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace ahpa {

/// y[t] = trend[t] + sum_i seasonals[i][t] + residual[t], with the residual
/// stored as the exact remainder.
struct Decomposition {
    std::vector<double> trend;
    std::vector<std::vector<double>> seasonals;
    std::vector<double> residual;
    std::vector<std::size_t> periods;

    std::size_t size() const { return trend.size(); }
    bool periodic() const { return !seasonals.empty(); }
};

struct DecomposeOptions {
    std::size_t iterations = 3;
    /// Phases on either side pooled into each per-phase median (0 = exact phase only).
    std::size_t phase_neighborhood = 0;
};

/// Robust multi-period decomposition: moving-median trend over the longest
/// period, per-phase medians for each seasonal component (longest period first).
Decomposition decompose_periodic(std::span<const double> values, std::vector<std::size_t> periods,
                                 const DecomposeOptions& options = {});
Decomposition decompose_periodic(const TimeSeries& series, std::vector<std::size_t> periods,
                                 const DecomposeOptions& options = {});

/// Moving-median trend with window max(5, ceil(N/20)); samples far off a first pass are bridged first.
Decomposition decompose_trend_only(std::span<const double> values);
Decomposition decompose_trend_only(const TimeSeries& series);

/// Per-phase median of `values` for the given period, centered to zero mean over one cycle.
/// `neighborhood` pools the adjacent phases (cyclically) into each median.
std::vector<double> phase_profile(std::span<const double> values, std::size_t period, std::size_t neighborhood = 0);

} // namespace ahpa

#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Small robust-statistics kernels shared by the pipeline stages.
namespace ahpa::numeric {

/// Median; the mean of the two middle values for even sizes. Empty input yields 0.
double median(std::span<const double> values);

/// Median absolute deviation about the median (unscaled).
double mad(std::span<const double> values);

double mean(std::span<const double> values);
double variance(std::span<const double> values);

/// Nearest-rank empirical quantile: the ceil(q*n)-th order statistic.
double nearest_rank_quantile(std::span<const double> values, double q);

/// Centered moving median. Windows shrink toward the edges instead of padding.
/// `window` is forced odd (even values are incremented).
std::vector<double> moving_median(std::span<const double> values, std::size_t window);

/// Least-squares line removed from the values.
std::vector<double> detrend_linear(std::span<const double> values);

inline std::size_t odd_window(std::size_t w) { return w % 2 == 0 ? w + 1 : w; }

} // namespace ahpa::numeric

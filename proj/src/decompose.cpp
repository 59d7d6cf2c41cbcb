#include "ahpa/decompose.hpp"

#include "ahpa/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace ahpa {

namespace {
constexpr double kTrendOutlierZ = 5.0;
}

std::vector<double> phase_profile(std::span<const double> values, std::size_t period, std::size_t neighborhood)
{
    std::vector<double> profile(period, 0.0);
    const std::size_t reach = std::min(neighborhood, (period - 1) / 2);
    std::vector<double> bucket;
    bucket.reserve((values.size() / period + 1) * (2 * reach + 1));
    for (std::size_t phase = 0; phase < period; ++phase) {
        bucket.clear();
        for (std::size_t k = 0; k <= 2 * reach; ++k) {
            const std::size_t ph = (phase + period + k - reach) % period;
            for (std::size_t t = ph; t < values.size(); t += period) bucket.push_back(values[t]);
        }
        profile[phase] = numeric::median(bucket);
    }
    const double centre = numeric::mean(profile);
    for (double& v : profile) v -= centre;
    return profile;
}

Decomposition decompose_periodic(std::span<const double> values, std::vector<std::size_t> periods,
                                 const DecomposeOptions& options)
{
    const std::size_t n = values.size();
    if (periods.empty()) {
        throw EngineError(ErrorKind::InvalidConfig, "decompose_periodic needs at least one period");
    }
    for (std::size_t p : periods) {
        if (p < 2 || 2 * p > n) {
            throw EngineError(ErrorKind::InsufficientData,
                              "period " + std::to_string(p) + " lacks two full cycles in " + std::to_string(n) +
                                  " samples");
        }
    }
    std::sort(periods.begin(), periods.end(), std::greater<>());
    periods.erase(std::unique(periods.begin(), periods.end()), periods.end());

    Decomposition d;
    d.periods = periods;
    d.seasonals.assign(periods.size(), std::vector<double>(n, 0.0));
    d.residual.assign(n, 0.0);

    const std::size_t window = numeric::odd_window(periods.front());
    std::vector<double> work(n);
    for (std::size_t iter = 0; iter < std::max<std::size_t>(1, options.iterations); ++iter) {
        for (std::size_t t = 0; t < n; ++t) {
            double s = 0.0;
            for (const auto& comp : d.seasonals) s += comp[t];
            work[t] = values[t] - s;
        }
        d.trend = numeric::moving_median(work, window);

        for (std::size_t t = 0; t < n; ++t) work[t] = values[t] - d.trend[t];
        for (std::size_t i = 0; i < periods.size(); ++i) {
            const auto profile = phase_profile(work, periods[i], options.phase_neighborhood);
            auto& comp = d.seasonals[i];
            for (std::size_t t = 0; t < n; ++t) {
                comp[t] = profile[t % periods[i]];
                work[t] -= comp[t];
            }
        }
    }
    for (std::size_t t = 0; t < n; ++t) {
        double s = 0.0;
        for (const auto& comp : d.seasonals) s += comp[t];
        d.residual[t] = values[t] - d.trend[t] - s;
    }
    return d;
}

Decomposition decompose_periodic(const TimeSeries& series, std::vector<std::size_t> periods,
                                 const DecomposeOptions& options)
{
    const auto values = series.dense();
    return decompose_periodic(values, std::move(periods), options);
}

Decomposition decompose_trend_only(std::span<const double> values)
{
    const std::size_t n = values.size();
    if (n < 5) {
        throw EngineError(ErrorKind::InsufficientData, "trend-only decomposition needs at least 5 samples");
    }
    const std::size_t window = numeric::odd_window(std::max<std::size_t>(5, (n + 19) / 20));
    const std::size_t half = window / 2;
    const auto first = numeric::moving_median(values, window);

    // Gross outliers against the first pass are bridged before the final median.
    std::vector<double> dev;
    for (std::size_t t = half; t + half < n; ++t) dev.push_back(std::abs(values[t] - first[t]));
    double scale = 1.4826 * numeric::median(dev);
    if (scale == 0.0 && !dev.empty()) scale = numeric::mean(dev);
    std::vector<bool> flagged(n, false);
    bool any = false;
    if (scale > 0.0) {
        for (std::size_t t = half; t + half < n; ++t) {
            if (std::abs(values[t] - first[t]) > kTrendOutlierZ * scale) flagged[t] = any = true;
        }
    }

    Decomposition d;
    if (!any) {
        d.trend = first;
    } else {
        std::vector<double> clean(values.begin(), values.end());
        for (std::size_t t = 0; t < n; ++t) {
            if (!flagged[t]) continue;
            std::size_t lo = t, hi = t;
            while (lo > 0 && flagged[lo]) --lo;
            while (hi + 1 < n && flagged[hi]) ++hi;
            const double a = values[lo], b = values[hi];
            clean[t] = a + (b - a) * double(t - lo) / double(hi - lo);
        }
        d.trend = numeric::moving_median(clean, window);
    }
    d.residual.resize(n);
    for (std::size_t t = 0; t < n; ++t) d.residual[t] = values[t] - d.trend[t];
    return d;
}

Decomposition decompose_trend_only(const TimeSeries& series)
{
    const auto values = series.dense();
    return decompose_trend_only(values);
}

} // namespace ahpa

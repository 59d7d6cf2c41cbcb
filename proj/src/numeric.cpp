#include "ahpa/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ahpa::numeric {

double median(std::span<const double> values)
{
    if (values.empty()) return 0.0;
    std::vector<double> work(values.begin(), values.end());
    const std::size_t mid = work.size() / 2;
    std::nth_element(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(mid), work.end());
    const double upper = work[mid];
    if (work.size() % 2 == 1) return upper;
    const double lower = *std::max_element(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

double mad(std::span<const double> values)
{
    const double med = median(values);
    std::vector<double> dev;
    dev.reserve(values.size());
    for (double v : values) dev.push_back(std::abs(v - med));
    return median(dev);
}

double mean(std::span<const double> values)
{
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double variance(std::span<const double> values)
{
    if (values.size() < 2) return 0.0;
    const double m = mean(values);
    double acc = 0.0;
    for (double v : values) acc += (v - m) * (v - m);
    return acc / static_cast<double>(values.size());
}

double nearest_rank_quantile(std::span<const double> values, double q)
{
    if (values.empty()) return 0.0;
    std::vector<double> work(values.begin(), values.end());
    const double n = static_cast<double>(work.size());
    // Guard against q*n landing a hair above an integer (0.95 * 100 and friends).
    auto rank = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, work.size());
    std::nth_element(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(rank - 1), work.end());
    return work[rank - 1];
}

std::vector<double> moving_median(std::span<const double> values, std::size_t window)
{
    const std::size_t n = values.size();
    std::vector<double> out(n, 0.0);
    if (n == 0) return out;
    const std::size_t half = odd_window(std::max<std::size_t>(window, 1)) / 2;

    // Sorted window maintained incrementally; insert/erase are memmoves over at most `window` doubles.
    std::vector<double> sorted;
    sorted.reserve(2 * half + 2);
    auto insert = [&](double v) { sorted.insert(std::upper_bound(sorted.begin(), sorted.end(), v), v); };
    auto erase = [&](double v) { sorted.erase(std::lower_bound(sorted.begin(), sorted.end(), v)); };

    for (std::size_t i = 0; i <= std::min(half, n - 1); ++i) insert(values[i]);
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0) {
            if (t + half < n) insert(values[t + half]);
            if (t > half) erase(values[t - half - 1]);
        }
        const std::size_t m = sorted.size();
        out[t] = (m % 2 == 1) ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    }
    return out;
}

std::vector<double> detrend_linear(std::span<const double> values)
{
    const std::size_t n = values.size();
    std::vector<double> out(values.begin(), values.end());
    if (n < 2) {
        std::fill(out.begin(), out.end(), 0.0);
        return out;
    }
    const double tbar = 0.5 * static_cast<double>(n - 1);
    const double ybar = mean(values);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double dt = static_cast<double>(t) - tbar;
        sxy += dt * (values[t] - ybar);
        sxx += dt * dt;
    }
    const double slope = sxy / sxx;
    for (std::size_t t = 0; t < n; ++t) {
        out[t] = values[t] - (ybar + slope * (static_cast<double>(t) - tbar));
    }
    return out;
}

} // namespace ahpa::numeric

#include "ahpa/seasonality.hpp"

#include "ahpa/decompose.hpp"
#include "ahpa/numeric.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>

namespace ahpa {

namespace {

// FFTW's planner is not re-entrant; plan creation and destruction are serialized.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

struct FftwDeleter {
    void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwDeleter>;

template <typename T>
FftwBuffer<T> fftw_buffer(std::size_t n)
{
    return FftwBuffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1))));
}

class Plan {
public:
    explicit Plan(fftw_plan p) : plan_(p) {}
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;
    ~Plan()
    {
        std::scoped_lock lock(planner_mutex());
        fftw_destroy_plan(plan_);
    }
    void execute() const { fftw_execute(plan_); }

private:
    fftw_plan plan_;
};

/// |FFT|^2 of `values` zero-padded to `padded` samples, bins 0..padded/2.
std::vector<double> power_spectrum(std::span<const double> values, std::size_t padded)
{
    const std::size_t bins = padded / 2 + 1;
    auto in = fftw_buffer<double>(padded);
    auto out = fftw_buffer<fftw_complex>(bins);
    std::unique_ptr<Plan> plan;
    {
        std::scoped_lock lock(planner_mutex());
        plan = std::make_unique<Plan>(
            fftw_plan_dft_r2c_1d(static_cast<int>(padded), in.get(), out.get(), FFTW_ESTIMATE));
    }
    std::fill(in.get(), in.get() + padded, 0.0);
    std::copy(values.begin(), values.end(), in.get());
    plan->execute();
    std::vector<double> power(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        power[k] = out[k][0] * out[k][0] + out[k][1] * out[k][1];
    }
    return power;
}

std::vector<double> centred(std::span<const double> values)
{
    const double m = numeric::mean(values);
    std::vector<double> out(values.begin(), values.end());
    for (double& v : out) v -= m;
    return out;
}

/// Clip at median +/- 5 * 1.4826 * MAD, median-filter (width 3), remove the linear trend.
std::vector<double> preprocess(std::span<const double> values)
{
    const double med = numeric::median(values);
    const double limit = 5.0 * 1.4826 * numeric::mad(values);
    std::vector<double> clipped(values.begin(), values.end());
    if (limit > 0.0) {
        for (double& v : clipped) v = std::clamp(v, med - limit, med + limit);
    }
    const auto filtered = numeric::moving_median(clipped, 3);
    return numeric::detrend_linear(filtered);
}

struct Candidate {
    std::size_t bin = 0;
    double power = 0.0;
    std::size_t lag = 0;
    double strength = 0.0;
    double full_strength = 0.0;  // on the input itself, for the multiple-of check
};

/// Lag maximizing the autocorrelation carried by the spectral band around `bin`.
std::size_t refine_lag(const std::vector<double>& power, std::size_t n, std::size_t bin)
{
    const double nd = static_cast<double>(n);
    const auto lo = static_cast<std::size_t>(std::floor(nd / (static_cast<double>(bin) + 1.0)));
    const auto hi = static_cast<std::size_t>(std::ceil(nd / (static_cast<double>(bin) - 1.0 + 1e-12)));
    const std::size_t first = std::max<std::size_t>(2, lo);
    const std::size_t last = std::min(n / 2, hi);
    const std::size_t band_lo = bin > 2 ? bin - 2 : 1;
    const std::size_t band_hi = std::min(power.size() - 1, bin + 2);

    std::size_t best = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(nd / static_cast<double>(bin))),
                                               first, std::max(first, last));
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t lag = first; lag <= last; ++lag) {
        double acc = 0.0;
        for (std::size_t j = band_lo; j <= band_hi; ++j) {
            acc += power[j] * std::cos(2.0 * std::numbers::pi * static_cast<double>(j * lag % n) / nd);
        }
        if (acc > best_value) {
            best_value = acc;
            best = lag;
        }
    }
    return best;
}

bool near(std::size_t a, std::size_t b, std::size_t tol)
{
    return (a > b ? a - b : b - a) <= tol;
}

} // namespace

std::vector<double> periodogram(std::span<const double> values)
{
    const auto x = centred(values);
    auto power = power_spectrum(x, x.size());
    const double n = static_cast<double>(x.size());
    for (double& p : power) p /= n;
    return power;
}

std::vector<double> autocorrelation(std::span<const double> values)
{
    const std::size_t n = values.size();
    std::vector<double> acf(n, 0.0);
    if (n == 0) return acf;
    const auto x = centred(values);
    const double var0 = std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
    if (var0 <= 0.0) {
        acf[0] = 1.0;
        return acf;
    }
    // Wiener-Khinchin on a 2n zero-padded buffer gives the linear (not circular) correlation.
    const std::size_t padded = 2 * n;
    const std::size_t bins = padded / 2 + 1;
    auto spec = power_spectrum(x, padded);
    auto freq = fftw_buffer<fftw_complex>(bins);
    auto back = fftw_buffer<double>(padded);
    std::unique_ptr<Plan> plan;
    {
        std::scoped_lock lock(planner_mutex());
        plan = std::make_unique<Plan>(
            fftw_plan_dft_c2r_1d(static_cast<int>(padded), freq.get(), back.get(), FFTW_ESTIMATE));
    }
    for (std::size_t k = 0; k < bins; ++k) {
        freq[k][0] = spec[k];
        freq[k][1] = 0.0;
    }
    plan->execute();
    const double norm = back[0];
    for (std::size_t lag = 0; lag < n; ++lag) acf[lag] = back[lag] / norm;
    return acf;
}

double seasonality_strength(std::span<const double> values, std::size_t period)
{
    const auto d = decompose_periodic(values, {period});
    std::vector<double> seasonal_plus_residual(values.size());
    for (std::size_t t = 0; t < values.size(); ++t) {
        seasonal_plus_residual[t] = d.seasonals.front()[t] + d.residual[t];
    }
    const double denom = numeric::variance(seasonal_plus_residual);
    if (denom <= 0.0) return 0.0;
    return std::clamp(1.0 - numeric::variance(d.residual) / denom, 0.0, 1.0);
}

PeriodReport detect_periods(std::span<const double> values, const DetectOptions& options)
{
    const std::size_t n = values.size();
    if (n < 8) {
        throw EngineError(ErrorKind::InsufficientData, "period detection needs at least 8 samples");
    }
    PeriodReport report;

    const auto x = preprocess(values);
    {
        const double med = numeric::median(values);
        double spread = 0.0;
        for (double v : values) spread = std::max(spread, std::abs(v - med));
        const double sd = std::sqrt(numeric::variance(x));
        if (sd <= 1e-9 * (std::abs(med) + spread)) {
            if (options.require_periodic) {
                throw EngineError(ErrorKind::InsufficientData, "series has no variance to carry a period");
            }
            return report;
        }
    }

    const auto power = periodogram(x);
    std::vector<double> body(power.begin() + 1, power.end());
    const double floor = numeric::median(body);

    std::vector<Candidate> candidates;
    for (std::size_t k = 2; k < power.size(); ++k) {
        const bool left = power[k] > power[k - 1];
        const bool right = k + 1 >= power.size() || power[k] >= power[k + 1];
        if (left && right && power[k] > options.noise_floor_factor * floor) {
            candidates.push_back({k, power[k], 0, 0.0});
        }
    }
    // Strongest first; near-equal powers prefer the smaller period (higher bin).
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        const double scale = std::max(a.power, b.power);
        if (std::abs(a.power - b.power) > 1e-9 * scale) return a.power > b.power;
        return a.bin > b.bin;
    });
    if (candidates.size() > options.max_candidates) candidates.resize(options.max_candidates);

    // Later candidates are judged on what the accepted periods leave unexplained.
    std::vector<double> remainder = x;
    auto acf = autocorrelation(remainder);
    std::vector<Candidate> accepted;
    for (auto& c : candidates) {
        c.lag = refine_lag(power, n, c.bin);
        if (c.lag < 2 || 2 * c.lag > n) continue;
        const bool duplicate = std::any_of(accepted.begin(), accepted.end(),
                                           [&](const Candidate& a) { return near(a.lag, c.lag, 2); });
        if (duplicate) continue;
        if (acf[c.lag] < options.min_autocorrelation) continue;
        c.strength = seasonality_strength(remainder, c.lag);
        if (c.strength < options.strength_threshold) continue;
        c.full_strength = accepted.empty() ? c.strength : seasonality_strength(x, c.lag);
        accepted.push_back(c);
        const auto fit = decompose_periodic(remainder, {c.lag});
        for (std::size_t t = 0; t < n; ++t) remainder[t] -= fit.seasonals.front()[t];
        acf = autocorrelation(remainder);
    }

    // Drop a longer period that is (close to) an integer multiple of a shorter
    // one unless it explains strictly more variance.
    std::vector<Candidate> kept;
    for (const auto& c : accepted) {
        bool redundant = false;
        for (const auto& other : accepted) {
            if (other.lag >= c.lag) continue;
            const std::size_t k = (c.lag + other.lag / 2) / other.lag;
            if (k >= 2 && near(c.lag, k * other.lag, 2) && c.full_strength <= other.full_strength) {
                redundant = true;
                break;
            }
        }
        if (!redundant) kept.push_back(c);
    }
    std::stable_sort(kept.begin(), kept.end(), [](const Candidate& a, const Candidate& b) {
        if (a.strength != b.strength) return a.strength > b.strength;
        return a.lag < b.lag;
    });
    if (kept.size() > options.max_periods) kept.resize(options.max_periods);

    for (const auto& c : kept) {
        report.periods.push_back(c.lag);
        report.strengths.push_back(c.strength);
    }
    report.is_periodic = !report.periods.empty();
    if (!report.is_periodic && options.require_periodic) {
        throw EngineError(ErrorKind::InsufficientData, "no period with two full cycles passed validation");
    }
    return report;
}

PeriodReport detect_periods(const TimeSeries& series, const DetectOptions& options)
{
    const auto values = series.dense();
    return detect_periods(values, options);
}

} // namespace ahpa

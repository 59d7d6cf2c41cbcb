#include "ahpa/pipeline.hpp"

#include "ahpa/numeric.hpp"

namespace ahpa {

namespace {

void fill_gaps_seasonally(std::vector<double>& values, const TimeSeries& original, std::size_t period)
{
    const std::size_t n = values.size();
    std::vector<bool> known(n);
    for (std::size_t t = 0; t < n; ++t) known[t] = original[t].has_value();
    for (std::size_t t = period; t < n; ++t) {
        if (!known[t] && known[t - period]) {
            values[t] = values[t - period];
            known[t] = true;
        }
    }
    for (std::size_t t = n - period; t-- > 0;) {
        if (!known[t] && known[t + period]) {
            values[t] = values[t + period];
            known[t] = true;
        }
    }
}

void reanchor_trend(Forecast& f, const std::vector<double>& values, const Decomposition& d, std::size_t window,
                    bool clamp)
{
    const std::size_t n = values.size();
    window = std::min(window, n);
    std::vector<double> recent;
    recent.reserve(window);
    for (std::size_t t = n - window; t < n; ++t) {
        double s = 0.0;
        for (const auto& comp : d.seasonals) s += comp[t];
        recent.push_back(values[t] - s);
    }
    // The median sits at the middle of the window, (window + 1) / 2 steps before the first forecast.
    const double level = numeric::median(recent);
    const double slope = f.horizon >= 2 ? f.components[1].trend - f.components[0].trend : 0.0;
    const double age = 0.5 * static_cast<double>(window + 1);
    for (std::size_t h = 0; h < f.horizon; ++h) {
        auto& c = f.components[h];
        c.trend = level + slope * (age + static_cast<double>(h));
        f.point[h] = c.seasonal_sum + c.trend;
        if (clamp) f.point[h] = std::max(0.0, f.point[h]);
        f.upper[h] = f.point[h] + c.residual_margin;
    }
}

} // namespace

WindowForecast forecast_window(const TimeSeries& history, std::size_t horizon, const PipelineOptions& options)
{
    auto repaired = repair(history, options.repair);
    auto values = repaired.dense();
    auto periods = detect_periods(values, options.detect);
    if (options.seasonal_gap_fill && periods.is_periodic && !history.complete()) {
        // Straight-line fills blur the spectrum; detect again on the seasonal fill.
        fill_gaps_seasonally(values, history, periods.periods.front());
        periods = detect_periods(values, options.detect);
        if (periods.is_periodic) {
            values = repaired.dense();
            fill_gaps_seasonally(values, history, periods.periods.front());
        }
        repaired = TimeSeries::from_dense(repaired.start(), repaired.step(), values, repaired.metric());
    }
    auto decomposition = periods.is_periodic ? decompose_periodic(values, periods.periods, options.decompose)
                                             : decompose_trend_only(values);
    auto fo = options.forecast;
    if (is_non_negative(history.metric())) fo.clamp_non_negative = true;
    if (options.trim_trend_edge) {
        const std::size_t window = decomposition.periodic()
                                       ? decomposition.periods.front()
                                       : std::max<std::size_t>(5, (values.size() + 19) / 20);
        fo.trend_edge_trim = numeric::odd_window(window) / 2;
    }
    auto forecast = compose_forecast(decomposition, horizon, fo);
    if (options.recent_level_window > 0) {
        reanchor_trend(forecast, values, decomposition, options.recent_level_window, fo.clamp_non_negative);
    }
    forecast.start = history.time_at(history.size());
    forecast.step = history.step();
    return {std::move(repaired), std::move(periods), std::move(decomposition), std::move(forecast)};
}

ScalingPlan plan_window(const TimeSeries& history, std::size_t horizon, const PerfModel& model,
                        const AutoscalerSpec& spec, std::optional<int> fallback_signal,
                        const PipelineOptions& options, WindowForecast* detail)
{
    auto window = forecast_window(history, horizon, options);
    PlanOptions po;
    po.fallback_signal = fallback_signal;
    po.period_strength = window.periods.top_strength();
    auto result = plan(window.forecast, model, spec, po);
    if (detail) *detail = std::move(window);
    return result;
}

} // namespace ahpa

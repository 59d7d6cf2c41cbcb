#include "ahpa/forecast.hpp"

#include "ahpa/numeric.hpp"

#include <algorithm>
#include <string>

namespace ahpa {

std::vector<double> forecast_trend(std::span<const double> trend, std::size_t horizon, double alpha, double beta)
{
    if (trend.size() < 2) {
        throw EngineError(ErrorKind::InsufficientData, "trend forecasting needs at least 2 samples");
    }
    if (!(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < 1.0)) {
        throw EngineError(ErrorKind::InvalidConfig, "Holt smoothing parameters must lie in (0, 1)");
    }
    double level = trend[0];
    double slope = trend[1] - trend[0];
    for (std::size_t t = 1; t < trend.size(); ++t) {
        // Error-correction form: an exact line gives zero error and stays exact.
        const double predicted = level + slope;
        const double error = trend[t] - predicted;
        level = predicted + alpha * error;
        slope += alpha * beta * error;
    }
    std::vector<double> out(horizon);
    for (std::size_t h = 0; h < horizon; ++h) {
        out[h] = level + static_cast<double>(h + 1) * slope;
    }
    return out;
}

std::vector<double> shift_seasonal(const std::vector<std::vector<double>>& seasonals,
                                   std::span<const std::size_t> periods, std::size_t horizon)
{
    if (seasonals.size() != periods.size()) {
        throw EngineError(ErrorKind::InvalidConfig, "seasonal components and periods differ in count");
    }
    std::vector<double> out(horizon, 0.0);
    for (std::size_t i = 0; i < seasonals.size(); ++i) {
        const auto& comp = seasonals[i];
        const std::size_t p = periods[i];
        if (p == 0 || comp.size() < p) {
            throw EngineError(ErrorKind::InsufficientData, "seasonal component shorter than its period");
        }
        const std::size_t cycle_start = comp.size() - p;
        for (std::size_t h = 0; h < horizon; ++h) out[h] += comp[cycle_start + h % p];
    }
    return out;
}

std::vector<double> residual_margin(std::span<const double> residual, double quantile, std::size_t horizon)
{
    if (residual.size() < 20) {
        throw EngineError(ErrorKind::InsufficientData, "residual margin needs at least 20 samples");
    }
    if (!(quantile > 0.0 && quantile < 1.0)) {
        throw EngineError(ErrorKind::InvalidConfig, "quantile must lie in (0, 1)");
    }
    const double q = std::max(0.0, numeric::nearest_rank_quantile(residual, quantile));
    return std::vector<double>(horizon, q);
}

Forecast compose_forecast(const Decomposition& decomposition, std::size_t horizon, const ForecastOptions& options)
{
    if (horizon == 0) {
        throw EngineError(ErrorKind::InvalidConfig, "forecast horizon must be >= 1");
    }
    const auto seasonal = shift_seasonal(decomposition.seasonals, decomposition.periods, horizon);
    const std::size_t trim = std::min(options.trend_edge_trim, decomposition.trend.size() - std::min<std::size_t>(2, decomposition.trend.size()));
    auto trend = forecast_trend(std::span<const double>(decomposition.trend).first(decomposition.trend.size() - trim),
                                horizon + trim, options.alpha, options.beta);
    trend.erase(trend.begin(), trend.begin() + static_cast<std::ptrdiff_t>(trim));
    auto margin = options.margin ? options.margin(decomposition.residual, options.quantile, horizon)
                                 : residual_margin(decomposition.residual, options.quantile, horizon);
    if (margin.size() != horizon) {
        throw EngineError(ErrorKind::InvalidConfig, "margin function returned the wrong horizon");
    }

    Forecast f;
    f.horizon = horizon;
    f.quantile = options.quantile;
    f.point.resize(horizon);
    f.upper.resize(horizon);
    f.components.resize(horizon);
    for (std::size_t h = 0; h < horizon; ++h) {
        f.components[h] = {seasonal[h], trend[h], std::max(0.0, margin[h])};
        f.point[h] = seasonal[h] + trend[h];
        if (options.clamp_non_negative) f.point[h] = std::max(0.0, f.point[h]);
        f.upper[h] = f.point[h] + f.components[h].residual_margin;
    }
    return f;
}

} // namespace ahpa

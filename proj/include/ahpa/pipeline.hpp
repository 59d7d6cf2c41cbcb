#pragma once

#include "ahpa/decompose.hpp"
#include "ahpa/forecast.hpp"
#include "ahpa/ingest.hpp"
#include "ahpa/perfmodel.hpp"
#include "ahpa/planner.hpp"
#include "ahpa/seasonality.hpp"

namespace ahpa {

struct PipelineOptions {
    RepairOptions repair;
    DetectOptions detect;
    DecomposeOptions decompose{.iterations = 3, .phase_neighborhood = 5};
    ForecastOptions forecast;
    /// Refill originally-missing samples from one period earlier (later at the start)
    /// once a period is known, instead of the straight-line repair.
    bool seasonal_gap_fill = true;
    /// Fit the trend slope only where the smoothing window was complete.
    bool trim_trend_edge = true;
    /// Restart the trend forecast from the median deseasonalized level of the
    /// last `recent_level_window` samples (0 keeps the smoothed level).
    std::size_t recent_level_window = 60;
};

struct WindowForecast {
    TimeSeries repaired;
    PeriodReport periods;
    Decomposition decomposition;
    Forecast forecast;
};

/// repair -> detect_periods -> decompose -> compose_forecast on one history window.
/// The forecast starts one step after the last sample.
WindowForecast forecast_window(const TimeSeries& history, std::size_t horizon, const PipelineOptions& options = {});

/// forecast_window followed by plan().
ScalingPlan plan_window(const TimeSeries& history, std::size_t horizon, const PerfModel& model,
                        const AutoscalerSpec& spec, std::optional<int> fallback_signal,
                        const PipelineOptions& options = {}, WindowForecast* detail = nullptr);

} // namespace ahpa

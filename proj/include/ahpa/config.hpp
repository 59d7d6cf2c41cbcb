#pragma once

#include "ahpa/core.hpp"
#include "ahpa/perfmodel.hpp"
#include "ahpa/pipeline.hpp"
#include "ahpa/sim.hpp"

#include <filesystem>
#include <string>

namespace ahpa {

struct ForecastSettings {
    double alpha = 0.3;
    double beta = 0.1;
    double quantile = 0.95;
    friend bool operator==(const ForecastSettings&, const ForecastSettings&) = default;
};

struct DetectSettings {
    std::size_t max_periods = 2;
    double strength_threshold = 0.5;
    friend bool operator==(const DetectSettings&, const DetectSettings&) = default;
};

struct SimulationSettings {
    Minutes sync_period{1};
    Minutes stabilization_window{5};
    double hpa_tolerance = 0.1;
    Minutes train_window{7 * 24 * 60};
    Minutes replan_every{60};
    std::size_t phase_neighborhood = 5;
    Minutes retention{7 * 24 * 60};
    friend bool operator==(const SimulationSettings&, const SimulationSettings&) = default;
};

/// Everything a run needs besides its input trace.
struct EngineConfig {
    AutoscalerSpec spec;
    PerfModel model;
    RepairOptions repair;
    DetectSettings detect;
    ForecastSettings forecast;
    SimulationSettings simulation;

    PipelineOptions pipeline_options() const;
    SimOptions sim_options() const;

    friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

/// INI text with [autoscaler], [perf_model], [repair], [detect], [forecast], [simulation].
/// Unknown keys are rejected; missing keys keep their defaults.
EngineConfig parse_config(const std::string& text);
EngineConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const EngineConfig& config);

/// "90", "90m", "3h", "7d" -> minutes.
Minutes parse_duration(std::string_view text);
std::string format_duration(Minutes d);

} // namespace ahpa

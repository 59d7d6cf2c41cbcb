#pragma once

#include "ahpa/core.hpp"
#include "ahpa/forecast.hpp"
#include "ahpa/perfmodel.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace ahpa {

enum class ActionReason { Forecast, Cron, BoundClamp, DowngradeFallback };

std::string_view to_string(ActionReason reason);

struct ScalingAction {
    TimePoint issue_time{};
    int target_replicas = 1;
    ActionReason reason = ActionReason::Forecast;

    friend bool operator==(const ScalingAction&, const ScalingAction&) = default;
};

struct TimeRange {
    TimePoint start{};
    TimePoint end{};

    friend bool operator==(const TimeRange&, const TimeRange&) = default;
};

struct ScalingPlan {
    std::vector<ScalingAction> actions;
    ScaleStrategy mode = ScaleStrategy::Auto;
    bool execute = true;  // false in observer (dry-run) mode
    std::vector<TimeRange> infeasible_windows;
};

/// Uniform planning grid: `length` steps from `start`.
struct PlanGrid {
    TimePoint start{};
    Minutes step{1};
    std::size_t length = 0;

    TimePoint time_at(std::size_t i) const { return start + step * static_cast<std::int64_t>(i); }
    TimePoint end() const { return time_at(length); }
};

/// shifted[t] = max(required[t..t+p]); the tail uses the available suffix.
std::vector<int> shift_for_pending(std::span<const int> required, std::size_t pending_steps);

/// One candidate per consecutive window of `interval_steps`, issued at the window
/// start with the window maximum; repeats of the previous target are dropped.
std::vector<ScalingAction> merge_actions(std::span<const int> shifted, std::size_t interval_steps,
                                         TimePoint start = {}, Minutes step = Minutes{1});

/// Clamps targets to the replica bounds, applies cron overrides, and suppresses
/// actions outside the instance-bound windows.
ScalingPlan apply_bounds(const std::vector<ScalingAction>& actions, const AutoscalerSpec& spec, const PlanGrid& grid);

/// Replica count in force at grid step i (the last action issued at or before it).
std::vector<int> realized_targets(const std::vector<ScalingAction>& actions, const PlanGrid& grid, int initial);

struct PlanOptions {
    /// Reactive requirement observed at plan time.
    std::optional<int> fallback_signal;
    /// Strength of the strongest detected period (0 for aperiodic input).
    double period_strength = 1.0;
    bool downgrade_protection = true;
    double confidence_strength_threshold = 0.5;
    double confidence_margin_ratio = 0.5;
};

/// Full planning step: forecast upper bound -> pods -> pending shift -> merge -> bounds,
/// followed by downgrade protection.
ScalingPlan plan(const Forecast& forecast, const PerfModel& model, const AutoscalerSpec& spec,
                 const PlanOptions& options = {});

std::size_t steps_for(Minutes duration, Minutes step);

} // namespace ahpa

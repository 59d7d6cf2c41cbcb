#include "ahpa/planner.hpp"

#include "ahpa/numeric.hpp"

#include <algorithm>
#include <limits>

namespace ahpa {

std::string_view to_string(ActionReason reason)
{
    switch (reason) {
    case ActionReason::Forecast: return "FORECAST";
    case ActionReason::Cron: return "CRON";
    case ActionReason::BoundClamp: return "BOUND_CLAMP";
    case ActionReason::DowngradeFallback: return "DOWNGRADE_FALLBACK";
    }
    return "FORECAST";
}

std::size_t steps_for(Minutes duration, Minutes step)
{
    if (duration.count() <= 0) return 0;
    return static_cast<std::size_t>((duration.count() + step.count() - 1) / step.count());
}

std::vector<int> shift_for_pending(std::span<const int> required, std::size_t pending_steps)
{
    const std::size_t n = required.size();
    std::vector<int> shifted(n);
    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t last = std::min(n - 1, t + pending_steps);
        shifted[t] = *std::max_element(required.begin() + static_cast<std::ptrdiff_t>(t),
                                       required.begin() + static_cast<std::ptrdiff_t>(last) + 1);
    }
    return shifted;
}

std::vector<ScalingAction> merge_actions(std::span<const int> shifted, std::size_t interval_steps, TimePoint start,
                                         Minutes step)
{
    const std::size_t w = std::max<std::size_t>(1, interval_steps);
    std::vector<ScalingAction> actions;
    for (std::size_t begin = 0; begin < shifted.size(); begin += w) {
        const std::size_t end = std::min(shifted.size(), begin + w);
        const int target = *std::max_element(shifted.begin() + static_cast<std::ptrdiff_t>(begin),
                                             shifted.begin() + static_cast<std::ptrdiff_t>(end));
        if (!actions.empty() && actions.back().target_replicas == target) continue;
        actions.push_back({start + step * static_cast<std::int64_t>(begin), target, ActionReason::Forecast});
    }
    return actions;
}

std::vector<int> realized_targets(const std::vector<ScalingAction>& actions, const PlanGrid& grid, int initial)
{
    std::vector<int> out(grid.length, initial);
    std::size_t next = 0;
    int current = initial;
    for (std::size_t i = 0; i < grid.length; ++i) {
        const auto t = grid.time_at(i);
        while (next < actions.size() && actions[next].issue_time <= t) {
            current = actions[next].target_replicas;
            ++next;
        }
        out[i] = current;
    }
    return out;
}

namespace {

struct StepBounds {
    int lo = 1;
    int hi = 1;
    bool cron = false;
};

StepBounds bounds_at(const AutoscalerSpec& spec, TimePoint t)
{
    StepBounds b{spec.min_replicas, spec.max_replicas, false};
    for (const auto& rule : spec.cron_rules) {
        if (!rule.active_at(t)) continue;
        b.lo = std::max(b.lo, rule.forced_min);
        b.hi = std::min(b.hi, rule.forced_max);
        b.cron = true;
    }
    if (b.lo > b.hi) {
        throw EngineError(ErrorKind::InvalidConfig,
                          "cron overrides contradict at " + format_rfc3339(t) + ": forced_min > forced_max");
    }
    return b;
}

bool inside_instance_bounds(const AutoscalerSpec& spec, TimePoint t)
{
    if (spec.instance_bounds.empty()) return true;
    return std::any_of(spec.instance_bounds.begin(), spec.instance_bounds.end(),
                       [&](const InstanceBound& b) { return b.contains(t); });
}

std::size_t interval_steps(const AutoscalerSpec& spec, Minutes step)
{
    return std::max<std::size_t>(1, steps_for(spec.action_interval, step));
}

} // namespace

ScalingPlan apply_bounds(const std::vector<ScalingAction>& actions, const AutoscalerSpec& spec, const PlanGrid& grid)
{
    ScalingPlan plan;
    plan.mode = spec.scale_strategy;
    plan.execute = spec.scale_strategy == ScaleStrategy::Auto;
    if (actions.empty() || grid.length == 0) return plan;

    const auto raw = realized_targets(actions, grid, actions.front().target_replicas);
    std::vector<int> clamped(grid.length);
    std::vector<ActionReason> reasons(grid.length, ActionReason::Forecast);
    std::vector<int> ceilings(grid.length);
    std::vector<bool> infeasible(grid.length, false);
    for (std::size_t i = 0; i < grid.length; ++i) {
        const auto b = bounds_at(spec, grid.time_at(i));
        ceilings[i] = b.hi;
        clamped[i] = std::clamp(raw[i], b.lo, b.hi);
        infeasible[i] = raw[i] > b.hi;
        if (clamped[i] != raw[i]) {
            const bool base_limit = raw[i] > spec.max_replicas || raw[i] < spec.min_replicas;
            reasons[i] = (b.cron && !base_limit) ? ActionReason::Cron : ActionReason::BoundClamp;
        }
    }

    // Re-merge on the action-interval grid so cron edges keep the spacing invariant.
    const std::size_t w = interval_steps(spec, grid.step);
    for (std::size_t begin = 0; begin < grid.length; begin += w) {
        const std::size_t end = std::min(grid.length, begin + w);
        std::size_t arg = begin;
        for (std::size_t i = begin; i < end; ++i) {
            if (clamped[i] > clamped[arg]) arg = i;
        }
        const int ceiling = *std::min_element(ceilings.begin() + static_cast<std::ptrdiff_t>(begin),
                                              ceilings.begin() + static_cast<std::ptrdiff_t>(end));
        int target = clamped[arg];
        ActionReason reason = reasons[arg];
        if (target > ceiling) {
            target = ceiling;
            reason = ActionReason::Cron;
        }
        // The original plan may carry a non-forecast tag at this step.
        for (const auto& a : actions) {
            if (a.issue_time == grid.time_at(begin) && a.reason != ActionReason::Forecast &&
                reason == ActionReason::Forecast && a.target_replicas == target) {
                reason = a.reason;
            }
        }
        const auto issue = grid.time_at(begin);
        if (!inside_instance_bounds(spec, issue)) continue;
        if (!plan.actions.empty() && plan.actions.back().target_replicas == target) continue;
        plan.actions.push_back({issue, target, reason});
    }

    for (std::size_t i = 0; i < grid.length; ++i) {
        if (!infeasible[i]) continue;
        const auto t = grid.time_at(i);
        if (!plan.infeasible_windows.empty() && plan.infeasible_windows.back().end == t) {
            plan.infeasible_windows.back().end = t + grid.step;
        } else {
            plan.infeasible_windows.push_back({t, t + grid.step});
        }
    }
    return plan;
}

ScalingPlan plan(const Forecast& forecast, const PerfModel& model, const AutoscalerSpec& spec,
                 const PlanOptions& options)
{
    validate_spec(spec, forecast.step);
    const std::size_t w = interval_steps(spec, forecast.step);
    if (forecast.horizon < w) {
        throw EngineError(ErrorKind::InsufficientData, "forecast horizon shorter than one action interval");
    }
    const auto target = ScalingTarget::from_spec(spec);
    // Requirements are computed unbounded so that apply_bounds can record infeasible windows.
    const int ceiling = spec.max_replicas > std::numeric_limits<int>::max() / 1000
                            ? std::numeric_limits<int>::max()
                            : spec.max_replicas * 1000;
    std::vector<int> required(forecast.horizon);
    for (std::size_t h = 0; h < forecast.horizon; ++h) {
        try {
            required[h] = required_pods(model, std::max(0.0, forecast.upper[h]), target, {1, ceiling});
        } catch (const EngineError& e) {
            if (e.kind() != ErrorKind::NoFeasiblePods) throw;
            required[h] = ceiling;
        }
    }
    const auto shifted = shift_for_pending(required, steps_for(spec.pending_time, forecast.step));
    const auto merged = merge_actions(shifted, w, forecast.start, forecast.step);
    const PlanGrid grid{forecast.start, forecast.step, forecast.horizon};
    auto result = apply_bounds(merged, spec, grid);

    if (options.downgrade_protection && options.fallback_signal && !result.actions.empty() &&
        result.actions.front().issue_time == forecast.start) {
        const auto b = bounds_at(spec, forecast.start);
        const int reactive = std::clamp(*options.fallback_signal, b.lo, b.hi);
        const double median_point = numeric::median(forecast.point);
        const double margin = forecast.components.empty() ? 0.0 : forecast.components.front().residual_margin;
        const bool low_confidence = options.period_strength < options.confidence_strength_threshold &&
                                    margin > options.confidence_margin_ratio * median_point;
        auto& actions = result.actions;
        if (low_confidence) {
            // Forecast not trusted: the whole plan is floored at the reactive requirement.
            for (auto& a : actions) {
                if (a.target_replicas < reactive) {
                    a.target_replicas = std::min(reactive, bounds_at(spec, a.issue_time).hi);
                    a.reason = ActionReason::DowngradeFallback;
                }
            }
        } else if (actions.front().target_replicas < reactive) {
            actions.front().target_replicas = reactive;
            actions.front().reason = ActionReason::DowngradeFallback;
        }
        std::vector<ScalingAction> deduped;
        for (const auto& a : actions) {
            if (!deduped.empty() && deduped.back().target_replicas == a.target_replicas) continue;
            deduped.push_back(a);
        }
        actions = std::move(deduped);
    }
    return result;
}

} // namespace ahpa

#pragma once

#include "ahpa/core.hpp"
#include "ahpa/perfmodel.hpp"
#include "ahpa/pipeline.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ahpa {

enum class Policy { FixPod, Hpa, Ahpa };

std::string_view to_string(Policy policy);
Policy parse_policy(std::string_view text);

struct PendingBatch {
    TimePoint ready_at{};
    int count = 0;
};

class ClusterState {
public:
    ClusterState(int ready, TimePoint now);

    int ready() const { return ready_; }
    int pending() const;
    /// Pods billed this minute: ready plus still-starting pods.
    int total() const { return ready_ + pending(); }
    TimePoint time() const { return time_; }
    const std::vector<PendingBatch>& pending_batches() const { return pending_; }

    /// Moves the clock and turns matured batches into ready pods.
    void advance(TimePoint now);
    /// Requests `target` pods. New pods become ready after `pending_time`;
    /// removals drop the newest pending pods first, then ready pods.
    /// Returns true when the pod count changed.
    bool scale_to(int target, Minutes pending_time);

private:
    int ready_;
    std::vector<PendingBatch> pending_;
    TimePoint time_;
};

struct Observation {
    double utilization = 0.0;   // percent of ready capacity, capped at 1000
    std::optional<double> rt_ms;
    bool violation = false;
};

/// Observes one minute of load against the ready pods.
Observation step(const ClusterState& state, double qps, const PerfModel& model, const ScalingTarget& target);

struct SimOptions {
    PerfModel model;
    AutoscalerSpec spec;
    /// Metrics cover minutes [eval_start, N).
    std::size_t eval_start = 0;
    /// Starting pod count; 0 sizes the cluster for the first observed load.
    int initial_pods = 0;

    Minutes sync_period{1};
    Minutes stabilization_window{5};
    double hpa_tolerance = 0.1;

    Minutes train_window{7 * 24 * 60};
    Minutes replan_every{60};
    PipelineOptions pipeline;
};

struct SimReport {
    std::string policy;
    TimePoint start{};  // time of pod_trace[0]
    long long cost_pod_minutes = 0;
    double violation_rate = 0.0;
    int max_pods = 0;
    int action_count = 0;
    long long total_variation = 0;
    std::size_t evaluated_minutes = 0;
    std::size_t violating_minutes = 0;
    std::size_t fallback_windows = 0;
    std::vector<int> pod_trace;
    std::vector<std::optional<double>> qps_trace;
    std::vector<std::optional<double>> utilization_trace;  // empty where qps is missing
    std::vector<bool> violation_trace;
};

/// Peak required_pods over the evaluated minutes (bounded by the spec).
int peak_required_pods(const TimeSeries& trace, const SimOptions& options);

SimReport run_fixpod(const TimeSeries& trace, int pods, const SimOptions& options);
SimReport run_hpa(const TimeSeries& trace, const SimOptions& options);
SimReport run_ahpa(const TimeSeries& trace, const SimOptions& options);
SimReport run_policy(Policy policy, const TimeSeries& trace, const SimOptions& options);

} // namespace ahpa

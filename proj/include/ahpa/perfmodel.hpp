#pragma once

#include "ahpa/core.hpp"

#include <optional>
#include <span>
#include <string_view>

namespace ahpa {

enum class QueueModel {
    Mm1Parallel,  // each pod an independent M/M/1 queue receiving qps/pods
    Mmc,          // all pods share one FIFO queue
};

std::string_view to_string(QueueModel kind);
QueueModel parse_queue_model(std::string_view text);

struct PerfModel {
    QueueModel kind = QueueModel::Mm1Parallel;
    double service_rate = 10.0;      // queries/second one pod processes
    double other_latency_ms = 0.0;   // fixed non-queueing latency
    std::optional<double> linear_coefficient;  // pods per unit QPS (linear model)

    friend bool operator==(const PerfModel&, const PerfModel&) = default;
};

struct ScalingTarget {
    enum class Kind { Utilization, ResponseTime };
    Kind kind = Kind::Utilization;
    double value = 50.0;  // percent, or milliseconds

    static ScalingTarget utilization(double percent) { return {Kind::Utilization, percent}; }
    static ScalingTarget response_time(double ms) { return {Kind::ResponseTime, ms}; }
    static ScalingTarget from_spec(const AutoscalerSpec& spec);
};

struct ReplicaBounds {
    int min = 1;
    int max = 1'000'000;
};

/// Probability that an arrival waits in an M/M/c queue with offered load a = lambda/mu.
/// Evaluated through the Erlang-B recurrence (no factorials). Throws UNSTABLE_QUEUE when a >= c.
double erlang_c(int servers, double offered_load);

/// Mean response time in milliseconds; throws UNSTABLE_QUEUE outside the stable region.
double avg_rt_ms(const PerfModel& model, double qps, int pods);

/// qps / (pods * u) as a fraction.
double utilization(const PerfModel& model, double qps, int pods);

/// True when `pods` meets the target at `qps` (unstable counts as not meeting it).
bool meets_target(const PerfModel& model, double qps, int pods, const ScalingTarget& target);

/// Smallest pod count in [bounds.min, bounds.max] meeting the target.
/// Throws NO_FEASIBLE_PODS when even bounds.max misses it.
int required_pods(const PerfModel& model, double qps, const ScalingTarget& target, ReplicaBounds bounds);

struct PerfSample {
    double qps = 0.0;
    int pods = 1;
    double observed = 0.0;  // RT in ms or CPU in percent, per FitSignal
};

enum class FitSignal { ResponseTimeMs, CpuPercent };

/// Fits the per-pod service rate (and the fixed latency for RT samples).
/// RT: golden-section search on u with the latency solved in closed form per candidate.
/// CPU: u = median(qps / (pods * cpu_fraction)).
PerfModel fit_perf_model(std::span<const PerfSample> samples, QueueModel kind, FitSignal signal,
                         std::optional<double> utilization_target_percent = std::nullopt);

} // namespace ahpa

#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ahpa {

using Minutes = std::chrono::minutes;
using TimePoint = std::chrono::sys_time<std::chrono::minutes>;

inline std::int64_t epoch_minutes(TimePoint tp) { return tp.time_since_epoch().count(); }
inline TimePoint from_epoch_minutes(std::int64_t m) { return TimePoint{Minutes{m}}; }

enum class ErrorKind {
    InsufficientData,
    InvalidConfig,
    UnstableQueue,
    NoFeasiblePods,
    IoFailure,
    DegenerateSeries,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the engine carries exactly one ErrorKind.
class EngineError : public std::runtime_error {
public:
    EngineError(ErrorKind kind, const std::string& detail);

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

enum class MetricKind {
    CpuUtilizationPercent,
    Qps,
    RtMilliseconds,
    MemoryPercent,
    Custom,
};

std::string_view to_string(MetricKind kind);
MetricKind parse_metric_kind(std::string_view text);
bool is_percentage(MetricKind kind);
/// Metrics that can never be negative (QPS and percentages).
bool is_non_negative(MetricKind kind);

/// Uniformly gridded samples. Missing samples are empty optionals.
class TimeSeries {
public:
    TimeSeries(TimePoint start, Minutes step, std::vector<std::optional<double>> values,
               MetricKind metric = MetricKind::Qps);

    static TimeSeries from_dense(TimePoint start, Minutes step, const std::vector<double>& values,
                                 MetricKind metric = MetricKind::Qps);

    TimePoint start() const { return start_; }
    Minutes step() const { return step_; }
    MetricKind metric() const { return metric_; }
    std::size_t size() const { return values_.size(); }
    const std::vector<std::optional<double>>& values() const { return values_; }
    const std::optional<double>& operator[](std::size_t i) const { return values_[i]; }

    TimePoint time_at(std::size_t i) const { return start_ + step_ * static_cast<std::int64_t>(i); }
    std::size_t missing_count() const;
    bool complete() const { return missing_count() == 0; }

    /// Values as plain doubles; throws DEGENERATE_SERIES if any sample is missing.
    std::vector<double> dense() const;

    /// Sub-range [first, first + count).
    TimeSeries slice(std::size_t first, std::size_t count) const;

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
    TimePoint start_;
    Minutes step_;
    std::vector<std::optional<double>> values_;
    MetricKind metric_;
};

enum class ScaleStrategy { Auto, Observer };

std::string_view to_string(ScaleStrategy s);
ScaleStrategy parse_scale_strategy(std::string_view text);

struct InstanceBound {
    TimePoint start;
    TimePoint end;

    bool contains(TimePoint t) const { return t >= start && t < end; }
    friend bool operator==(const InstanceBound&, const InstanceBound&) = default;
};

/// Daily UTC window "HH:MM-HH:MM" with replica overrides while inside it.
/// A window whose end precedes its start wraps past midnight.
struct CronRule {
    std::string schedule;
    int forced_min = 1;
    int forced_max = 1;

    bool active_at(TimePoint t) const;
    friend bool operator==(const CronRule&, const CronRule&) = default;
};

struct AutoscalerSpec {
    std::string scale_target_ref = "default";
    MetricKind metric = MetricKind::CpuUtilizationPercent;
    std::optional<double> average_utilization = 50.0;
    std::optional<double> target_rt_ms;
    ScaleStrategy scale_strategy = ScaleStrategy::Auto;
    int max_replicas = 100;
    int min_replicas = 1;
    std::vector<InstanceBound> instance_bounds;
    std::vector<CronRule> cron_rules;
    Minutes pending_time{1};
    Minutes action_interval{3};

    friend bool operator==(const AutoscalerSpec&, const AutoscalerSpec&) = default;
};

/// Returns the spec unchanged when every invariant holds; throws INVALID_CONFIG
/// naming the first violated rule otherwise.
AutoscalerSpec validate_spec(const AutoscalerSpec& spec, Minutes series_step = Minutes{1});

/// Parses a cron window; returns minutes-of-day [begin, end).
std::pair<int, int> parse_daily_window(std::string_view schedule);

std::string format_rfc3339(TimePoint tp);

} // namespace ahpa

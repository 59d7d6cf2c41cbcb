#include "ahpa/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

namespace ahpa {

namespace {

std::string upper_copy(std::string_view text)
{
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

[[noreturn]] void invalid(const std::string& rule)
{
    throw EngineError(ErrorKind::InvalidConfig, rule);
}

} // namespace

std::string_view to_string(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::InsufficientData: return "INSUFFICIENT_DATA";
    case ErrorKind::InvalidConfig: return "INVALID_CONFIG";
    case ErrorKind::UnstableQueue: return "UNSTABLE_QUEUE";
    case ErrorKind::NoFeasiblePods: return "NO_FEASIBLE_PODS";
    case ErrorKind::IoFailure: return "IO_FAILURE";
    case ErrorKind::DegenerateSeries: return "DEGENERATE_SERIES";
    }
    return "UNKNOWN";
}

EngineError::EngineError(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail)
    , kind_(kind)
    , detail_(detail)
{
}

std::string_view to_string(MetricKind kind)
{
    switch (kind) {
    case MetricKind::CpuUtilizationPercent: return "CPU_UTILIZATION_PERCENT";
    case MetricKind::Qps: return "QPS";
    case MetricKind::RtMilliseconds: return "RT_MILLISECONDS";
    case MetricKind::MemoryPercent: return "MEMORY_PERCENT";
    case MetricKind::Custom: return "CUSTOM";
    }
    return "CUSTOM";
}

MetricKind parse_metric_kind(std::string_view text)
{
    const auto key = upper_copy(text);
    for (auto kind : {MetricKind::CpuUtilizationPercent, MetricKind::Qps, MetricKind::RtMilliseconds,
                      MetricKind::MemoryPercent, MetricKind::Custom}) {
        if (key == to_string(kind)) {
            return kind;
        }
    }
    if (key == "CPU") return MetricKind::CpuUtilizationPercent;
    if (key == "RT") return MetricKind::RtMilliseconds;
    if (key == "MEMORY") return MetricKind::MemoryPercent;
    invalid("unknown metric kind '" + std::string(text) + "'");
}

bool is_percentage(MetricKind kind)
{
    return kind == MetricKind::CpuUtilizationPercent || kind == MetricKind::MemoryPercent;
}

bool is_non_negative(MetricKind kind)
{
    return is_percentage(kind) || kind == MetricKind::Qps;
}

TimeSeries::TimeSeries(TimePoint start, Minutes step, std::vector<std::optional<double>> values,
                       MetricKind metric)
    : start_(start)
    , step_(step)
    , values_(std::move(values))
    , metric_(metric)
{
    if (values_.empty()) {
        throw EngineError(ErrorKind::DegenerateSeries, "time series must hold at least one sample");
    }
    if (step_.count() <= 0) {
        throw EngineError(ErrorKind::InvalidConfig, "time series step must be positive");
    }
    for (const auto& v : values_) {
        if (!v) continue;
        if (!std::isfinite(*v)) {
            throw EngineError(ErrorKind::DegenerateSeries, "time series holds a non-finite value");
        }
        if (is_percentage(metric_) && *v < 0.0) {
            throw EngineError(ErrorKind::DegenerateSeries, "percentage metric holds a negative value");
        }
    }
}

TimeSeries TimeSeries::from_dense(TimePoint start, Minutes step, const std::vector<double>& values,
                                  MetricKind metric)
{
    std::vector<std::optional<double>> opt(values.begin(), values.end());
    return TimeSeries(start, step, std::move(opt), metric);
}

std::size_t TimeSeries::missing_count() const
{
    return static_cast<std::size_t>(
        std::count_if(values_.begin(), values_.end(), [](const auto& v) { return !v.has_value(); }));
}

std::vector<double> TimeSeries::dense() const
{
    std::vector<double> out;
    out.reserve(values_.size());
    for (const auto& v : values_) {
        if (!v) {
            throw EngineError(ErrorKind::DegenerateSeries, "series has missing samples; repair it first");
        }
        out.push_back(*v);
    }
    return out;
}

TimeSeries TimeSeries::slice(std::size_t first, std::size_t count) const
{
    if (first >= values_.size() || count == 0) {
        throw EngineError(ErrorKind::InsufficientData, "empty slice requested");
    }
    const std::size_t last = std::min(values_.size(), first + count);
    std::vector<std::optional<double>> sub(values_.begin() + static_cast<std::ptrdiff_t>(first),
                                           values_.begin() + static_cast<std::ptrdiff_t>(last));
    return TimeSeries(time_at(first), step_, std::move(sub), metric_);
}

std::string_view to_string(ScaleStrategy s)
{
    return s == ScaleStrategy::Auto ? "AUTO" : "OBSERVER";
}

ScaleStrategy parse_scale_strategy(std::string_view text)
{
    const auto key = upper_copy(text);
    if (key == "AUTO") return ScaleStrategy::Auto;
    if (key == "OBSERVER") return ScaleStrategy::Observer;
    invalid("unknown scale_strategy '" + std::string(text) + "'");
}

std::pair<int, int> parse_daily_window(std::string_view schedule)
{
    int h1 = 0, m1 = 0, h2 = 0, m2 = 0;
    char tail = 0;
    const std::string text(schedule);
    if (std::sscanf(text.c_str(), "%d:%d-%d:%d%c", &h1, &m1, &h2, &m2, &tail) != 4) {
        invalid("cron schedule '" + text + "' is not of the form HH:MM-HH:MM");
    }
    auto ok = [](int h, int m) { return h >= 0 && h <= 24 && m >= 0 && m < 60 && (h < 24 || m == 0); };
    if (!ok(h1, m1) || !ok(h2, m2)) {
        invalid("cron schedule '" + text + "' has an out-of-range time");
    }
    const int begin = h1 * 60 + m1;
    const int end = h2 * 60 + m2;
    if (begin == end) {
        invalid("cron schedule '" + text + "' is an empty window");
    }
    return {begin, end};
}

bool CronRule::active_at(TimePoint t) const
{
    const auto [begin, end] = parse_daily_window(schedule);
    const auto day = std::chrono::floor<std::chrono::days>(t);
    const int minute_of_day = static_cast<int>((t - day).count());
    if (begin < end) {
        return minute_of_day >= begin && minute_of_day < end;
    }
    return minute_of_day >= begin || minute_of_day < end;
}

AutoscalerSpec validate_spec(const AutoscalerSpec& spec, Minutes series_step)
{
    if (spec.min_replicas < 1) invalid("min_replicas must be >= 1");
    if (spec.max_replicas < spec.min_replicas) invalid("min_replicas must not exceed max_replicas");
    if (spec.average_utilization && spec.target_rt_ms) {
        invalid("average_utilization and target_rt_ms are mutually exclusive");
    }
    if (!spec.average_utilization && !spec.target_rt_ms) {
        invalid("one of average_utilization or target_rt_ms is required");
    }
    if (spec.average_utilization) {
        const double u = *spec.average_utilization;
        if (!std::isfinite(u) || u <= 0.0) invalid("average_utilization must be positive");
        if (is_percentage(spec.metric) && u > 100.0) {
            invalid("average_utilization must not exceed 100 for a percentage metric");
        }
    }
    if (spec.target_rt_ms && (!std::isfinite(*spec.target_rt_ms) || *spec.target_rt_ms <= 0.0)) {
        invalid("target_rt_ms must be positive");
    }
    if (spec.pending_time.count() < 0) invalid("pending_time must be >= 0");
    if (spec.action_interval < series_step || spec.action_interval.count() <= 0) {
        invalid("action_interval must be at least one series step");
    }
    for (const auto& b : spec.instance_bounds) {
        if (!(b.start < b.end)) invalid("instance_bounds window must have start < end");
    }
    for (const auto& c : spec.cron_rules) {
        parse_daily_window(c.schedule);
        if (c.forced_min < 1) invalid("cron forced_min must be >= 1");
        if (c.forced_min > c.forced_max) invalid("cron forced_min must not exceed forced_max");
    }
    return spec;
}

std::string format_rfc3339(TimePoint tp)
{
    const auto day = std::chrono::floor<std::chrono::days>(tp);
    const std::chrono::year_month_day ymd{day};
    const auto minute_of_day = (tp - day).count();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:00Z", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(minute_of_day / 60), static_cast<int>(minute_of_day % 60));
    return buf;
}

} // namespace ahpa

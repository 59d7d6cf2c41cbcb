#include "ahpa/report.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace ahpa {

std::string format_number(double v)
{
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

Json to_json(const PeriodReport& report)
{
    Json j;
    j["is_periodic"] = report.is_periodic;
    j["periods"] = report.periods;
    j["strengths"] = report.strengths;
    return j;
}

Json to_json(const PerfModel& model)
{
    Json j;
    j["kind"] = std::string(to_string(model.kind));
    j["service_rate"] = model.service_rate;
    j["other_latency_ms"] = model.other_latency_ms;
    j["linear_coefficient"] = model.linear_coefficient ? Json(*model.linear_coefficient) : Json(nullptr);
    return j;
}

Json to_json(const SimReport& r)
{
    Json j;
    j["policy"] = r.policy;
    j["start"] = format_rfc3339(r.start);
    j["cost_pod_minutes"] = r.cost_pod_minutes;
    j["violation_rate"] = r.violation_rate;
    j["max_pods"] = r.max_pods;
    j["action_count"] = r.action_count;
    j["total_variation"] = r.total_variation;
    j["evaluated_minutes"] = r.evaluated_minutes;
    j["violating_minutes"] = r.violating_minutes;
    j["fallback_windows"] = r.fallback_windows;
    j["pod_trace"] = r.pod_trace;
    Json util = Json::array();
    for (const auto& u : r.utilization_trace) util.push_back(u ? Json(*u) : Json(nullptr));
    j["utilization_trace"] = std::move(util);
    return j;
}

Json to_json(const ScalingPlan& plan)
{
    Json j;
    j["mode"] = std::string(to_string(plan.mode));
    j["execute"] = plan.execute;
    Json actions = Json::array();
    for (const auto& a : plan.actions) {
        actions.push_back({{"t", epoch_minutes(a.issue_time)},
                           {"replicas", a.target_replicas},
                           {"reason", std::string(to_string(a.reason))}});
    }
    j["actions"] = std::move(actions);
    Json windows = Json::array();
    for (const auto& w : plan.infeasible_windows) {
        windows.push_back({{"start", epoch_minutes(w.start)}, {"end", epoch_minutes(w.end)}});
    }
    j["infeasible_windows"] = std::move(windows);
    return j;
}

std::string plan_jsonl(const ScalingPlan& plan)
{
    std::string out;
    for (const auto& a : plan.actions) {
        Json line{{"t", epoch_minutes(a.issue_time)},
                  {"replicas", a.target_replicas},
                  {"reason", std::string(to_string(a.reason))}};
        out += line.dump();
        out += '\n';
    }
    return out;
}

std::string trace_csv(const TimeSeries& series)
{
    std::string out = "timestamp,value\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out += std::to_string(epoch_minutes(series.time_at(i)) * 60);
        out += ',';
        if (series[i]) out += format_number(*series[i]);
        out += '\n';
    }
    return out;
}

std::string forecast_csv(const Forecast& f)
{
    std::string out = "ts,point,upper\n";
    for (std::size_t h = 0; h < f.horizon; ++h) {
        out += std::to_string(epoch_minutes(f.time_at(h)) * 60) + ',' + format_number(f.point[h]) + ',' +
               format_number(f.upper[h]) + '\n';
    }
    return out;
}

std::string decomposition_csv(const TimeSeries& series, const Decomposition& d)
{
    std::string out = "ts,value,trend";
    for (auto p : d.periods) out += ",seasonal_" + std::to_string(p);
    out += ",residual\n";
    for (std::size_t t = 0; t < d.size(); ++t) {
        out += std::to_string(epoch_minutes(series.time_at(t)) * 60);
        out += ',' + (series[t] ? format_number(*series[t]) : std::string());
        out += ',' + format_number(d.trend[t]);
        for (const auto& s : d.seasonals) out += ',' + format_number(s[t]);
        out += ',' + format_number(d.residual[t]) + '\n';
    }
    return out;
}

std::string sim_minutes_csv(const SimReport& r)
{
    std::string out = "ts,qps,pods,utilization,violation\n";
    for (std::size_t i = 0; i < r.pod_trace.size(); ++i) {
        out += std::to_string((epoch_minutes(r.start) + static_cast<std::int64_t>(i)) * 60);
        out += ',' + (r.qps_trace[i] ? format_number(*r.qps_trace[i]) : std::string());
        out += ',' + std::to_string(r.pod_trace[i]);
        out += ',' + (r.utilization_trace[i] ? format_number(*r.utilization_trace[i]) : std::string());
        out += ',' + std::string(r.violation_trace[i] ? "1" : "0") + '\n';
    }
    return out;
}

std::string comparison_table(const std::vector<SimReport>& reports)
{
    std::ostringstream out;
    char buf[64];
    out << "Metric  ";
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof buf, "%12s", r.policy.c_str());
        out << buf;
    }
    out << "\nCost    ";
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof buf, "%12lld", r.cost_pod_minutes);
        out << buf;
    }
    out << "\nVR      ";
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof buf, "%12.4f", r.violation_rate);
        out << buf;
    }
    out << "\nMax Pod ";
    for (const auto& r : reports) {
        std::snprintf(buf, sizeof buf, "%12d", r.max_pods);
        out << buf;
    }
    out << "\n";
    return out.str();
}

} // namespace ahpa

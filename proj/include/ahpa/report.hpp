#pragma once

#include "ahpa/decompose.hpp"
#include "ahpa/forecast.hpp"
#include "ahpa/perfmodel.hpp"
#include "ahpa/planner.hpp"
#include "ahpa/seasonality.hpp"
#include "ahpa/sim.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace ahpa {

using Json = nlohmann::ordered_json;

Json to_json(const PeriodReport& report);
Json to_json(const PerfModel& model);
Json to_json(const SimReport& report);
Json to_json(const ScalingPlan& plan);

/// One {"t": epoch_min, "replicas": n, "reason": tag} object per line.
std::string plan_jsonl(const ScalingPlan& plan);

/// `timestamp,value` with epoch seconds; missing samples keep an empty value.
std::string trace_csv(const TimeSeries& series);
/// ts,point,upper
std::string forecast_csv(const Forecast& forecast);
/// ts,value,trend,seasonal_<p>...,residual
std::string decomposition_csv(const TimeSeries& series, const Decomposition& d);
/// ts,qps,pods,utilization,violation
std::string sim_minutes_csv(const SimReport& report);

/// Cost / VR / max-pod rows with one column per policy.
std::string comparison_table(const std::vector<SimReport>& reports);

/// Shortest round-trip decimal text.
std::string format_number(double v);

} // namespace ahpa

#include "ahpa/core.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace ahpa;

namespace {

ErrorKind kind_of(auto&& fn)
{
    try {
        fn();
    } catch (const EngineError& e) {
        return e.kind();
    }
    FAIL("expected an EngineError");
    return ErrorKind::IoFailure;
}

AutoscalerSpec base_spec()
{
    AutoscalerSpec s;
    s.min_replicas = 1;
    s.max_replicas = 10;
    s.average_utilization = 40.0;
    return s;
}

} // namespace

TEST_CASE("validate_spec accepts a spec inside its bounds")
{
    const auto s = base_spec();
    CHECK(validate_spec(s) == s);
}

TEST_CASE("validate_spec rejects min above max")
{
    auto s = base_spec();
    s.min_replicas = 5;
    s.max_replicas = 3;
    CHECK(kind_of([&] { validate_spec(s); }) == ErrorKind::InvalidConfig);
}

TEST_CASE("validate_spec rejects a zero utilization threshold")
{
    auto s = base_spec();
    s.average_utilization = 0.0;
    CHECK(kind_of([&] { validate_spec(s); }) == ErrorKind::InvalidConfig);
}

TEST_CASE("validate_spec rule table")
{
    auto s = base_spec();
    SUBCASE("both targets") { s.target_rt_ms = 200.0; }
    SUBCASE("no target") { s.average_utilization.reset(); }
    SUBCASE("utilization above 100 on a percentage metric") { s.average_utilization = 120.0; }
    SUBCASE("negative pending") { s.pending_time = Minutes{-1}; }
    SUBCASE("interval shorter than the step") { s.action_interval = Minutes{0}; }
    SUBCASE("inverted instance bound") {
        s.instance_bounds.push_back({from_epoch_minutes(100), from_epoch_minutes(50)});
    }
    SUBCASE("cron min above cron max") { s.cron_rules.push_back({"02:00-03:00", 5, 4}); }
    SUBCASE("malformed cron") { s.cron_rules.push_back({"2am", 1, 4}); }
    CHECK(kind_of([&] { validate_spec(s); }) == ErrorKind::InvalidConfig);
}

TEST_CASE("validate_spec is idempotent")
{
    auto s = base_spec();
    s.cron_rules.push_back({"22:00-02:00", 2, 8});
    s.instance_bounds.push_back({from_epoch_minutes(0), from_epoch_minutes(600)});
    const auto once = validate_spec(s);
    CHECK(validate_spec(once) == once);
}

TEST_CASE("utilization above 100 is allowed for a qps metric")
{
    auto s = base_spec();
    s.metric = MetricKind::Qps;
    s.average_utilization = 250.0;
    CHECK_NOTHROW(validate_spec(s));
}

TEST_CASE("cron windows, including one that wraps midnight")
{
    const CronRule night{"22:00-02:00", 1, 2};
    const CronRule early{"02:00-03:00", 1, 2};
    const auto day = from_epoch_minutes(28401120);
    CHECK(night.active_at(day + Minutes{23 * 60}));
    CHECK(night.active_at(day + Minutes{60}));
    CHECK_FALSE(night.active_at(day + Minutes{2 * 60}));
    CHECK(early.active_at(day + Minutes{2 * 60}));
    CHECK(early.active_at(day + Minutes{2 * 60 + 59}));
    CHECK_FALSE(early.active_at(day + Minutes{3 * 60}));
    CHECK(parse_daily_window("00:00-24:00") == std::pair{0, 1440});
}

TEST_CASE("TimeSeries rejects empty, non-finite and negative percentages")
{
    const auto t0 = from_epoch_minutes(0);
    CHECK(kind_of([&] { TimeSeries(t0, Minutes{1}, {}); }) == ErrorKind::DegenerateSeries);
    CHECK(kind_of([&] { TimeSeries(t0, Minutes{0}, {1.0}); }) == ErrorKind::InvalidConfig);
    CHECK(kind_of([&] {
              TimeSeries(t0, Minutes{1}, {std::numeric_limits<double>::infinity()});
          }) == ErrorKind::DegenerateSeries);
    CHECK(kind_of([&] { TimeSeries(t0, Minutes{1}, {-1.0}, MetricKind::CpuUtilizationPercent); }) ==
          ErrorKind::DegenerateSeries);
    CHECK_NOTHROW(TimeSeries(t0, Minutes{1}, {150.0}, MetricKind::CpuUtilizationPercent));
}

TEST_CASE("TimeSeries accessors")
{
    const TimeSeries s(from_epoch_minutes(10), Minutes{1}, {1.0, std::nullopt, 3.0});
    CHECK(s.size() == 3);
    CHECK(s.missing_count() == 1);
    CHECK_FALSE(s.complete());
    CHECK(s.time_at(2) == from_epoch_minutes(12));
    CHECK(kind_of([&] { (void)s.dense(); }) == ErrorKind::DegenerateSeries);
    const auto tail = s.slice(2, 5);
    CHECK(tail.size() == 1);
    CHECK(tail.start() == from_epoch_minutes(12));
}

TEST_CASE("names round-trip")
{
    for (auto k : {MetricKind::CpuUtilizationPercent, MetricKind::Qps, MetricKind::RtMilliseconds,
                   MetricKind::MemoryPercent, MetricKind::Custom}) {
        CHECK(parse_metric_kind(to_string(k)) == k);
    }
    CHECK(parse_scale_strategy("observer") == ScaleStrategy::Observer);
    CHECK(to_string(ErrorKind::NoFeasiblePods) == "NO_FEASIBLE_PODS");
    CHECK(format_rfc3339(from_epoch_minutes(28401120)) == "2024-01-01T00:00:00Z");
}

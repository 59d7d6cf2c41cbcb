#include "ahpa/ingest.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

using namespace ahpa;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& body)
{
    const auto dir = fs::temp_directory_path() / "ahpa_ingest_test";
    fs::create_directories(dir);
    const auto p = dir / name;
    std::ofstream(p) << body;
    return p;
}

RawTrace rows_at(std::initializer_list<std::pair<std::int64_t, double>> pts)
{
    RawTrace raw;
    for (auto [sec, v] : pts) raw.rows.push_back({sec, "qps", v});
    return raw;
}

TimeSeries series(std::vector<std::optional<double>> v)
{
    return TimeSeries(from_epoch_minutes(0), Minutes{1}, std::move(v));
}

} // namespace

TEST_CASE("three epoch rows parse into three rows")
{
    const auto p = write_temp("three.csv", "timestamp,value\n0,1\n60,2\n120,3\n");
    const auto raw = read_trace(p, MetricKind::Qps);
    CHECK(raw.rows.size() == 3);
    CHECK(raw.skipped_rows == 0);
    CHECK(raw.rows[2].value == 3.0);
}

TEST_CASE("one malformed row among 100 is skipped")
{
    std::string body = "timestamp,value\n";
    for (int i = 0; i < 100; ++i) {
        body += i == 37 ? "garbage,row,here\n" : std::to_string(i * 60) + "," + std::to_string(i) + "\n";
    }
    const auto raw = read_trace(write_temp("hundred.csv", body), MetricKind::Qps);
    CHECK(raw.rows.size() == 99);
    CHECK(raw.skipped_rows == 1);
}

TEST_CASE("empty file is degenerate")
{
    const auto p = write_temp("empty.csv", "");
    CHECK_THROWS_AS(read_trace(p, MetricKind::Qps), EngineError);
    try {
        read_trace(p, MetricKind::Qps);
    } catch (const EngineError& e) {
        CHECK(e.kind() == ErrorKind::DegenerateSeries);
    }
}

TEST_CASE("missing file is an IO failure")
{
    try {
        read_trace("/nonexistent/trace.csv", MetricKind::Qps);
        FAIL("no throw");
    } catch (const EngineError& e) {
        CHECK(e.kind() == ErrorKind::IoFailure);
    }
}

TEST_CASE("RFC3339 and JSON-lines inputs agree with epoch CSV")
{
    const auto a = read_trace(write_temp("rfc.csv", "timestamp,value\n2021-04-01T00:00:00Z,4\n2021-04-01T00:01:00Z,5\n"),
                              MetricKind::Qps);
    const auto b = read_trace(write_temp("rows.jsonl", "{\"ts\":1617235200,\"value\":4}\n{\"ts\":1617235260,\"value\":5}\n"),
                              MetricKind::Qps);
    REQUIRE(a.rows.size() == 2);
    REQUIRE(b.rows.size() == 2);
    CHECK(a.rows[0].epoch_seconds == 1617235200);
    CHECK(b.rows[1].epoch_seconds == a.rows[1].epoch_seconds);
    CHECK(b.rows[1].value == a.rows[1].value);
}

TEST_CASE("an empty value field is an explicit missing sample")
{
    const auto raw = read_trace(write_temp("gap.csv", "timestamp,value\n0,1\n60,\n120,3\n"), MetricKind::Qps);
    const auto s = regularize(raw, Minutes{1});
    CHECK(s.size() == 3);
    CHECK_FALSE(s[1].has_value());
}

TEST_CASE("regularize on an already uniform grid")
{
    const auto s = regularize(rows_at({{0, 1}, {60, 2}, {120, 3}}), Minutes{1});
    CHECK(s.size() == 3);
    CHECK(s.complete());
}

TEST_CASE("regularize leaves a gap missing")
{
    const auto s = regularize(rows_at({{0, 1}, {120, 3}}), Minutes{1});
    CHECK(s.size() == 3);
    CHECK_FALSE(s[1].has_value());
    CHECK(*s[2] == 3.0);
}

TEST_CASE("duplicates in one bucket are averaged")
{
    const auto s = regularize(rows_at({{0, 4}, {30, 6}}), Minutes{1});
    CHECK(s.size() == 1);
    CHECK(*s[0] == 5.0);
}

TEST_CASE("regularize grid length property")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        RawTrace raw;
        const int rows = 1 + static_cast<int>(rng() % 50);
        std::int64_t lo = 1'000'000, hi = 0;
        for (int i = 0; i < rows; ++i) {
            const std::int64_t sec = 60 * static_cast<std::int64_t>(rng() % 2'000);
            lo = std::min(lo, sec);
            hi = std::max(hi, sec);
            raw.rows.push_back({sec, "qps", 1.0});
        }
        const std::int64_t step_min = 1 + static_cast<std::int64_t>(rng() % 5);
        const auto s = regularize(raw, Minutes{step_min});
        const std::int64_t step_s = 60 * step_min;
        const auto expected = static_cast<std::size_t>((hi - lo) / step_s + 1);
        CHECK(s.size() == expected);
    }
}

TEST_CASE("repair interpolates the midpoint")
{
    const auto r = repair(series({1.0, std::nullopt, 3.0}), {.max_missing_ratio = 0.5});
    CHECK(r.dense() == std::vector<double>{1.0, 2.0, 3.0});
}

TEST_CASE("repair removes a spike when the MAD is zero")
{
    const auto s = series({5.0, 5.0, 5.0, 500.0, 5.0, 5.0});
    const auto z = robust_z_scores(s);
    // MAD is 0, so the scale falls back to the mean absolute deviation: 495/6.
    CHECK(z[3] == doctest::Approx(495.0 / (495.0 / 6.0)));
    CHECK(z[0] == 0.0);
    const auto r = repair(s, {.z_threshold = 3.0});
    CHECK(r.dense() == std::vector<double>(6, 5.0));
}

TEST_CASE("too many missing samples")
{
    std::vector<std::optional<double>> v(10, 1.0);
    for (int i : {1, 3, 5, 7}) v[static_cast<std::size_t>(i)].reset();
    try {
        repair(series(v));
        FAIL("no throw");
    } catch (const EngineError& e) {
        CHECK(e.kind() == ErrorKind::InsufficientData);
    }
}

TEST_CASE("repair properties on random series")
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::optional<double>> v(300);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = 50.0 + 10.0 * std::sin(0.05 * double(i)) + noise(rng);
        for (int k = 0; k < 5; ++k) v[rng() % v.size()] = 500.0;
        for (int k = 0; k < 20; ++k) v[rng() % v.size()].reset();
        const auto s = series(v);
        const auto r = repair(s);
        CHECK(r.complete());
        CHECK(repair(r) == r);
        const auto z = robust_z_scores(s);
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] && z[i] <= 5.0) CHECK(*r[i] == *v[i]);
        }
    }
}

TEST_CASE("retention keeps the newest samples")
{
    std::vector<std::optional<double>> v(20000, 1.0);
    const auto s = series(v);
    const auto t = truncate_retention(s);
    CHECK(t.size() == 10080);
    CHECK(t.time_at(t.size() - 1) == s.time_at(s.size() - 1));
    CHECK(truncate_retention(series({1.0, 2.0})).size() == 2);
}

#include "ahpa/perfmodel.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ahpa;

namespace {

PerfModel mm1(double u, double other = 0.0) { return {QueueModel::Mm1Parallel, u, other, std::nullopt}; }
PerfModel mmc(double u, double other = 0.0) { return {QueueModel::Mmc, u, other, std::nullopt}; }

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

std::vector<PerfSample> mm1_samples(double u, double other, double noise, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(1.0 - noise, 1.0 + noise);
    std::vector<PerfSample> out;
    for (int pods = 2; pods <= 10; pods += 2) {
        for (double load : {1.0, 3.0, 5.0, 7.0, 8.5}) {
            const double qps = load * pods;
            double rt = 1000.0 / (u - load) + other;
            if (noise > 0) rt *= jitter(rng);
            out.push_back({qps, pods, rt});
        }
    }
    return out;
}

} // namespace

TEST_CASE("Erlang C single server is the load")
{
    for (double rho : {0.1, 0.5, 0.8, 0.99}) CHECK(erlang_c(1, rho) == doctest::Approx(rho).epsilon(1e-14));
}

TEST_CASE("Erlang C with two servers and unit load")
{
    CHECK(erlang_c(2, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("Erlang C near the stability edge stays finite")
{
    const double c = erlang_c(10, 9.999);
    CHECK(std::isfinite(c));
    CHECK(c > 0.0);
    CHECK(c < 1.0);
    const double ref = oracle::birth_death_wait_probability(10, 9.999, oracle::truncation_for(10, 9.999));
    CHECK(std::abs(c - ref) <= 1e-9);
}

TEST_CASE("Erlang C against the birth-death solver")
{
    for (int c = 1; c <= 20; ++c) {
        for (int k = 1; k <= 50; ++k) {
            const double a = c * double(k) / 51.0;
            const double ref = oracle::birth_death_wait_probability(c, a, oracle::truncation_for(c, a));
            CHECK(std::abs(erlang_c(c, a) - ref) <= 1e-9);
        }
    }
}

TEST_CASE("Erlang C rejects unstable or malformed input")
{
    CHECK(kind_of([] { erlang_c(2, 2.0); }) == ErrorKind::UnstableQueue);
    CHECK(kind_of([] { erlang_c(0, 0.5); }) == ErrorKind::InvalidConfig);
}

TEST_CASE("response time examples")
{
    CHECK(avg_rt_ms(mm1(10), 0.0, 1) == doctest::Approx(100.0));
    CHECK(avg_rt_ms(mmc(10), 8.0, 1) == doctest::Approx(500.0));
    // C(2, 0.8) = 0.228571..., Wq = C / (2u - qps) = 19.05 ms.
    CHECK(erlang_c(2, 0.8) == doctest::Approx(8.0 / 35.0).epsilon(1e-12));
    CHECK(avg_rt_ms(mmc(10), 8.0, 2) == doctest::Approx(119.05).epsilon(1e-4));
    CHECK(kind_of([] { avg_rt_ms(mm1(10), 20.0, 2); }) == ErrorKind::UnstableQueue);
}

TEST_CASE("required pods examples")
{
    const auto rt200 = ScalingTarget::response_time(200.0);
    CHECK(required_pods(mm1(10), 80.0, rt200, {1, 1000}) == 16);
    CHECK(required_pods(mm1(10), 0.0, rt200, {3, 1000}) == 3);
    CHECK(required_pods(mm1(10), 95.0, ScalingTarget::utilization(50.0), {1, 1000}) == 19);
    CHECK(kind_of([&] { required_pods(mm1(10), 80.0, rt200, {1, 10}); }) == ErrorKind::NoFeasiblePods);
    CHECK(kind_of([] { required_pods(mm1(10), 5.0, ScalingTarget::response_time(90.0), {1, 10}); }) ==
          ErrorKind::NoFeasiblePods);
}

TEST_CASE("response time is monotone in pods and load")
{
    for (auto model : {mm1(10), mmc(10), mm1(5, 12), mmc(20, 3)}) {
        for (double qps : {3.0, 17.0, 55.0}) {
            int pods = static_cast<int>(qps / model.service_rate) + 1;
            double prev = avg_rt_ms(model, qps, pods);
            for (++pods; pods < 30; ++pods) {
                const double cur = avg_rt_ms(model, qps, pods);
                CHECK(cur < prev);
                prev = cur;
            }
        }
        for (int pods : {1, 4, 9}) {
            double prev = avg_rt_ms(model, 0.0, pods);
            for (double qps = 0.5; qps < pods * model.service_rate; qps += 0.5) {
                const double cur = avg_rt_ms(model, qps, pods);
                CHECK(cur > prev);
                prev = cur;
            }
        }
    }
}

TEST_CASE("required pods minimality on random cases")
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> qps_d(0.0, 400.0), u_d(2.0, 30.0), slack(1.05, 6.0), other_d(0.0, 40.0);
    for (int i = 0; i < 2000; ++i) {
        const auto model = (i % 2) ? mm1(u_d(rng), other_d(rng)) : mmc(u_d(rng), other_d(rng));
        const double target = model.other_latency_ms + 1000.0 / model.service_rate * slack(rng);
        const double qps = qps_d(rng);
        const int min_r = 1 + static_cast<int>(rng() % 3);
        const auto t = ScalingTarget::response_time(target);
        const int n = required_pods(model, qps, t, {min_r, 100000});
        CHECK(avg_rt_ms(model, qps, n) <= target * (1 + 1e-12));
        if (n > min_r) CHECK_FALSE(meets_target(model, qps, n - 1, t));
    }
}

TEST_CASE("shared queue never needs more pods than partitioned queues")
{
    for (double u : {5.0, 10.0, 20.0}) {
        const auto t = ScalingTarget::response_time(1000.0 / u * 1.5);
        for (int qps = 1; qps <= 200; ++qps) {
            CHECK(required_pods(mmc(u), qps, t, {1, 100000}) <= required_pods(mm1(u), qps, t, {1, 100000}));
        }
    }
}

TEST_CASE("fit recovers noiseless parameters")
{
    const auto m = fit_perf_model(mm1_samples(10, 20, 0, 1), QueueModel::Mm1Parallel, FitSignal::ResponseTimeMs);
    CHECK(std::abs(m.service_rate - 10.0) <= 0.1);
    CHECK(std::abs(m.other_latency_ms - 20.0) <= 1.0);
}

TEST_CASE("fit tolerates 5% noise")
{
    const auto m = fit_perf_model(mm1_samples(10, 20, 0.05, 2), QueueModel::Mm1Parallel, FitSignal::ResponseTimeMs);
    CHECK(std::abs(m.service_rate - 10.0) <= 0.5);
}

TEST_CASE("fit rejects a single load level")
{
    std::vector<PerfSample> s;
    for (int i = 1; i <= 12; ++i) s.push_back({5.0 * i, i, 120.0});
    CHECK(kind_of([&] { fit_perf_model(s, QueueModel::Mm1Parallel, FitSignal::ResponseTimeMs); }) ==
          ErrorKind::DegenerateSeries);
}

TEST_CASE("CPU fit and linear coefficient")
{
    std::vector<PerfSample> s;
    for (int i = 1; i <= 12; ++i) s.push_back({double(i) * 2.0, 2, double(i) * 2.0 / (2 * 8.0) * 100.0});
    const auto m = fit_perf_model(s, QueueModel::Mm1Parallel, FitSignal::CpuPercent, 50.0);
    CHECK(m.service_rate == doctest::Approx(8.0));
    REQUIRE(m.linear_coefficient);
    CHECK(*m.linear_coefficient == doctest::Approx(1.0 / 4.0));
}

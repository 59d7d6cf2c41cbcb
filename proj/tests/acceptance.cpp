// Acceptance run: one PASS/FAIL line per criterion, reports written twice and compared.

#include "ahpa/cli.hpp"
#include "ahpa/config.hpp"
#include "ahpa/pipeline.hpp"
#include "ahpa/report.hpp"
#include "ahpa/scenarios.hpp"
#include "ahpa/sim.hpp"

#include "oracles.hpp"
#include "plan_checks.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

using namespace ahpa;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
    double seconds = 0.0;
    double limit = 0.0;
};

class Run {
public:
    Run(fs::path dir, std::uint64_t seed) : dir_(std::move(dir)), seed_(seed) { fs::create_directories(dir_); }

    std::uint64_t seed() const { return seed_; }
    void write(const std::string& name, const std::string& body) { write_file_atomic(dir_ / name, body); }
    void write(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

    // Shared between criteria 6 and 7.
    std::optional<double> sp_ahpa_vr;

private:
    fs::path dir_;
    std::uint64_t seed_;
};

std::string fmt(const char* spec, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

PerfModel mm1(double u, double other = 0.0) { return {QueueModel::Mm1Parallel, u, other, std::nullopt}; }

// 1. Erlang C against the birth-death chain
Outcome erlang_oracle(Run& run)
{
    double worst = 0.0;
    Json rows = Json::array();
    for (int c = 1; c <= 20; ++c) {
        for (int k = 1; k <= 50; ++k) {
            const double a = c * double(k) / 51.0;
            const double ref = oracle::birth_death_wait_probability(c, a, oracle::truncation_for(c, a));
            const double got = erlang_c(c, a);
            worst = std::max(worst, std::abs(got - ref));
            rows.push_back({c, a, got, ref});
        }
    }
    run.write("c1_erlang.json", Json{{"max_abs_error", worst}, {"cases", rows}});
    return {worst <= 1e-9, "max |C - oracle| = " + fmt("%.3g", worst) + " over 1000 cases"};
}

// 2. M/M/1 inversion and minimality
Outcome inversion(Run& run)
{
    const int n16 = required_pods(mm1(10), 80.0, ScalingTarget::response_time(200.0), {1, 100000});
    Rng rng(run.seed());
    int broken = 0;
    Json cases = Json::array();
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform(1.0, 50.0);
        PerfModel m{i % 2 ? QueueModel::Mmc : QueueModel::Mm1Parallel, u, rng.uniform(0.0, 50.0), std::nullopt};
        const double target = m.other_latency_ms + 1000.0 / u * rng.uniform(1.01, 8.0);
        const double qps = rng.uniform(0.0, 2000.0);
        const int min_r = 1 + static_cast<int>(rng.below(4));
        const auto t = ScalingTarget::response_time(target);
        const int n = required_pods(m, qps, t, {min_r, 1'000'000});
        const bool meets = avg_rt_ms(m, qps, n) <= target * (1.0 + 1e-12);
        const bool minimal = n == min_r || !meets_target(m, qps, n - 1, t);
        if (!meets || !minimal) ++broken;
        cases.push_back({to_string(m.kind), u, qps, target, min_r, n});
    }
    run.write("c2_inversion.json", Json{{"closed_form_case", n16}, {"violations", broken}, {"cases", cases}});
    return {n16 == 16 && broken == 0,
            "qps=80 -> " + std::to_string(n16) + " pods, minimality violations " + std::to_string(broken) + "/1000"};
}

std::vector<PerfSample> mm1_samples(double u, double other, double noise, Rng& rng)
{
    std::vector<PerfSample> out;
    for (int pods = 1; pods <= 12; ++pods) {
        for (double load : {0.5, 2.0, 4.0, 6.0, 7.5, 8.5, 9.0}) {
            double rt = 1000.0 / (u - load) + other;
            if (noise > 0.0) rt *= 1.0 + rng.normal(0.0, noise);
            out.push_back({load * pods, pods, rt});
        }
    }
    return out;
}

// 3. Fit recovery
Outcome fit_recovery(Run& run)
{
    Rng rng(run.seed());
    const auto clean = fit_perf_model(mm1_samples(10, 20, 0.0, rng), QueueModel::Mm1Parallel, FitSignal::ResponseTimeMs);
    const auto noisy = fit_perf_model(mm1_samples(10, 20, 0.05, rng), QueueModel::Mm1Parallel, FitSignal::ResponseTimeMs);
    const double e_u = std::abs(clean.service_rate - 10.0) / 10.0;
    const double e_o = std::abs(clean.other_latency_ms - 20.0);
    const double e_n = std::abs(noisy.service_rate - 10.0) / 10.0;
    run.write("c3_fit.json", Json{{"noiseless", to_json(clean)}, {"noisy", to_json(noisy)}});
    return {e_u <= 0.01 && e_o <= 1.0 && e_n <= 0.05,
            "u err " + fmt("%.4f%%", 100 * e_u) + ", other err " + fmt("%.4f ms", e_o) + ", noisy u err " +
                fmt("%.3f%%", 100 * e_n)};
}

// 4. Decomposition recovery, clean and with spikes
Outcome decomposition(Run& run)
{
    const std::size_t n = 4320, p = 144;
    Rng rng(run.seed());
    std::vector<double> y(n), truth(n);
    for (std::size_t t = 0; t < n; ++t) {
        truth[t] = 3.0 * std::sin(2.0 * std::numbers::pi * double(t) / double(p));
        y[t] = 0.01 * double(t) + truth[t] + rng.normal(0.0, 0.1);
    }
    auto spiked = y;
    for (int k = 0; k < 10; ++k) spiked[rng.below(n)] += 50.0;

    auto measure = [&](const std::vector<double>& v) {
        const auto d = decompose_periodic(v, {p});
        double sx = 0, sy = 0, sxx = 0, sxy = 0, se = 0;
        const std::size_t lo = p, hi = n - p;
        for (std::size_t t = lo; t < hi; ++t) {
            sx += double(t);
            sy += d.trend[t];
            sxx += double(t) * double(t);
            sxy += double(t) * d.trend[t];
            se += (d.seasonals[0][t] - truth[t]) * (d.seasonals[0][t] - truth[t]);
        }
        const double m = double(hi - lo);
        return std::pair{(m * sxy - sx * sy) / (m * sxx - sx * sx), std::sqrt(se / m)};
    };
    const auto [slope, rmse] = measure(y);
    const auto [slope_s, rmse_s] = measure(spiked);
    auto ok = [](double s, double r) { return std::abs(s - 0.01) <= 0.05 * 0.01 && r <= 0.1; };
    run.write("c4_decompose.json",
              Json{{"clean", {{"slope", slope}, {"seasonal_rmse", rmse}}},
                   {"spiked", {{"slope", slope_s}, {"seasonal_rmse", rmse_s}}}});
    return {ok(slope, rmse) && ok(slope_s, rmse_s),
            "slope " + fmt("%.5f", slope) + "/" + fmt("%.5f", slope_s) + ", seasonal RMSE " + fmt("%.4f", rmse) + "/" +
                fmt("%.4f", rmse_s) + " (clean/spiked)"};
}

// 5. Walk-forward forecast accuracy on SP
Outcome forecast_accuracy(Run& run)
{
    const auto config = EngineConfig{};
    const auto trace = generate(default_scenario(ScenarioKind::SP, run.seed()));
    const std::size_t train = 10080, horizon = 60;
    double ape = 0.0;
    std::size_t count = 0;
    std::string csv = "ts,actual,point\n";
    for (std::size_t i = trace.size() - 10080; i + horizon <= trace.size(); i += horizon) {
        const auto f = forecast_window(trace.slice(i - train, train), horizon, config.pipeline_options()).forecast;
        for (std::size_t h = 0; h < horizon; ++h) {
            const auto& actual = trace[i + h];
            if (!actual || *actual <= 0.0) continue;
            ape += std::abs(f.point[h] - *actual) / *actual;
            ++count;
            csv += std::to_string(epoch_minutes(trace.time_at(i + h)) * 60) + "," + format_number(*actual) + "," +
                   format_number(f.point[h]) + "\n";
        }
    }
    const double mape = ape / double(count);
    run.write("c5_forecast.csv", csv);
    run.write("c5_forecast.json", Json{{"mape", mape}, {"points", count}});
    return {mape <= 0.10, "MAPE " + fmt("%.4f", mape) + " over " + std::to_string(count) + " points"};
}

SimOptions sim_options_for(const TimeSeries& trace)
{
    auto o = EngineConfig{}.sim_options();
    o.eval_start = steps_for(o.train_window, trace.step());
    return o;
}

void write_sim(Run& run, const std::string& tag, const SimReport& r)
{
    run.write(tag + "_" + r.policy + "_report.json", to_json(r));
    run.write(tag + "_" + r.policy + "_minutes.csv", sim_minutes_csv(r));
}

// 6. Policy ordering on SP
Outcome policy_ordering(Run& run)
{
    const auto trace = generate(default_scenario(ScenarioKind::SP, run.seed()));
    const auto o = sim_options_for(trace);
    const auto fix = run_policy(Policy::FixPod, trace, o);
    const auto hpa = run_policy(Policy::Hpa, trace, o);
    const auto ahpa = run_policy(Policy::Ahpa, trace, o);
    for (const auto* r : {&fix, &hpa, &ahpa}) write_sim(run, "c6_sp", *r);
    run.write("c6_table.txt", comparison_table({fix, hpa, ahpa}));
    run.sp_ahpa_vr = ahpa.violation_rate;

    const bool a = fix.violation_rate == 0.0 && fix.cost_pod_minutes > hpa.cost_pod_minutes &&
                   fix.cost_pod_minutes > ahpa.cost_pod_minutes;
    const bool b = ahpa.violation_rate <= 0.1 && ahpa.violation_rate <= hpa.violation_rate / 3.0;
    const bool c = hpa.cost_pod_minutes <= ahpa.cost_pod_minutes && ahpa.cost_pod_minutes <= fix.cost_pod_minutes;
    const bool d = ahpa.total_variation <= hpa.total_variation;
    auto mark = [](bool ok) { return ok ? "ok" : "FAIL"; };
    std::ostringstream s;
    s << "(a) " << mark(a) << " (b) " << mark(b) << " (c) " << mark(c) << " (d) " << mark(d) << "; VR fix/hpa/ahpa "
      << fmt("%.4f", fix.violation_rate) << "/" << fmt("%.4f", hpa.violation_rate) << "/"
      << fmt("%.4f", ahpa.violation_rate) << ", cost " << fix.cost_pod_minutes << "/" << hpa.cost_pod_minutes << "/"
      << ahpa.cost_pod_minutes << ", TV hpa/ahpa " << hpa.total_variation << "/" << ahpa.total_variation;
    return {a && b && c && d, s.str()};
}

// 7. Robustness scenarios
Outcome robustness(Run& run)
{
    if (!run.sp_ahpa_vr) {
        const auto sp = generate(default_scenario(ScenarioKind::SP, run.seed()));
        run.sp_ahpa_vr = run_ahpa(sp, sim_options_for(sp)).violation_rate;
    }
    const double base = *run.sp_ahpa_vr;
    bool pass = true;
    std::ostringstream s;
    s << "SP " << fmt("%.4f", base);
    Json summary = Json::object();
    for (auto kind : {ScenarioKind::Noisy, ScenarioKind::Missing, ScenarioKind::TrendChange}) {
        const auto trace = generate(default_scenario(kind, run.seed()));
        const auto r = run_ahpa(trace, sim_options_for(trace));
        write_sim(run, "c7_" + std::string(to_string(kind)), r);
        const double change = base > 0.0 ? std::abs(r.violation_rate - base) / base : (r.violation_rate > 0 ? 1e9 : 0.0);
        const bool ok = r.violation_rate <= 0.1 && change <= 1.0;
        pass = pass && ok;
        summary[std::string(to_string(kind))] = {{"violation_rate", r.violation_rate}, {"relative_change", change}};
        s << ", " << to_string(kind) << " " << fmt("%.4f", r.violation_rate) << " (" << fmt("%+.0f%%", 100 * change)
          << (ok ? "" : " FAIL") << ")";
    }
    run.write("c7_summary.json", summary);
    return {pass, s.str()};
}

// 8. Planner invariants on random cases
Outcome planner_suite(Run& run)
{
    std::mt19937_64 rng(run.seed());
    int broken = 0, refused = 0;
    std::string first;
    for (int i = 0; i < 10000; ++i) {
        auto c = plan_checks::random_case(rng);
        const std::size_t p = steps_for(c.spec.pending_time, Minutes{1});
        std::string why = plan_checks::shift_covers(c.required, shift_for_pending(c.required, p), p);
        try {
            const auto result = plan(c.forecast, c.model, c.spec, {.fallback_signal = c.reactive});
            if (why.empty()) why = plan_checks::structural(result, c.spec);
            if (why.empty()) why = plan_checks::never_below_reactive(c, result);
        } catch (const EngineError& e) {
            if (e.kind() != ErrorKind::InvalidConfig) why = e.what();
            ++refused;
        }
        if (!why.empty()) {
            if (first.empty()) first = "case " + std::to_string(i) + ": " + why;
            ++broken;
        }
    }
    run.write("c8_planner.json", Json{{"cases", 10000}, {"violations", broken}, {"refused_contradictory_cron", refused}});
    return {broken == 0, std::to_string(broken) + " violations in 10000 cases (" + std::to_string(refused) +
                             " refused for contradictory cron)" + (first.empty() ? "" : "; " + first)};
}

// 9. Full pipeline on 20160 points
Outcome pipeline_scale(Run& run)
{
    const auto config = EngineConfig{};
    const auto trace = generate(default_scenario(ScenarioKind::SP, run.seed()));
    const auto started = std::chrono::steady_clock::now();
    const auto p = plan_window(trace, 64, config.model, config.spec, std::nullopt, config.pipeline_options());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    const auto window = forecast_window(trace, 64, config.pipeline_options());
    run.write("c9_plan.jsonl", plan_jsonl(p));
    run.write("c9_periods.json", to_json(window.periods));
    return {secs < 10.0, std::to_string(trace.size()) + " points planned in " + fmt("%.2f s", secs)};
}

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome(Run&)> body;
};

std::map<std::string, std::string> read_tree(const fs::path& dir)
{
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::ifstream in(e.path(), std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        files[e.path().filename().string()] = s.str();
    }
    return files;
}

} // namespace

int main(int argc, char** argv)
{
    fs::path out = "acceptance_reports";
    std::uint64_t seed = 42;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        if (flag == "--out") out = argv[i + 1];
        else if (flag == "--seed") seed = std::stoull(argv[i + 1]);
    }
    const std::vector<Criterion> criteria{
        {1, "Erlang-C oracle equivalence", 5, erlang_oracle},
        {2, "M/M/1 inversion exactness", 1, inversion},
        {3, "Fit recovery", 2, fit_recovery},
        {4, "Decomposition recovery", 10, decomposition},
        {5, "Forecast accuracy", 60, forecast_accuracy},
        {6, "Policy ordering", 180, policy_ordering},
        {7, "Robustness", 600, robustness},
        {8, "Planner invariant suite", 30, planner_suite},
        {9, "Pipeline scale check", 10, pipeline_scale},
    };

    fs::remove_all(out);
    bool all = true;
    for (int pass = 1; pass <= 2; ++pass) {
        Run run(out / ("run" + std::to_string(pass)), seed);
        for (const auto& c : criteria) {
            const auto started = std::chrono::steady_clock::now();
            Outcome o;
            try {
                o = c.body(run);
            } catch (const std::exception& e) {
                o = {false, std::string("threw: ") + e.what()};
            }
            o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            if (pass == 2) continue;
            const bool in_time = o.seconds < c.limit_seconds;
            const bool ok = o.pass && in_time;
            all = all && ok;
            std::cout << (ok ? "PASS" : "FAIL") << "  [" << c.id << "] " << c.name << ": " << o.detail << " ("
                      << fmt("%.2f", o.seconds) << " s, limit " << fmt("%.0f", c.limit_seconds) << " s"
                      << (in_time ? "" : ", TOO SLOW") << ")" << std::endl;
        }
    }

    const auto a = read_tree(out / "run1");
    const auto b = read_tree(out / "run2");
    std::size_t differing = 0;
    for (const auto& [name, body] : a) {
        const auto it = b.find(name);
        if (it == b.end() || it->second != body) ++differing;
    }
    const bool same = differing == 0 && a.size() == b.size();
    all = all && same;
    std::cout << (same ? "PASS" : "FAIL") << "  [10] Determinism: " << a.size() << " report files, " << differing
              << " differ between two seeded runs" << std::endl;
    return all ? 0 : 1;
}

#include "ahpa/cli.hpp"

#include "ahpa/config.hpp"
#include "ahpa/ingest.hpp"
#include "ahpa/pipeline.hpp"
#include "ahpa/report.hpp"
#include "ahpa/scenarios.hpp"
#include "ahpa/sim.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

namespace ahpa {

namespace fs = std::filesystem;

void write_file_atomic(const fs::path& path, const std::string& content)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw EngineError(ErrorKind::IoFailure, "cannot write " + tmp.string());
        f << content;
        f.flush();
        if (!f) throw EngineError(ErrorKind::IoFailure, "short write on " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw EngineError(ErrorKind::IoFailure, "cannot move " + tmp.string() + " into place: " + ec.message());
}

std::string sha256_file(const fs::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw EngineError(ErrorKind::IoFailure, "cannot read " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    std::vector<char> buf(1 << 16);
    while (f) {
        f.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (f.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(f.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

namespace {

struct Globals {
    std::string config_path;
    std::string out;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

struct RunContext {
    std::string command;
    std::string subcommand;
    EngineConfig config;
    std::vector<fs::path> inputs;
    std::vector<fs::path> outputs;
};

void configure_logging(bool quiet)
{
    auto level = spdlog::level::warn;
    if (const char* env = std::getenv("AHPA_LOG")) level = spdlog::level::from_str(env);
    if (quiet) level = spdlog::level::off;
    spdlog::set_level(level);
}

EngineConfig resolve_config(const Globals& g, const std::string& spec_path)
{
    const std::string& path = spec_path.empty() ? g.config_path : spec_path;
    return path.empty() ? EngineConfig{} : load_config(path);
}

TimeSeries load_series(const fs::path& path, MetricKind metric, RunContext& ctx)
{
    ctx.inputs.push_back(path);
    return regularize(read_trace(path, metric), Minutes{1}, metric);
}

void emit(RunContext& ctx, const Globals& g, std::ostream& out, const std::string& name, const std::string& content)
{
    if (g.out.empty()) {
        out << content;
        return;
    }
    const auto path = fs::path(g.out) / name;
    write_file_atomic(path, content);
    ctx.outputs.push_back(path);
}

void write_manifest(const RunContext& ctx, const fs::path& path, double seconds)
{
    Json j;
    j["command"] = ctx.command;
    j["subcommand"] = ctx.subcommand;
    j["config"] = serialize_config(ctx.config);
    Json inputs = Json::array();
    for (const auto& p : ctx.inputs) inputs.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
    j["inputs"] = std::move(inputs);
    j["version"] = kVersion;
    j["duration_seconds"] = seconds;
    Json outputs = Json::array();
    for (const auto& p : ctx.outputs) outputs.push_back(p.string());
    j["outputs"] = std::move(outputs);
    write_file_atomic(path, j.dump(2) + "\n");
}

std::vector<PerfSample> read_samples(const fs::path& path, FitSignal signal)
{
    std::ifstream in(path);
    if (!in) throw EngineError(ErrorKind::IoFailure, "cannot open samples '" + path.string() + "'");
    std::vector<PerfSample> samples;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream row(line);
        PerfSample s;
        if (!(row >> s.qps >> s.pods >> s.observed)) {
            if (first) {
                first = false;
                continue;  // header
            }
            throw EngineError(ErrorKind::InvalidConfig, "malformed sample row: " + line);
        }
        first = false;
        samples.push_back(s);
    }
    (void)signal;
    return samples;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Predictive horizontal autoscaling engine and trace-replay simulator", "ahpa"};
    app.require_subcommand(1);
    app.fallthrough();
    app.failure_message(CLI::FailureMessage::help);
    app.set_version_flag("--version", kVersion);
    Globals g;
    app.add_option("--config", g.config_path, "Engine config file (INI)");
    app.add_option("--out", g.out, "Output directory (or .csv path for generate)");
    app.add_option("--seed", g.seed, "RNG seed");
    app.add_flag("--quiet", g.quiet, "Silence logging");

    // generate
    auto* gen = app.add_subcommand("generate", "Write a synthetic QPS trace");
    std::string kind = "SP";
    std::optional<std::size_t> length, period;
    std::optional<double> level, amplitude, noise;
    gen->add_option("--kind", kind, "NP|WP|SP|NOISY|MISSING|TREND_CHANGE");
    gen->add_option("--length", length, "Samples (minutes)");
    gen->add_option("--period", period, "Period in minutes");
    gen->add_option("--level", level, "Base QPS level");
    gen->add_option("--amplitude", amplitude, "Seasonal amplitude");
    gen->add_option("--noise", noise, "Noise standard deviation");

    std::string trace_path, metric_name = "QPS";
    auto add_trace = [&](CLI::App* sub, bool required) {
        auto* o = sub->add_option("--trace", trace_path, "Trace CSV or JSONL");
        if (required) o->required();
        sub->add_option("--metric", metric_name, "Metric kind of the trace");
    };

    auto* det = app.add_subcommand("detect", "Detect periods and print the report");
    add_trace(det, true);

    auto* dec = app.add_subcommand("decompose", "Trend/seasonal/residual CSV");
    add_trace(dec, true);
    std::vector<std::size_t> periods;
    dec->add_option("--period", periods, "Periods to extract (default: detected)");

    auto* fc = app.add_subcommand("forecast", "Point and upper-bound forecast CSV");
    add_trace(fc, true);
    std::size_t horizon = 60;
    std::optional<double> quantile, alpha, beta;
    fc->add_option("--horizon", horizon, "Forecast steps");
    fc->add_option("--quantile", quantile, "Residual quantile for the upper bound");
    fc->add_option("--alpha", alpha, "Holt level smoothing");
    fc->add_option("--beta", beta, "Holt slope smoothing");

    auto* fit = app.add_subcommand("fit", "Fit the performance model from qps,pods,rt_ms samples");
    std::string samples_path, model_kind = "MM1_PARALLEL", signal_name = "rt";
    std::optional<double> util_target;
    fit->add_option("--samples", samples_path, "CSV of qps,pods,observed")->required();
    fit->add_option("--kind", model_kind, "MM1_PARALLEL|MMC");
    fit->add_option("--signal", signal_name, "rt|cpu")->check(CLI::IsMember({"rt", "cpu"}));
    fit->add_option("--utilization-target", util_target, "Derive the linear coefficient for this target (%)");

    std::string spec_path;
    auto* pl = app.add_subcommand("plan", "Scaling plan for the window after the trace");
    add_trace(pl, true);
    std::optional<std::size_t> plan_horizon;
    pl->add_option("--spec", spec_path, "Engine config (same as --config)");
    pl->add_option("--horizon", plan_horizon, "Planning horizon in steps");

    auto* sim = app.add_subcommand("simulate", "Replay a trace under FixPod, HPA and AHPA");
    std::string policy = "all";
    std::optional<std::size_t> eval_start;
    add_trace(sim, true);
    sim->add_option("--policy", policy, "fixpod|hpa|ahpa|all")
        ->check(CLI::IsMember({"fixpod", "hpa", "ahpa", "all"}));
    sim->add_option("--spec", spec_path, "Engine config (same as --config)");
    sim->add_option("--eval-start", eval_start, "First evaluated minute (default: training window)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, err, err);
        return 1;
    }
    configure_logging(g.quiet);

    RunContext ctx;
    for (int i = 0; i < argc; ++i) {
        if (i) ctx.command += ' ';
        ctx.command += argv[i];
    }
    const auto started = std::chrono::steady_clock::now();
    fs::path manifest_dir = g.out;
    std::string manifest_name = "manifest.json";

    try {
        ctx.config = resolve_config(g, spec_path);
        if (!g.config_path.empty()) ctx.inputs.push_back(g.config_path);
        if (!spec_path.empty()) ctx.inputs.push_back(spec_path);
        const auto metric = parse_metric_kind(metric_name);
        auto pipeline = ctx.config.pipeline_options();

        if (*gen) {
            ctx.subcommand = "generate";
            auto spec = default_scenario(parse_scenario_kind(kind), g.seed.value_or(42));
            if (length) spec.length_minutes = *length;
            if (period) spec.period_minutes = *period;
            if (level) spec.base_level = *level;
            if (amplitude) spec.amplitude = *amplitude;
            if (noise) spec.noise_sigma = *noise;
            const auto csv = trace_csv(generate(spec));
            if (g.out.empty()) {
                out << csv;
            } else {
                fs::path target = g.out;
                if (target.extension() == ".csv") {
                    manifest_dir = target.parent_path();
                    manifest_name = target.stem().string() + ".manifest.json";
                } else {
                    target /= std::string(to_string(spec.kind)) + "_" + std::to_string(spec.seed) + ".csv";
                }
                write_file_atomic(target, csv);
                ctx.outputs.push_back(target);
            }
        } else if (*det) {
            ctx.subcommand = "detect";
            auto series = truncate_retention(load_series(trace_path, metric, ctx), ctx.config.simulation.retention);
            const auto report = detect_periods(repair(series, ctx.config.repair), pipeline.detect);
            emit(ctx, g, out, "detect.json", to_json(report).dump(2) + "\n");
        } else if (*dec) {
            ctx.subcommand = "decompose";
            auto series = truncate_retention(load_series(trace_path, metric, ctx), ctx.config.simulation.retention);
            const auto repaired = repair(series, ctx.config.repair);
            if (periods.empty()) periods = detect_periods(repaired, pipeline.detect).periods;
            const auto d = periods.empty() ? decompose_trend_only(repaired)
                                           : decompose_periodic(repaired, periods, pipeline.decompose);
            emit(ctx, g, out, "decomposition.csv", decomposition_csv(series, d));
        } else if (*fc) {
            ctx.subcommand = "forecast";
            if (quantile) ctx.config.forecast.quantile = *quantile;
            if (alpha) ctx.config.forecast.alpha = *alpha;
            if (beta) ctx.config.forecast.beta = *beta;
            pipeline = ctx.config.pipeline_options();
            auto series = truncate_retention(load_series(trace_path, metric, ctx), ctx.config.simulation.retention);
            const auto window = forecast_window(series, horizon, pipeline);
            emit(ctx, g, out, "forecast.csv", forecast_csv(window.forecast));
        } else if (*fit) {
            ctx.subcommand = "fit";
            ctx.inputs.push_back(samples_path);
            const auto signal = signal_name == "cpu" ? FitSignal::CpuPercent : FitSignal::ResponseTimeMs;
            const auto samples = read_samples(samples_path, signal);
            const auto model = fit_perf_model(samples, parse_queue_model(model_kind), signal, util_target);
            emit(ctx, g, out, "model.json", to_json(model).dump(2) + "\n");
        } else if (*pl) {
            ctx.subcommand = "plan";
            auto series = truncate_retention(load_series(trace_path, metric, ctx), ctx.config.simulation.retention);
            const auto& spec = ctx.config.spec;
            const std::size_t h = plan_horizon.value_or(
                steps_for(ctx.config.simulation.replan_every, series.step()) + steps_for(spec.pending_time, series.step()) +
                std::max<std::size_t>(1, steps_for(spec.action_interval, series.step())));
            std::optional<int> fallback;
            for (std::size_t i = series.size(); i-- > 0;) {
                if (!series[i]) continue;
                try {
                    fallback = required_pods(ctx.config.model, *series[i], ScalingTarget::from_spec(spec),
                                             {spec.min_replicas, spec.max_replicas});
                } catch (const EngineError& e) {
                    if (e.kind() != ErrorKind::NoFeasiblePods) throw;
                    fallback = spec.max_replicas;
                }
                break;
            }
            const auto p = plan_window(series, h, ctx.config.model, spec, fallback, pipeline);
            emit(ctx, g, out, "plan.jsonl", plan_jsonl(p));
            if (!g.out.empty()) emit(ctx, g, out, "plan.json", to_json(p).dump(2) + "\n");
        } else if (*sim) {
            ctx.subcommand = "simulate";
            const auto series = load_series(trace_path, metric, ctx);
            auto options = ctx.config.sim_options();
            options.eval_start =
                eval_start.value_or(std::min(series.size() - 1, steps_for(options.train_window, series.step())));
            std::vector<Policy> policies;
            if (policy == "all") {
                policies = {Policy::FixPod, Policy::Hpa, Policy::Ahpa};
            } else {
                policies = {parse_policy(policy)};
            }
            std::vector<SimReport> reports;
            for (auto p : policies) {
                reports.push_back(run_policy(p, series, options));
                const auto& r = reports.back();
                if (!g.out.empty()) {
                    emit(ctx, g, out, r.policy + "_report.json", to_json(r).dump(2) + "\n");
                    emit(ctx, g, out, r.policy + "_minutes.csv", sim_minutes_csv(r));
                }
            }
            if (!g.quiet || g.out.empty()) {
                if (g.out.empty() && policies.size() == 1) {
                    out << to_json(reports.front()).dump(2) << "\n";
                } else {
                    out << comparison_table(reports);
                }
            }
        }
        if (!g.out.empty() && !ctx.outputs.empty()) {
            const double seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            write_manifest(ctx, manifest_dir / manifest_name, seconds);
        }
    } catch (const EngineError& e) {
        Json j{{"error", std::string(to_string(e.kind()))}, {"detail", e.detail()}};
        err << j.dump() << "\n";
        return 2;
    } catch (const fs::filesystem_error& e) {
        Json j{{"error", "IO_FAILURE"}, {"detail", e.what()}};
        err << j.dump() << "\n";
        return 2;
    }
    return 0;
}

} // namespace ahpa

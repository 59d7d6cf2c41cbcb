#include "ahpa/perfmodel.hpp"

#include "ahpa/numeric.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace ahpa {

namespace {

constexpr double kRelTol = 1e-12;

bool rt_stable(const PerfModel& model, double qps, int pods)
{
    return qps < static_cast<double>(pods) * model.service_rate;
}

} // namespace

std::string_view to_string(QueueModel kind)
{
    return kind == QueueModel::Mm1Parallel ? "MM1_PARALLEL" : "MMC";
}

QueueModel parse_queue_model(std::string_view text)
{
    std::string key(text);
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (key == "MM1_PARALLEL" || key == "MM1") return QueueModel::Mm1Parallel;
    if (key == "MMC") return QueueModel::Mmc;
    throw EngineError(ErrorKind::InvalidConfig, "unknown queue model '" + std::string(text) + "'");
}

ScalingTarget ScalingTarget::from_spec(const AutoscalerSpec& spec)
{
    if (spec.target_rt_ms) return response_time(*spec.target_rt_ms);
    if (spec.average_utilization) return utilization(*spec.average_utilization);
    throw EngineError(ErrorKind::InvalidConfig, "spec carries no scaling target");
}

double erlang_c(int servers, double offered_load)
{
    if (servers < 1) {
        throw EngineError(ErrorKind::InvalidConfig, "erlang_c needs at least one server");
    }
    if (!(offered_load >= 0.0)) {
        throw EngineError(ErrorKind::InvalidConfig, "offered load must be non-negative");
    }
    const double c = static_cast<double>(servers);
    if (offered_load >= c) {
        throw EngineError(ErrorKind::UnstableQueue,
                          "offered load " + std::to_string(offered_load) + " >= servers " + std::to_string(servers));
    }
    if (offered_load == 0.0) return 0.0;
    // Erlang B by recurrence, then C = c*B / (c - a*(1 - B)).
    double b = 1.0;
    for (int k = 1; k <= servers; ++k) {
        b = offered_load * b / (static_cast<double>(k) + offered_load * b);
    }
    return c * b / (c - offered_load * (1.0 - b));
}

double avg_rt_ms(const PerfModel& model, double qps, int pods)
{
    if (pods < 1) throw EngineError(ErrorKind::InvalidConfig, "pods must be >= 1");
    if (qps < 0.0) throw EngineError(ErrorKind::InvalidConfig, "qps must be non-negative");
    const double mu = model.service_rate;
    if (model.kind == QueueModel::Mm1Parallel) {
        const double per_pod = qps / static_cast<double>(pods);
        if (per_pod >= mu) {
            throw EngineError(ErrorKind::UnstableQueue, "per-pod load exceeds the service rate");
        }
        return 1000.0 / (mu - per_pod) + model.other_latency_ms;
    }
    const double a = qps / mu;
    const double wait = erlang_c(pods, a) / (static_cast<double>(pods) * mu - qps);
    return 1000.0 * (wait + 1.0 / mu) + model.other_latency_ms;
}

double utilization(const PerfModel& model, double qps, int pods)
{
    return qps / (static_cast<double>(pods) * model.service_rate);
}

bool meets_target(const PerfModel& model, double qps, int pods, const ScalingTarget& target)
{
    if (pods < 1) return false;
    if (target.kind == ScalingTarget::Kind::Utilization) {
        return qps <= static_cast<double>(pods) * model.service_rate * (target.value / 100.0) * (1.0 + kRelTol);
    }
    if (!rt_stable(model, qps, pods)) return false;
    return avg_rt_ms(model, qps, pods) <= target.value * (1.0 + kRelTol);
}

int required_pods(const PerfModel& model, double qps, const ScalingTarget& target, ReplicaBounds bounds)
{
    if (bounds.min < 1 || bounds.max < bounds.min) {
        throw EngineError(ErrorKind::InvalidConfig, "replica bounds must satisfy 1 <= min <= max");
    }
    if (!(model.service_rate > 0.0)) {
        throw EngineError(ErrorKind::InvalidConfig, "service rate must be positive");
    }
    if (qps <= 0.0) return bounds.min;

    const double mu = model.service_rate;
    double guess = 1.0;
    if (target.kind == ScalingTarget::Kind::Utilization) {
        if (!(target.value > 0.0)) throw EngineError(ErrorKind::InvalidConfig, "utilization target must be positive");
        guess = std::ceil(qps / (mu * target.value / 100.0));
    } else {
        const double budget = target.value - model.other_latency_ms;
        if (!(budget > 1000.0 / mu)) {
            throw EngineError(ErrorKind::NoFeasiblePods, "RT target is below the bare service time");
        }
        if (model.kind == QueueModel::Mm1Parallel) {
            guess = std::ceil(qps / (mu - 1000.0 / budget));
        } else {
            guess = std::floor(qps / mu) + 1.0;
        }
    }
    const double cap = static_cast<double>(bounds.max);
    if (guess > cap) {
        throw EngineError(ErrorKind::NoFeasiblePods,
                          "needs more than max_replicas=" + std::to_string(bounds.max) + " pods");
    }
    int n = std::max(1, static_cast<int>(guess));
    while (n > 1 && meets_target(model, qps, n - 1, target)) --n;
    while (!meets_target(model, qps, n, target)) {
        if (n >= bounds.max) {
            throw EngineError(ErrorKind::NoFeasiblePods,
                              "needs more than max_replicas=" + std::to_string(bounds.max) + " pods");
        }
        ++n;
    }
    return std::max(n, bounds.min);
}

namespace {

double predicted_queue_rt_ms(QueueModel kind, double u, const PerfSample& s)
{
    PerfModel m{kind, u, 0.0, std::nullopt};
    return avg_rt_ms(m, s.qps, s.pods);
}

struct RtFit {
    double other = 0.0;
    double sse = std::numeric_limits<double>::infinity();
};

RtFit evaluate_rt_fit(QueueModel kind, double u, std::span<const PerfSample> samples)
{
    std::vector<double> queue(samples.size());
    double mean_gap = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        queue[i] = predicted_queue_rt_ms(kind, u, samples[i]);
        mean_gap += samples[i].observed - queue[i];
    }
    RtFit fit;
    fit.other = std::max(0.0, mean_gap / static_cast<double>(samples.size()));
    fit.sse = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double r = queue[i] + fit.other - samples[i].observed;
        fit.sse += r * r;
    }
    return fit;
}

} // namespace

PerfModel fit_perf_model(std::span<const PerfSample> samples, QueueModel kind, FitSignal signal,
                         std::optional<double> utilization_target_percent)
{
    if (samples.size() < 10) {
        throw EngineError(ErrorKind::InsufficientData, "model fitting needs at least 10 samples");
    }
    std::vector<double> loads;
    loads.reserve(samples.size());
    for (const auto& s : samples) {
        if (s.pods < 1 || s.qps < 0.0 || !std::isfinite(s.observed)) {
            throw EngineError(ErrorKind::InvalidConfig, "malformed performance sample");
        }
        loads.push_back(s.qps / static_cast<double>(s.pods));
    }
    std::vector<double> levels = loads;
    std::sort(levels.begin(), levels.end());
    const double top = levels.back();
    levels.erase(std::unique(levels.begin(), levels.end(),
                             [&](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, top); }),
                 levels.end());
    if (levels.size() == 1) {
        throw EngineError(ErrorKind::DegenerateSeries, "all samples share one per-pod load level");
    }
    if (levels.size() < 3) {
        throw EngineError(ErrorKind::InsufficientData, "samples span fewer than 3 per-pod load levels");
    }

    PerfModel model;
    model.kind = kind;
    if (signal == FitSignal::CpuPercent) {
        std::vector<double> rates;
        for (const auto& s : samples) {
            if (s.observed > 0.0 && s.qps > 0.0) {
                rates.push_back(s.qps / (static_cast<double>(s.pods) * s.observed / 100.0));
            }
        }
        if (rates.empty()) {
            throw EngineError(ErrorKind::InsufficientData, "no sample with positive CPU and load");
        }
        model.service_rate = numeric::median(rates);
    } else {
        if (!(top > 0.0)) {
            throw EngineError(ErrorKind::DegenerateSeries, "no sample carries load");
        }
        const double lo = top * (1.0 + 1e-9);
        const double hi = top * 100.0;
        // Coarse log-spaced scan brackets the minimum, golden-section polishes it.
        constexpr int kGrid = 200;
        std::vector<double> grid(kGrid + 1);
        int best = 0;
        double best_sse = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= kGrid; ++i) {
            grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / kGrid);
            const double sse = evaluate_rt_fit(kind, grid[i], samples).sse;
            if (sse < best_sse) {
                best_sse = sse;
                best = i;
            }
        }
        double a = grid[std::max(0, best - 1)];
        double b = grid[std::min(kGrid, best + 1)];
        const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = b - inv_phi * (b - a);
        double x2 = a + inv_phi * (b - a);
        double f1 = evaluate_rt_fit(kind, x1, samples).sse;
        double f2 = evaluate_rt_fit(kind, x2, samples).sse;
        while ((b - a) > 1e-6 * std::max(1e-12, 0.5 * (a + b))) {
            if (f1 <= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = evaluate_rt_fit(kind, x1, samples).sse;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = evaluate_rt_fit(kind, x2, samples).sse;
            }
        }
        model.service_rate = 0.5 * (a + b);
        model.other_latency_ms = evaluate_rt_fit(kind, model.service_rate, samples).other;
    }

    for (double load : loads) {
        if (signal == FitSignal::ResponseTimeMs && load >= model.service_rate) {
            throw EngineError(ErrorKind::UnstableQueue, "a sample is unstable under the fitted service rate");
        }
    }
    if (utilization_target_percent) {
        if (!(*utilization_target_percent > 0.0)) {
            throw EngineError(ErrorKind::InvalidConfig, "utilization target must be positive");
        }
        model.linear_coefficient = 1.0 / (model.service_rate * *utilization_target_percent / 100.0);
    }
    return model;
}

} // namespace ahpa

#include "ahpa/sim.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <spdlog/spdlog.h>

namespace ahpa {

std::string_view to_string(Policy policy)
{
    switch (policy) {
    case Policy::FixPod: return "fixpod";
    case Policy::Hpa: return "hpa";
    case Policy::Ahpa: return "ahpa";
    }
    return "fixpod";
}

Policy parse_policy(std::string_view text)
{
    std::string key(text);
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (key == "fixpod") return Policy::FixPod;
    if (key == "hpa") return Policy::Hpa;
    if (key == "ahpa") return Policy::Ahpa;
    throw EngineError(ErrorKind::InvalidConfig, "unknown policy '" + std::string(text) + "'");
}

ClusterState::ClusterState(int ready, TimePoint now) : ready_(ready), time_(now)
{
    if (ready < 1) throw EngineError(ErrorKind::InvalidConfig, "cluster needs at least one ready pod");
}

int ClusterState::pending() const
{
    int n = 0;
    for (const auto& b : pending_) n += b.count;
    return n;
}

void ClusterState::advance(TimePoint now)
{
    time_ = now;
    auto it = pending_.begin();
    while (it != pending_.end() && it->ready_at <= now) {
        ready_ += it->count;
        ++it;
    }
    pending_.erase(pending_.begin(), it);
}

bool ClusterState::scale_to(int target, Minutes pending_time)
{
    target = std::max(1, target);
    const int current = total();
    if (target == current) return false;
    if (target > current) {
        if (pending_time.count() <= 0) {
            ready_ += target - current;
        } else {
            pending_.push_back({time_ + pending_time, target - current});
        }
        return true;
    }
    int remove = current - target;
    while (remove > 0 && !pending_.empty()) {
        auto& last = pending_.back();
        const int take = std::min(remove, last.count);
        last.count -= take;
        remove -= take;
        if (last.count == 0) pending_.pop_back();
    }
    ready_ -= remove;
    return true;
}

Observation step(const ClusterState& state, double qps, const PerfModel& model, const ScalingTarget& target)
{
    Observation o;
    o.utilization = std::min(1000.0, 100.0 * utilization(model, qps, state.ready()));
    if (target.kind == ScalingTarget::Kind::ResponseTime && qps < state.ready() * model.service_rate) {
        o.rt_ms = avg_rt_ms(model, qps, state.ready());
    }
    o.violation = !meets_target(model, qps, state.ready(), target);
    return o;
}

namespace {

std::size_t minutes_to_steps(Minutes d, Minutes step)
{
    return steps_for(d, step);
}

struct Observed {
    bool present = false;
    double qps = 0.0;
    int ready = 1;
    double ratio = 1.0;  // observed metric / target metric
};

int initial_pods(const TimeSeries& trace, const SimOptions& o, const ScalingTarget& target)
{
    if (o.initial_pods > 0) return o.initial_pods;
    for (const auto& v : trace.values()) {
        if (!v) continue;
        try {
            return required_pods(o.model, *v, target, {o.spec.min_replicas, o.spec.max_replicas});
        } catch (const EngineError& e) {
            if (e.kind() != ErrorKind::NoFeasiblePods) throw;
            return o.spec.max_replicas;
        }
    }
    return o.spec.min_replicas;
}

class Reactive {
public:
    Reactive(const SimOptions& o) : o_(o)
    {
        sync_ = std::max<std::size_t>(1, minutes_to_steps(o.sync_period, Minutes{1}));
        window_ = minutes_to_steps(o.stabilization_window, Minutes{1});
    }

    std::optional<int> decide(std::size_t i, const ClusterState& st, const std::vector<Observed>& seen)
    {
        if (i == 0 || i % sync_ != 0 || !seen[i - 1].present) return std::nullopt;
        const auto& last = seen[i - 1];
        int desired = st.total();
        if (std::abs(last.ratio - 1.0) > o_.hpa_tolerance) {
            desired = static_cast<int>(std::ceil(last.ready * last.ratio - 1e-9));
        }
        desired = std::clamp(desired, o_.spec.min_replicas, o_.spec.max_replicas);
        recs_.push_back({i, desired});
        while (!recs_.empty() && recs_.front().first + window_ <= i) recs_.pop_front();
        int final_target = desired;
        if (desired < st.total()) {
            for (const auto& r : recs_) final_target = std::max(final_target, r.second);
            final_target = std::min(final_target, st.total());
        }
        if (final_target == st.total()) return std::nullopt;
        return final_target;
    }

private:
    const SimOptions& o_;
    std::size_t sync_ = 1;
    std::size_t window_ = 5;
    std::deque<std::pair<std::size_t, int>> recs_;
};

template <class Decide>
SimReport simulate(const TimeSeries& trace, const SimOptions& o, std::string name, Decide&& decide)
{
    validate_spec(o.spec, trace.step());
    const auto target = ScalingTarget::from_spec(o.spec);
    const std::size_t n = trace.size();
    if (o.eval_start >= n) throw EngineError(ErrorKind::InsufficientData, "evaluation window is empty");

    ClusterState state(initial_pods(trace, o, target), trace.start());
    std::vector<Observed> seen(n);
    SimReport r;
    r.policy = std::move(name);
    r.start = trace.time_at(o.eval_start);
    const std::size_t len = n - o.eval_start;
    r.pod_trace.reserve(len);
    r.qps_trace.reserve(len);
    r.utilization_trace.reserve(len);
    r.violation_trace.reserve(len);

    for (std::size_t i = 0; i < n; ++i) {
        state.advance(trace.time_at(i));
        if (auto want = decide(i, state, seen)) {
            if (state.scale_to(*want, o.spec.pending_time) && i >= o.eval_start) ++r.action_count;
        }
        const auto& q = trace[i];
        Observation obs;
        if (q) {
            obs = step(state, *q, o.model, target);
            auto& s = seen[i];
            s.present = true;
            s.qps = *q;
            s.ready = state.ready();
            if (target.kind == ScalingTarget::Kind::Utilization) {
                s.ratio = obs.utilization / target.value;
            } else {
                s.ratio = obs.rt_ms ? *obs.rt_ms / target.value : 10.0;
            }
        }
        if (i < o.eval_start) continue;
        const int pods = state.total();
        if (!r.pod_trace.empty()) r.total_variation += std::abs(pods - r.pod_trace.back());
        r.pod_trace.push_back(pods);
        r.cost_pod_minutes += pods;
        r.max_pods = std::max(r.max_pods, pods);
        r.qps_trace.push_back(q);
        r.utilization_trace.push_back(q ? std::optional<double>(obs.utilization) : std::nullopt);
        r.violation_trace.push_back(q && obs.violation);
        if (q) {
            ++r.evaluated_minutes;
            if (obs.violation) ++r.violating_minutes;
        }
    }
    r.violation_rate = r.evaluated_minutes == 0
                           ? 0.0
                           : static_cast<double>(r.violating_minutes) / static_cast<double>(r.evaluated_minutes);
    return r;
}

int reactive_requirement(double qps, const SimOptions& o, const ScalingTarget& target)
{
    try {
        return required_pods(o.model, qps, target, {o.spec.min_replicas, o.spec.max_replicas});
    } catch (const EngineError& e) {
        if (e.kind() != ErrorKind::NoFeasiblePods) throw;
        return o.spec.max_replicas;
    }
}

} // namespace

int peak_required_pods(const TimeSeries& trace, const SimOptions& options)
{
    const auto target = ScalingTarget::from_spec(options.spec);
    int peak = options.spec.min_replicas;
    for (std::size_t i = options.eval_start; i < trace.size(); ++i) {
        if (trace[i]) peak = std::max(peak, reactive_requirement(*trace[i], options, target));
    }
    return peak;
}

SimReport run_fixpod(const TimeSeries& trace, int pods, const SimOptions& options)
{
    auto o = options;
    o.initial_pods = pods;
    return simulate(trace, o, "fixpod", [](std::size_t, const ClusterState&, const std::vector<Observed>&) {
        return std::optional<int>{};
    });
}

SimReport run_hpa(const TimeSeries& trace, const SimOptions& options)
{
    Reactive hpa(options);
    return simulate(trace, options, "hpa", [&](std::size_t i, const ClusterState& st, const std::vector<Observed>& seen) {
        return hpa.decide(i, st, seen);
    });
}

SimReport run_ahpa(const TimeSeries& trace, const SimOptions& options)
{
    const std::size_t train = minutes_to_steps(options.train_window, trace.step());
    const std::size_t every = std::max<std::size_t>(1, minutes_to_steps(options.replan_every, trace.step()));
    if (trace.size() <= train) {
        throw EngineError(ErrorKind::InsufficientData, "trace must be longer than the training window");
    }
    const auto target = ScalingTarget::from_spec(options.spec);
    const std::size_t horizon = every + minutes_to_steps(options.spec.pending_time, trace.step()) +
                                std::max<std::size_t>(1, minutes_to_steps(options.spec.action_interval, trace.step()));

    Reactive hpa(options);
    std::vector<ScalingAction> actions;
    std::size_t next_action = 0;
    bool reactive_mode = true;
    std::size_t failed = 0;

    auto report = simulate(trace, options, "ahpa",
                           [&](std::size_t i, const ClusterState& st, const std::vector<Observed>& seen) -> std::optional<int> {
        if (i >= train && (i - train) % every == 0) {
            std::optional<int> fallback;
            for (std::size_t j = i; j-- > 0 && !fallback;) {
                if (seen[j].present) fallback = reactive_requirement(seen[j].qps, options, target);
                if (i - j > every) break;
            }
            try {
                auto p = plan_window(trace.slice(i - train, train), horizon, options.model, options.spec, fallback,
                                     options.pipeline);
                actions = std::move(p.actions);
                next_action = 0;
                reactive_mode = !p.execute;
            } catch (const EngineError& e) {
                spdlog::debug("replan at minute {} failed ({}): {}", i, to_string(e.kind()), e.detail());
                actions.clear();
                reactive_mode = true;
                ++failed;
            }
        }
        if (i < train || reactive_mode) return hpa.decide(i, st, seen);
        hpa.decide(i, st, seen);
        const auto now = trace.time_at(i);
        std::optional<int> want;
        while (next_action < actions.size() && actions[next_action].issue_time <= now) {
            want = actions[next_action].target_replicas;
            ++next_action;
        }
        return want;
    });
    report.fallback_windows = failed;
    return report;
}

SimReport run_policy(Policy policy, const TimeSeries& trace, const SimOptions& options)
{
    switch (policy) {
    case Policy::FixPod: return run_fixpod(trace, peak_required_pods(trace, options), options);
    case Policy::Hpa: return run_hpa(trace, options);
    case Policy::Ahpa: return run_ahpa(trace, options);
    }
    throw EngineError(ErrorKind::InvalidConfig, "unknown policy");
}

} // namespace ahpa

#include "ahpa/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace ahpa {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string_view s)
{
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t next = s.find(sep, pos);
        const auto piece = trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (!piece.empty()) out.push_back(piece);
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const char* what)
{
    throw EngineError(ErrorKind::InvalidConfig, key + " = '" + value + "': " + what);
}

double to_double(const std::string& key, const std::string& value)
{
    double v = 0.0;
    const auto s = trim(value);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) bad(key, value, "expected a number");
    return v;
}

long long to_integer(const std::string& key, const std::string& value)
{
    long long v = 0;
    const auto s = trim(value);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) bad(key, value, "expected an integer");
    return v;
}

std::string fmt(double v)
{
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

const std::map<std::string, std::set<std::string>>& schema()
{
    static const std::map<std::string, std::set<std::string>> keys{
        {"autoscaler",
         {"scale_target_ref", "metric", "average_utilization", "target_rt_ms", "scale_strategy", "max_replicas",
          "min_replicas", "instance_bounds", "cron_rules", "pending_time", "action_interval"}},
        {"perf_model", {"kind", "service_rate", "other_latency_ms", "linear_coefficient"}},
        {"repair", {"max_missing_ratio", "z_threshold"}},
        {"detect", {"max_periods", "strength_threshold"}},
        {"forecast", {"alpha", "beta", "quantile"}},
        {"simulation",
         {"sync_period", "stabilization_window", "hpa_tolerance", "train_window", "replan_every",
          "phase_neighborhood", "retention"}},
    };
    return keys;
}

InstanceBound parse_bound(const std::string& text)
{
    const auto slash = text.find('/');
    if (slash == std::string::npos) bad("instance_bounds", text, "expected start/end");
    std::int64_t a = 0, b = 0;
    if (!parse_rfc3339(trim(text.substr(0, slash)), a) || !parse_rfc3339(trim(text.substr(slash + 1)), b)) {
        bad("instance_bounds", text, "expected RFC3339 timestamps");
    }
    return {TimePoint{std::chrono::floor<Minutes>(std::chrono::seconds{a})},
            TimePoint{std::chrono::floor<Minutes>(std::chrono::seconds{b})}};
}

CronRule parse_cron(const std::string& text)
{
    std::istringstream in(text);
    CronRule rule;
    std::string min_s, max_s, extra;
    if (!(in >> rule.schedule >> min_s >> max_s) || (in >> extra)) {
        bad("cron_rules", text, "expected 'HH:MM-HH:MM forced_min forced_max'");
    }
    rule.forced_min = static_cast<int>(to_integer("cron_rules", min_s));
    rule.forced_max = static_cast<int>(to_integer("cron_rules", max_s));
    return rule;
}

} // namespace

Minutes parse_duration(std::string_view text)
{
    const auto s = trim(text);
    if (s.empty()) bad("duration", s, "empty");
    long long scale = 1;
    std::string digits = s;
    switch (s.back()) {
    case 'm': scale = 1; digits.pop_back(); break;
    case 'h': scale = 60; digits.pop_back(); break;
    case 'd': scale = 24 * 60; digits.pop_back(); break;
    default: break;
    }
    return Minutes{to_integer("duration", digits) * scale};
}

std::string format_duration(Minutes d)
{
    return std::to_string(d.count()) + "m";
}

PipelineOptions EngineConfig::pipeline_options() const
{
    PipelineOptions o;
    o.repair = repair;
    o.detect.max_periods = detect.max_periods;
    o.detect.strength_threshold = detect.strength_threshold;
    o.forecast.alpha = forecast.alpha;
    o.forecast.beta = forecast.beta;
    o.forecast.quantile = forecast.quantile;
    o.decompose.phase_neighborhood = simulation.phase_neighborhood;
    return o;
}

SimOptions EngineConfig::sim_options() const
{
    SimOptions o;
    o.model = model;
    o.spec = spec;
    o.sync_period = simulation.sync_period;
    o.stabilization_window = simulation.stabilization_window;
    o.hpa_tolerance = simulation.hpa_tolerance;
    o.train_window = simulation.train_window;
    o.replan_every = simulation.replan_every;
    o.pipeline = pipeline_options();
    return o;
}

EngineConfig parse_config(const std::string& text)
{
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw EngineError(ErrorKind::InvalidConfig, std::string("config syntax: ") + e.what());
    }
    const auto& known = schema();
    // read_ini drops sections without keys, so headers are checked on the raw text too.
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] != '[') continue;
        const auto close = line.find(']', first);
        if (close == std::string::npos) continue;
        const auto name = line.substr(first + 1, close - first - 1);
        if (!known.contains(name)) throw EngineError(ErrorKind::InvalidConfig, "unknown section [" + name + "]");
    }
    for (const auto& [section, body] : tree) {
        const auto it = known.find(section);
        if (it == known.end()) throw EngineError(ErrorKind::InvalidConfig, "unknown section [" + section + "]");
        for (const auto& [key, value] : body) {
            if (!it->second.count(key)) {
                throw EngineError(ErrorKind::InvalidConfig, "unknown key '" + key + "' in [" + section + "]");
            }
            (void)value;
        }
    }

    EngineConfig c;
    auto get = [&](const char* section, const char* key) -> std::optional<std::string> {
        auto v = tree.get_optional<std::string>(pt::ptree::path_type(std::string(section) + "." + key));
        if (!v) return std::nullopt;
        return trim(*v);
    };

    auto& s = c.spec;
    if (auto v = get("autoscaler", "scale_target_ref")) s.scale_target_ref = *v;
    if (auto v = get("autoscaler", "metric")) s.metric = parse_metric_kind(*v);
    const auto util = get("autoscaler", "average_utilization");
    const auto rt = get("autoscaler", "target_rt_ms");
    if (rt) {
        s.target_rt_ms = to_double("target_rt_ms", *rt);
        s.average_utilization.reset();
    }
    if (util) s.average_utilization = to_double("average_utilization", *util);
    if (auto v = get("autoscaler", "scale_strategy")) s.scale_strategy = parse_scale_strategy(*v);
    if (auto v = get("autoscaler", "max_replicas")) s.max_replicas = static_cast<int>(to_integer("max_replicas", *v));
    if (auto v = get("autoscaler", "min_replicas")) s.min_replicas = static_cast<int>(to_integer("min_replicas", *v));
    if (auto v = get("autoscaler", "instance_bounds")) {
        for (const auto& item : split(*v, ',')) s.instance_bounds.push_back(parse_bound(item));
    }
    if (auto v = get("autoscaler", "cron_rules")) {
        for (const auto& item : split(*v, ',')) s.cron_rules.push_back(parse_cron(item));
    }
    if (auto v = get("autoscaler", "pending_time")) s.pending_time = parse_duration(*v);
    if (auto v = get("autoscaler", "action_interval")) s.action_interval = parse_duration(*v);

    auto& m = c.model;
    if (auto v = get("perf_model", "kind")) m.kind = parse_queue_model(*v);
    if (auto v = get("perf_model", "service_rate")) m.service_rate = to_double("service_rate", *v);
    if (auto v = get("perf_model", "other_latency_ms")) m.other_latency_ms = to_double("other_latency_ms", *v);
    if (auto v = get("perf_model", "linear_coefficient")) m.linear_coefficient = to_double("linear_coefficient", *v);
    if (!(m.service_rate > 0.0)) throw EngineError(ErrorKind::InvalidConfig, "service_rate must be positive");
    if (m.other_latency_ms < 0.0) throw EngineError(ErrorKind::InvalidConfig, "other_latency_ms must be >= 0");

    if (auto v = get("repair", "max_missing_ratio")) c.repair.max_missing_ratio = to_double("max_missing_ratio", *v);
    if (auto v = get("repair", "z_threshold")) c.repair.z_threshold = to_double("z_threshold", *v);
    if (auto v = get("detect", "max_periods")) c.detect.max_periods = static_cast<std::size_t>(to_integer("max_periods", *v));
    if (auto v = get("detect", "strength_threshold")) c.detect.strength_threshold = to_double("strength_threshold", *v);
    if (auto v = get("forecast", "alpha")) c.forecast.alpha = to_double("alpha", *v);
    if (auto v = get("forecast", "beta")) c.forecast.beta = to_double("beta", *v);
    if (auto v = get("forecast", "quantile")) c.forecast.quantile = to_double("quantile", *v);

    auto& sim = c.simulation;
    if (auto v = get("simulation", "sync_period")) sim.sync_period = parse_duration(*v);
    if (auto v = get("simulation", "stabilization_window")) sim.stabilization_window = parse_duration(*v);
    if (auto v = get("simulation", "hpa_tolerance")) sim.hpa_tolerance = to_double("hpa_tolerance", *v);
    if (auto v = get("simulation", "train_window")) sim.train_window = parse_duration(*v);
    if (auto v = get("simulation", "replan_every")) sim.replan_every = parse_duration(*v);
    if (auto v = get("simulation", "phase_neighborhood")) {
        sim.phase_neighborhood = static_cast<std::size_t>(to_integer("phase_neighborhood", *v));
    }
    if (auto v = get("simulation", "retention")) sim.retention = parse_duration(*v);
    if (sim.sync_period.count() < 1 || sim.replan_every.count() < 1 || sim.train_window.count() < 1) {
        throw EngineError(ErrorKind::InvalidConfig, "simulation periods must be >= 1 minute");
    }

    validate_spec(c.spec);
    return c;
}

EngineConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw EngineError(ErrorKind::IoFailure, "cannot read config " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string serialize_config(const EngineConfig& c)
{
    std::ostringstream out;
    const auto& s = c.spec;
    out << "[autoscaler]\n";
    out << "scale_target_ref = " << s.scale_target_ref << "\n";
    out << "metric = " << to_string(s.metric) << "\n";
    if (s.average_utilization) out << "average_utilization = " << fmt(*s.average_utilization) << "\n";
    if (s.target_rt_ms) out << "target_rt_ms = " << fmt(*s.target_rt_ms) << "\n";
    out << "scale_strategy = " << to_string(s.scale_strategy) << "\n";
    out << "max_replicas = " << s.max_replicas << "\n";
    out << "min_replicas = " << s.min_replicas << "\n";
    if (!s.instance_bounds.empty()) {
        out << "instance_bounds = ";
        for (std::size_t i = 0; i < s.instance_bounds.size(); ++i) {
            if (i) out << ", ";
            out << format_rfc3339(s.instance_bounds[i].start) << "/" << format_rfc3339(s.instance_bounds[i].end);
        }
        out << "\n";
    }
    if (!s.cron_rules.empty()) {
        out << "cron_rules = ";
        for (std::size_t i = 0; i < s.cron_rules.size(); ++i) {
            if (i) out << ", ";
            out << s.cron_rules[i].schedule << " " << s.cron_rules[i].forced_min << " " << s.cron_rules[i].forced_max;
        }
        out << "\n";
    }
    out << "pending_time = " << format_duration(s.pending_time) << "\n";
    out << "action_interval = " << format_duration(s.action_interval) << "\n";

    out << "\n[perf_model]\n";
    out << "kind = " << to_string(c.model.kind) << "\n";
    out << "service_rate = " << fmt(c.model.service_rate) << "\n";
    out << "other_latency_ms = " << fmt(c.model.other_latency_ms) << "\n";
    if (c.model.linear_coefficient) out << "linear_coefficient = " << fmt(*c.model.linear_coefficient) << "\n";

    out << "\n[repair]\n";
    out << "max_missing_ratio = " << fmt(c.repair.max_missing_ratio) << "\n";
    out << "z_threshold = " << fmt(c.repair.z_threshold) << "\n";

    out << "\n[detect]\n";
    out << "max_periods = " << c.detect.max_periods << "\n";
    out << "strength_threshold = " << fmt(c.detect.strength_threshold) << "\n";

    out << "\n[forecast]\n";
    out << "alpha = " << fmt(c.forecast.alpha) << "\n";
    out << "beta = " << fmt(c.forecast.beta) << "\n";
    out << "quantile = " << fmt(c.forecast.quantile) << "\n";

    const auto& sim = c.simulation;
    out << "\n[simulation]\n";
    out << "sync_period = " << format_duration(sim.sync_period) << "\n";
    out << "stabilization_window = " << format_duration(sim.stabilization_window) << "\n";
    out << "hpa_tolerance = " << fmt(sim.hpa_tolerance) << "\n";
    out << "train_window = " << format_duration(sim.train_window) << "\n";
    out << "replan_every = " << format_duration(sim.replan_every) << "\n";
    out << "phase_neighborhood = " << sim.phase_neighborhood << "\n";
    out << "retention = " << format_duration(sim.retention) << "\n";
    return out.str();
}

} // namespace ahpa

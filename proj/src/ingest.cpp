#include "ahpa/ingest.hpp"

#include "ahpa/numeric.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

namespace ahpa {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

bool parse_int(std::string_view s, std::int64_t& out)
{
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

bool parse_double(std::string_view s, double& out)
{
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end && std::isfinite(out);
}

bool parse_timestamp(std::string_view s, std::int64_t& epoch_seconds)
{
    s = trim(s);
    if (s.empty()) return false;
    if (parse_int(s, epoch_seconds)) return true;
    double fractional = 0.0;
    if (parse_double(s, fractional)) {
        epoch_seconds = static_cast<std::int64_t>(std::floor(fractional));
        return true;
    }
    return parse_rfc3339(s, epoch_seconds);
}

bool parse_json_row(std::string_view line, TraceRow& row)
{
    const auto doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("ts") || !doc.contains("value")) {
        return false;
    }
    const auto& ts = doc["ts"];
    const auto& value = doc["value"];
    if (value.is_null()) {
        row.value = std::numeric_limits<double>::quiet_NaN();
    } else if (!value.is_number()) {
        return false;
    } else {
        row.value = value.get<double>();
        if (!std::isfinite(row.value)) return false;
    }
    if (ts.is_number_integer()) {
        row.epoch_seconds = ts.get<std::int64_t>();
        return true;
    }
    if (ts.is_number()) {
        row.epoch_seconds = static_cast<std::int64_t>(std::floor(ts.get<double>()));
        return true;
    }
    if (ts.is_string()) return parse_timestamp(ts.get<std::string>(), row.epoch_seconds);
    return false;
}

} // namespace

bool parse_rfc3339(std::string_view text, std::int64_t& epoch_seconds)
{
    // YYYY-MM-DDTHH:MM:SS[.fff](Z|+hh:mm|-hh:mm)
    if (text.size() < 20) return false;
    auto digits = [&](std::size_t pos, std::size_t len, int& out) {
        if (pos + len > text.size()) return false;
        out = 0;
        for (std::size_t i = pos; i < pos + len; ++i) {
            if (!std::isdigit(static_cast<unsigned char>(text[i]))) return false;
            out = out * 10 + (text[i] - '0');
        }
        return true;
    };
    int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    if (!digits(0, 4, year) || text[4] != '-' || !digits(5, 2, month) || text[7] != '-' ||
        !digits(8, 2, day) || (text[10] != 'T' && text[10] != 't' && text[10] != ' ') ||
        !digits(11, 2, hour) || text[13] != ':' || !digits(14, 2, minute) || text[16] != ':' ||
        !digits(17, 2, second)) {
        return false;
    }
    std::size_t pos = 19;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        const std::size_t begin = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == begin) return false;
    }
    if (pos >= text.size()) return false;
    int offset_minutes = 0;
    if (text[pos] == 'Z' || text[pos] == 'z') {
        ++pos;
    } else if (text[pos] == '+' || text[pos] == '-') {
        const int sign = text[pos] == '+' ? 1 : -1;
        int oh = 0, om = 0;
        if (!digits(pos + 1, 2, oh) || pos + 3 >= text.size() || text[pos + 3] != ':' ||
            !digits(pos + 4, 2, om)) {
            return false;
        }
        offset_minutes = sign * (oh * 60 + om);
        pos += 6;
    } else {
        return false;
    }
    if (pos != text.size()) return false;

    const std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                                          std::chrono::day{static_cast<unsigned>(day)}};
    if (!ymd.ok() || hour > 23 || minute > 59 || second > 60) return false;
    const auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
    epoch_seconds = static_cast<std::int64_t>(days) * 86400 + hour * 3600 + minute * 60 + second -
                    static_cast<std::int64_t>(offset_minutes) * 60;
    return true;
}

RawTrace read_trace(const std::filesystem::path& path, MetricKind metric)
{
    std::ifstream in(path);
    if (!in) {
        throw EngineError(ErrorKind::IoFailure, "cannot open trace '" + path.string() + "'");
    }
    RawTrace raw;
    raw.source_path = path.string();
    const std::string metric_name(to_string(metric));

    std::string line;
    bool first = true;
    bool jsonl = false;
    while (std::getline(in, line)) {
        const auto body = trim(line);
        if (body.empty()) continue;
        if (first) {
            first = false;
            jsonl = body.front() == '{';
            if (!jsonl) {
                const auto comma = body.find(',');
                if (comma != std::string_view::npos && trim(body.substr(0, comma)) == "timestamp") {
                    continue;
                }
            }
        }
        TraceRow row;
        row.metric_name = metric_name;
        bool ok = false;
        if (jsonl) {
            ok = parse_json_row(body, row);
        } else {
            const auto comma = body.find(',');
            ok = comma != std::string_view::npos && body.find(',', comma + 1) == std::string_view::npos &&
                 parse_timestamp(body.substr(0, comma), row.epoch_seconds);
            if (ok) {
                const auto field = trim(body.substr(comma + 1));
                if (field.empty()) {
                    row.value = std::numeric_limits<double>::quiet_NaN();
                } else {
                    ok = parse_double(field, row.value);
                }
            }
        }
        if (ok) {
            raw.rows.push_back(std::move(row));
        } else {
            ++raw.skipped_rows;
        }
    }
    if (in.bad()) {
        throw EngineError(ErrorKind::IoFailure, "read error on '" + path.string() + "'");
    }
    if (raw.rows.empty()) {
        throw EngineError(ErrorKind::DegenerateSeries, "no parseable rows in '" + path.string() + "'");
    }
    return raw;
}

TimeSeries regularize(const RawTrace& raw, Minutes step, MetricKind metric)
{
    if (raw.rows.empty()) {
        throw EngineError(ErrorKind::DegenerateSeries, "cannot regularize an empty trace");
    }
    if (step.count() <= 0) {
        throw EngineError(ErrorKind::InvalidConfig, "regularize step must be positive");
    }
    auto floor_div = [](std::int64_t a, std::int64_t b) { return a / b - ((a % b != 0) && ((a < 0) != (b < 0))); };

    const auto [lo, hi] = std::minmax_element(raw.rows.begin(), raw.rows.end(),
                                              [](const TraceRow& a, const TraceRow& b) {
                                                  return a.epoch_seconds < b.epoch_seconds;
                                              });
    const std::int64_t origin_minute = floor_div(lo->epoch_seconds, 60);
    const std::int64_t step_seconds = step.count() * 60;
    const std::int64_t span = hi->epoch_seconds - origin_minute * 60;
    const auto length = static_cast<std::size_t>(span / step_seconds + 1);
    if (length == 0) {
        throw EngineError(ErrorKind::DegenerateSeries, "regularized grid would be empty");
    }

    std::vector<double> sums(length, 0.0);
    std::vector<std::size_t> counts(length, 0);
    for (const auto& row : raw.rows) {
        const auto idx = static_cast<std::size_t>((row.epoch_seconds - origin_minute * 60) / step_seconds);
        if (std::isnan(row.value)) continue;
        sums[idx] += row.value;
        ++counts[idx];
    }
    std::vector<std::optional<double>> values(length);
    for (std::size_t i = 0; i < length; ++i) {
        if (counts[i] > 0) values[i] = sums[i] / static_cast<double>(counts[i]);
    }
    return TimeSeries(from_epoch_minutes(origin_minute), step, std::move(values), metric);
}

std::vector<double> robust_z_scores(const TimeSeries& series)
{
    std::vector<double> present;
    present.reserve(series.size());
    for (const auto& v : series.values()) {
        if (v) present.push_back(*v);
    }
    std::vector<double> z(series.size(), 0.0);
    if (present.empty()) return z;

    const double med = numeric::median(present);
    double scale = 1.4826 * numeric::mad(present);
    if (scale == 0.0) {
        double acc = 0.0;
        for (double v : present) acc += std::abs(v - med);
        scale = acc / static_cast<double>(present.size());
    }
    if (scale == 0.0) return z;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series[i]) z[i] = std::abs(*series[i] - med) / scale;
    }
    return z;
}

namespace {

// Linear interpolation over the gaps; edge gaps take the nearest present value.
std::vector<double> fill_gaps(const std::vector<std::optional<double>>& values)
{
    const std::size_t n = values.size();
    std::vector<double> out(n, 0.0);
    std::optional<std::size_t> prev;
    for (std::size_t i = 0; i < n; ++i) {
        if (!values[i]) continue;
        out[i] = *values[i];
        if (!prev) {
            for (std::size_t j = 0; j < i; ++j) out[j] = *values[i];
        } else if (i - *prev > 1) {
            const double a = *values[*prev];
            const double b = *values[i];
            const double span = static_cast<double>(i - *prev);
            for (std::size_t j = *prev + 1; j < i; ++j) {
                out[j] = a + (b - a) * static_cast<double>(j - *prev) / span;
            }
        }
        prev = i;
    }
    if (prev) {
        for (std::size_t j = *prev + 1; j < n; ++j) out[j] = *values[*prev];
    }
    return out;
}

} // namespace

TimeSeries repair(const TimeSeries& series, const RepairOptions& options)
{
    const std::size_t n = series.size();
    const std::size_t missing = series.missing_count();
    const double ratio = static_cast<double>(missing) / static_cast<double>(n);
    if (ratio > options.max_missing_ratio) {
        throw EngineError(ErrorKind::InsufficientData,
                          "missing ratio " + std::to_string(ratio) + " exceeds " +
                              std::to_string(options.max_missing_ratio));
    }
    if (n - missing < 2) {
        throw EngineError(ErrorKind::InsufficientData, "fewer than 2 present samples");
    }

    std::vector<std::optional<double>> work = series.values();
    auto flag_outliers = [&](const TimeSeries& current) {
        const auto z = robust_z_scores(current);
        bool any = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (work[i] && z[i] > options.z_threshold) {
                work[i].reset();
                any = true;
            }
        }
        return any;
    };

    flag_outliers(series);
    auto filled = fill_gaps(work);
    // Iterate to a fixed point so that repairing a repaired series is a no-op.
    for (int pass = 0; pass < 20; ++pass) {
        const auto current = TimeSeries::from_dense(series.start(), series.step(), filled, series.metric());
        work.assign(filled.begin(), filled.end());
        if (!flag_outliers(current)) break;
        filled = fill_gaps(work);
    }
    return TimeSeries::from_dense(series.start(), series.step(), filled, series.metric());
}

TimeSeries truncate_retention(const TimeSeries& series, Minutes retention)
{
    const auto keep = static_cast<std::size_t>(std::max<std::int64_t>(1, retention / series.step()));
    if (series.size() <= keep) return series;
    return series.slice(series.size() - keep, keep);
}

} // namespace ahpa

#pragma once

#include "ahpa/core.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ahpa {

struct TraceRow {
    std::int64_t epoch_seconds = 0;
    std::string metric_name;
    double value = 0.0;  // NaN marks an explicitly missing sample

    friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

struct RawTrace {
    std::vector<TraceRow> rows;
    std::string source_path;
    std::size_t skipped_rows = 0;
};

/// Reads a CSV (`timestamp,value`, RFC3339 or epoch-second timestamps) or a
/// JSON-lines trace (`{"ts": ..., "value": ...}`). Malformed rows are skipped and counted.
/// An empty CSV value or a JSON null keeps the timestamp as a missing sample.
RawTrace read_trace(const std::filesystem::path& path, MetricKind metric);

/// Parses `2021-04-01T00:00:00Z` style timestamps (optional fraction and numeric offset).
/// Returns false on malformed input.
bool parse_rfc3339(std::string_view text, std::int64_t& epoch_seconds);

/// Buckets rows onto a uniform grid spanning [min_ts, max_ts]; duplicates are averaged,
/// empty buckets become missing samples.
TimeSeries regularize(const RawTrace& raw, Minutes step, MetricKind metric = MetricKind::Qps);

struct RepairOptions {
    double max_missing_ratio = 0.3;
    double z_threshold = 5.0;
    friend bool operator==(const RepairOptions&, const RepairOptions&) = default;
};

/// Fills gaps by linear interpolation and replaces robust-z outliers by the
/// interpolation of their neighbours. The output has no missing samples.
TimeSeries repair(const TimeSeries& series, const RepairOptions& options = {});

/// Robust z-scores |x - median| / scale for the present samples (missing -> 0).
/// scale is 1.4826*MAD, falling back to the mean absolute deviation when MAD is 0.
std::vector<double> robust_z_scores(const TimeSeries& series);

/// Keeps only the most recent `retention` worth of samples.
TimeSeries truncate_retention(const TimeSeries& series, Minutes retention = Minutes{7 * 24 * 60});

} // namespace ahpa

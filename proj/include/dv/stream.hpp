#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <string>

#include "dv/schema.hpp"
#include "dv/skew.hpp"

namespace dv {

/// Raw incoming record: field name -> raw text (nullopt = explicit null).
using Record = std::map<std::string, std::optional<std::string>>;

struct OnlineStats {
    std::size_t count = 0;  // non-null values seen
    double mean = 0.0;
    double m2 = 0.0;  // sum of squared deviations (Welford)
    double min = 0.0;
    double max = 0.0;

    void update(double v);
    double variance() const { return count == 0 ? 0.0 : m2 / static_cast<double>(count); }
    double stddev() const;
};

struct FeatureWindow {
    std::deque<double> numeric;        // numeric features
    std::deque<std::string> category;  // STRING features
};

struct StreamConfig {
    std::size_t window_size = 1000;
    std::size_t min_window = 100;
    /// When set, values carrying record-local anomalies are excluded from
    /// the running statistics and windows.
    bool exclude_anomalous = false;
};

class StreamState {
public:
    StreamState(const Schema& schema, StreamConfig cfg = {});

    const Schema& schema() const { return schema_; }
    const StreamConfig& config() const { return cfg_; }
    std::size_t records_seen() const { return records_seen_; }

    const OnlineStats& stats(const std::string& feature) const;
    const FeatureWindow& window(const std::string& feature) const;
    const std::map<std::string, OnlineStats>& all_stats() const { return stats_; }

    void observe(const std::string& feature, double value);
    void observe_category(const std::string& feature, const std::string& value);
    void bump_record() { ++records_seen_; }

private:
    Schema schema_;
    StreamConfig cfg_;
    std::map<std::string, OnlineStats> stats_;
    std::map<std::string, FeatureWindow> windows_;
    std::size_t records_seen_ = 0;
};

struct RecordVerdict {
    std::size_t record_index = 0;
    std::vector<SchemaAnomaly> anomalies;  // record-local kinds
    bool accepted() const { return anomalies.empty(); }
};

/// Applies record-local schema checks and folds the record into the state.
/// Unparseable values become TYPE_MISMATCH anomalies, never a crash.
RecordVerdict validate_record(const Record& record, StreamState& state);

/// Parse one input line as a record. JSON object lines are detected by a
/// leading '{'; anything else is CSV in schema feature order.
Record parse_record_line(const std::string& line, const Schema& schema,
                         const CsvOptions& csv = {});

struct DriftStatus {
    bool ready = false;  // window reached min_window
    double jsd = 0.0;
};

/// Per-feature JSD between the sliding window (binned on the reference's
/// edges / categories) and the reference distribution.
std::map<std::string, DriftStatus> window_drift(const StreamState& state,
                                                const ReferenceProfile& reference);

}  // namespace dv

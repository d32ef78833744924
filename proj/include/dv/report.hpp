#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dv/checks.hpp"
#include "dv/schema.hpp"
#include "dv/skew.hpp"

namespace dv {

enum class Verdict { Pass, Anomalies };
std::string to_string(Verdict v);

enum class MitigationAction {
    ImputeFixedValue,
    UpdateSchema,
    InvestigateSource,
    Deduplicate,
    ReviewOutliers,
};
std::string to_string(MitigationAction a);

struct MitigationSuggestion {
    /// Section title + entry target the suggestion refers to.
    std::string section;
    std::string target;
    MitigationAction action;
    std::string message;
};

struct CountEntry {
    std::string name;
    std::int64_t value = 0;
};

struct MetricEntry {
    std::string target;       // 'Dataset' or a feature name
    std::string metric_name;  // e.g. "duplicate ratio"
    double value = 0.0;
    bool passed = true;
};

struct ReportSection {
    std::string title;
    std::vector<CountEntry> counts;    // rendered as one dict line
    std::vector<MetricEntry> metrics;  // one dict line each
    std::vector<std::string> anomalies;  // detail strings (structured output only)
};

struct ValidationReport {
    std::string batch_id;
    std::optional<int> schema_version;
    std::vector<ReportSection> sections;
    std::vector<MitigationSuggestion> mitigations;
    Verdict overall = Verdict::Pass;
};

struct StreamSummary {
    std::size_t records_seen = 0;
    std::size_t rejected = 0;
    std::size_t drift_alerts = 0;
};

struct ReportInputs {
    std::string batch_id;
    std::optional<int> schema_version;
    std::vector<SchemaAnomaly> schema_anomalies;
    std::size_t n_rows = 0;
    std::size_t total_cells = 0;  // denominator for the out-of-bounds cell ratio
    std::vector<CheckResult> check_results;  // configuration order
    std::optional<SkewReport> skew;
    std::optional<StreamSummary> stream;
    std::optional<SchemaRevision> revision;
};

/// Section order: Schema validation, Duplicated, Outliers, remaining checks
/// in config order, Skew, Stream. Sections with nothing to say are omitted.
ValidationReport build_report(const ReportInputs& inputs);

struct MitigationConfig {
    double impute_value = 0.0;
};

std::vector<MitigationSuggestion> suggest_mitigations(const ReportInputs& inputs,
                                                      const ValidationReport& report,
                                                      const MitigationConfig& cfg = {});

/// Canonical byte-stable text rendering. Counts render as one dict line per
/// section; metrics as {'<target>': '<metric name>: <value>'} lines; the
/// final line is the overall verdict.
std::string render_text(const ValidationReport& report);

/// Lossless JSON serialization with stable key order.
std::string render_json(const ValidationReport& report);
ValidationReport parse_report_json(const std::string& text);

}  // namespace dv

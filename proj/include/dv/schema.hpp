#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dv/dataset.hpp"

namespace dv {

enum class Presence { Required, Optional };

struct FeatureSpec {
    std::string name;
    FeatureType type = FeatureType::String;
    Presence presence = Presence::Required;
    std::optional<double> min;  // numeric types only
    std::optional<double> max;
    std::optional<std::set<std::string>> domain;  // STRING only
    double max_null_fraction = 0.0;

    bool operator==(const FeatureSpec&) const = default;
};

struct Schema {
    int version = 1;
    std::string source_batch;
    std::vector<FeatureSpec> features;

    bool has_feature(const std::string& name) const;
    const FeatureSpec& feature(const std::string& name) const;

    bool operator==(const Schema&) const = default;
};

enum class AnomalyKind {
    NewFeature,
    MissingFeature,
    TypeMismatch,
    NotInMinMax,
    DomainViolation,
    NullFractionExceeded,
};

std::string to_string(AnomalyKind k);

struct SchemaAnomaly {
    AnomalyKind kind;
    std::string feature;
    std::size_t count = 0;       // offending cells (valuewise kinds), else 1
    std::string detail;          // human-readable bounds/values description
    std::vector<std::size_t> failed_rows;  // valuewise kinds only, ascending
};

struct InferConfig {
    std::size_t domain_max_distinct = 32;
    double null_slack = 0.0;
};

/// First-version schema from an observed batch: observed types, observed
/// numeric [min,max] bounds, category domains for low-cardinality STRING
/// columns, presence REQUIRED, max_null_fraction = observed + slack.
Schema infer_schema(const Dataset& ds, const InferConfig& cfg = {});

/// Anomalies are results, not errors; an empty list means the batch conforms.
/// An INT column arriving where FLOAT is declared is not a type mismatch.
std::vector<SchemaAnomaly> validate_schema(const Dataset& ds, const Schema& schema);

struct SchemaRevision {
    Schema proposed;                     // version = schema.version + 1
    std::vector<std::string> changes;    // human-readable change list
    std::vector<std::string> notes;      // investigation notes (no auto-proposal)
};

/// Proposed revision covering NEW_FEATURE / NOT_IN_MIN_MAX / DOMAIN_VIOLATION
/// anomalies. Returns nothing when no proposal applies; the input schema is
/// never modified.
std::optional<SchemaRevision> suggest_schema_update(const std::vector<SchemaAnomaly>& anomalies,
                                                    const Dataset& ds, const Schema& schema);

/// Strict JSON persistence: unknown fields and invariant violations are
/// hard errors.
Schema read_schema(const std::string& path);
void write_schema(const Schema& schema, const std::string& path);
Schema parse_schema_json(const std::string& text);
std::string schema_to_json(const Schema& schema);

}  // namespace dv

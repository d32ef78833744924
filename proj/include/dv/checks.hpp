#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dv/dataset.hpp"

namespace dv {

enum class CheckKind {
    Completeness,
    Uniqueness,
    Size,
    InRange,
    Duplicates,
    Outliers,
    RareCategories,
    ConstantFeature,
};

std::string to_string(CheckKind k);
CheckKind check_kind_from_string(const std::string& s);

enum class OutlierScope { Rows, Cells };
enum class Severity { Error, Warning };

struct Check {
    Check() = default;
    Check(CheckKind k, std::vector<std::string> t) : kind(k), targets(std::move(t)) {}

    CheckKind kind = CheckKind::Completeness;
    /// Target features; empty means the whole dataset.
    std::vector<std::string> targets;

    // Kind-specific parameters.
    double min_completeness = 1.0;        // COMPLETENESS
    double min_uniqueness = 1.0;          // UNIQUENESS
    std::size_t min_rows = 1;             // SIZE
    std::optional<std::size_t> max_rows;  // SIZE
    std::optional<double> min_value;      // IN_RANGE
    std::optional<double> max_value;      // IN_RANGE
    std::vector<std::string> key_columns; // DUPLICATES (empty = all columns)
    double max_duplicate_ratio = 0.0;     // DUPLICATES
    double iqr_multiplier = 1.5;          // OUTLIERS
    OutlierScope outlier_scope = OutlierScope::Rows;
    double max_outlier_ratio = 0.1;       // OUTLIERS
    double min_category_freq = 0.01;      // RARE_CATEGORIES
    Severity severity = Severity::Error;
};

struct CheckResult {
    CheckResult() = default;
    explicit CheckResult(Check c) : check(std::move(c)) {}

    Check check;
    double metric = 0.0;
    bool passed = true;
    std::vector<std::size_t> failed_rows;  // ascending, unique
    std::map<std::string, double> per_feature;
    std::string detail;
};

/// Dispatch on check.kind. Unknown features or type-incompatible targets
/// (e.g. OUTLIERS on a STRING column) are hard errors.
CheckResult run_check(const Dataset& ds, const Check& check);

/// metric = (rows - distinct keys) / rows; failed rows are every row whose
/// key appeared earlier (first occurrence stays clean).
CheckResult duplicate_ratio(const Dataset& ds,
                            const std::vector<std::string>& key_columns = {});

struct OutlierParams {
    double k = 1.5;
    OutlierScope scope = OutlierScope::Rows;
};

/// IQR-fence outliers: a cell is outlying when value < Q1 - k*IQR or
/// value > Q3 + k*IQR for its column (quartiles by linear interpolation).
/// Constant columns contribute none.
CheckResult outlier_ratio(const Dataset& ds, const OutlierParams& params = {});

CheckResult rare_categories(const Dataset& ds, const std::string& column,
                            double min_freq = 0.01);

/// Flags columns with distinct_count <= 1 or numeric all-zero non-nulls.
CheckResult constant_features(const Dataset& ds);

/// Row subset holding exactly result.failed_rows, original order.
Dataset retrieve_failed_records(const Dataset& ds, const CheckResult& result);

/// Checks-config file: JSON array of {kind, targets, params, severity}.
std::vector<Check> read_checks_config(const std::string& path);
std::vector<Check> parse_checks_json(const std::string& text);

}  // namespace dv

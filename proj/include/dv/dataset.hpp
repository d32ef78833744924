#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace dv {

enum class FeatureType { Int, Float, String };

std::string to_string(FeatureType t);
FeatureType feature_type_from_string(const std::string& s);

using Value = std::variant<std::int64_t, double, std::string>;
using Cell = std::optional<Value>;

/// Shortest round-trip decimal for doubles, plain decimal for ints.
std::string format_value(const Value& v);
std::string format_double(double d);

/// INT if every non-null value parses as a 64-bit integer, else FLOAT if
/// every non-null value parses as a finite decimal, else STRING.
/// All-null sequences infer STRING.
FeatureType infer_feature_type(const std::vector<std::optional<std::string>>& raw);

struct FeatureColumn {
    std::string name;
    FeatureType type = FeatureType::String;
    std::vector<Cell> values;

    std::size_t size() const { return values.size(); }
    bool is_null(std::size_t row) const { return !values[row].has_value(); }
    bool is_numeric() const { return type != FeatureType::String; }

    /// Numeric value of a non-null cell; INT widens to double.
    double as_double(std::size_t row) const;
    const std::string& as_string(std::size_t row) const;

    std::size_t null_count() const;
    /// Non-null numeric values in row order.
    std::vector<double> numeric_values() const;
};

struct CsvOptions {
    char delimiter = ',';
    std::vector<std::string> null_tokens = {"", "NA", "null"};
    bool has_header = true;
};

class Dataset {
public:
    Dataset() = default;
    Dataset(std::string batch_id, std::vector<FeatureColumn> columns);

    const std::string& batch_id() const { return batch_id_; }
    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_columns() const { return columns_.size(); }
    const std::vector<FeatureColumn>& columns() const { return columns_; }
    const FeatureColumn& column(std::size_t i) const { return columns_[i]; }

    bool has_column(const std::string& name) const;
    const FeatureColumn& column(const std::string& name) const;
    std::vector<std::string> column_names() const;

    /// Columns in the order of `names`, same rows.
    Dataset project(const std::vector<std::string>& names) const;
    /// All columns, only the given rows, original order.
    Dataset select_rows(const std::vector<std::size_t>& rows) const;

    /// Composite key of the row's values in key_columns. Nulls participate
    /// as a distinct sentinel; fields are length-prefixed so keys cannot
    /// collide across different value splits.
    std::string row_key(const std::vector<std::string>& key_columns, std::size_t row) const;

    void write_csv(std::ostream& out, char delimiter = ',') const;

private:
    std::string batch_id_;
    std::vector<FeatureColumn> columns_;
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t n_rows_ = 0;
};

Dataset load_csv(std::istream& source, const CsvOptions& options = {},
                 const std::string& batch_id = "");
Dataset load_csv_file(const std::string& path, const CsvOptions& options = {});

}  // namespace dv

#include "dv/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dv {

std::string to_string(FeatureType t) {
    switch (t) {
        case FeatureType::Int: return "INT";
        case FeatureType::Float: return "FLOAT";
        case FeatureType::String: return "STRING";
    }
    return "STRING";
}

FeatureType feature_type_from_string(const std::string& s) {
    if (s == "INT") return FeatureType::Int;
    if (s == "FLOAT") return FeatureType::Float;
    if (s == "STRING") return FeatureType::String;
    throw std::runtime_error("unknown feature type: '" + s + "'");
}

std::string format_double(double d) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), d);
    return std::string(buf, p);
}

std::string format_value(const Value& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&v)) return format_double(*d);
    return std::get<std::string>(v);
}

namespace {

bool parse_int64(const std::string& s, std::int64_t& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') ++first;  // from_chars rejects a leading plus
    auto [p, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && p == last && p != first;
}

bool parse_finite_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') ++first;
    auto [p, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && p == last && p != first && std::isfinite(out);
}

}  // namespace

FeatureType infer_feature_type(const std::vector<std::optional<std::string>>& raw) {
    bool all_int = true;
    bool all_float = true;
    bool any_value = false;
    for (const auto& cell : raw) {
        if (!cell) continue;
        any_value = true;
        std::int64_t i;
        if (all_int && !parse_int64(*cell, i)) all_int = false;
        double d;
        if (!all_int && all_float && !parse_finite_double(*cell, d)) all_float = false;
        if (!all_int && !all_float) return FeatureType::String;
    }
    if (!any_value) return FeatureType::String;
    if (all_int) return FeatureType::Int;
    if (all_float) return FeatureType::Float;
    return FeatureType::String;
}

double FeatureColumn::as_double(std::size_t row) const {
    const Value& v = *values[row];
    if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    return std::get<double>(v);
}

const std::string& FeatureColumn::as_string(std::size_t row) const {
    return std::get<std::string>(*values[row]);
}

std::size_t FeatureColumn::null_count() const {
    return static_cast<std::size_t>(
        std::count_if(values.begin(), values.end(), [](const Cell& c) { return !c; }));
}

std::vector<double> FeatureColumn::numeric_values() const {
    std::vector<double> out;
    out.reserve(values.size());
    for (std::size_t r = 0; r < values.size(); ++r) {
        if (!is_null(r)) out.push_back(as_double(r));
    }
    return out;
}

Dataset::Dataset(std::string batch_id, std::vector<FeatureColumn> columns)
    : batch_id_(std::move(batch_id)), columns_(std::move(columns)) {
    n_rows_ = columns_.empty() ? 0 : columns_.front().size();
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        const auto& col = columns_[i];
        if (col.size() != n_rows_) {
            throw std::runtime_error("column '" + col.name + "' has " +
                                     std::to_string(col.size()) + " rows, expected " +
                                     std::to_string(n_rows_));
        }
        if (!index_.emplace(col.name, i).second) {
            throw std::runtime_error("duplicate column name '" + col.name + "'");
        }
    }
}

bool Dataset::has_column(const std::string& name) const {
    return index_.count(name) > 0;
}

const FeatureColumn& Dataset::column(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::runtime_error("unknown feature '" + name + "'");
    return columns_[it->second];
}

std::vector<std::string> Dataset::column_names() const {
    std::vector<std::string> names;
    names.reserve(columns_.size());
    for (const auto& c : columns_) names.push_back(c.name);
    return names;
}

Dataset Dataset::project(const std::vector<std::string>& names) const {
    std::vector<std::string> missing;
    for (const auto& n : names) {
        if (!has_column(n)) missing.push_back(n);
    }
    if (!missing.empty()) {
        std::string msg = "unknown feature name(s):";
        for (const auto& n : missing) msg += " '" + n + "'";
        throw std::runtime_error(msg);
    }
    std::vector<FeatureColumn> cols;
    cols.reserve(names.size());
    for (const auto& n : names) cols.push_back(column(n));
    Dataset out(batch_id_, std::move(cols));
    out.n_rows_ = n_rows_;  // preserved even with zero columns
    return out;
}

Dataset Dataset::select_rows(const std::vector<std::size_t>& rows) const {
    std::vector<FeatureColumn> cols;
    cols.reserve(columns_.size());
    for (const auto& col : columns_) {
        FeatureColumn sub{col.name, col.type, {}};
        sub.values.reserve(rows.size());
        for (std::size_t r : rows) {
            if (r >= n_rows_) throw std::runtime_error("row index out of range");
            sub.values.push_back(col.values[r]);
        }
        cols.push_back(std::move(sub));
    }
    Dataset out(batch_id_, std::move(cols));
    if (out.columns_.empty()) out.n_rows_ = 0;
    return out;
}

std::string Dataset::row_key(const std::vector<std::string>& key_columns,
                             std::size_t row) const {
    if (key_columns.empty()) throw std::runtime_error("row_key requires at least one key column");
    if (row >= n_rows_) throw std::runtime_error("row index out of range");
    std::string key;
    for (const auto& name : key_columns) {
        const auto& col = column(name);
        if (col.is_null(row)) {
            key += "~;";
        } else {
            std::string v = format_value(*col.values[row]);
            key += std::to_string(v.size());
            key += ':';
            key += v;
        }
    }
    return key;
}

namespace {

bool needs_quoting(const std::string& s, char delimiter) {
    return s.find_first_of(std::string{delimiter, '"', '\n', '\r'}) != std::string::npos;
}

void write_field(std::ostream& out, const std::string& s, char delimiter) {
    if (!needs_quoting(s, delimiter)) {
        out << s;
        return;
    }
    out << '"';
    for (char c : s) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

// RFC-4180 record reader: handles quoted fields, embedded delimiters and
// newlines, doubled quotes. Returns false at end of input.
bool read_record(std::istream& in, char delimiter, std::vector<std::string>& fields) {
    fields.clear();
    int c = in.get();
    if (c == EOF) return false;
    std::string field;
    bool in_quotes = false;
    while (true) {
        if (c == EOF) break;
        char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == '"') {
                int next = in.peek();
                if (next == '"') {
                    field += '"';
                    in.get();
                } else {
                    in_quotes = false;
                }
            } else {
                field += ch;
            }
        } else if (ch == '"' && field.empty()) {
            in_quotes = true;
        } else if (ch == delimiter) {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n') {
            break;
        } else if (ch == '\r') {
            if (in.peek() == '\n') in.get();
            break;
        } else {
            field += ch;
        }
        c = in.get();
    }
    fields.push_back(std::move(field));
    return true;
}

}  // namespace

void Dataset::write_csv(std::ostream& out, char delimiter) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i) out << delimiter;
        write_field(out, columns_[i].name, delimiter);
    }
    out << '\n';
    for (std::size_t r = 0; r < n_rows_; ++r) {
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            if (i) out << delimiter;
            const auto& col = columns_[i];
            if (!col.is_null(r)) write_field(out, format_value(*col.values[r]), delimiter);
        }
        out << '\n';
    }
}

Dataset load_csv(std::istream& source, const CsvOptions& options,
                 const std::string& batch_id) {
    std::vector<std::string> fields;
    if (!read_record(source, options.delimiter, fields)) {
        throw std::runtime_error("empty input: no header row");
    }
    if (!options.has_header) {
        throw std::runtime_error("headerless CSV input is not supported");
    }
    std::vector<std::string> header = fields;
    {
        auto sorted = header;
        std::sort(sorted.begin(), sorted.end());
        auto dup = std::adjacent_find(sorted.begin(), sorted.end());
        if (dup != sorted.end()) {
            throw std::runtime_error("duplicate header name '" + *dup + "'");
        }
    }

    auto is_null_token = [&](const std::string& s) {
        return std::find(options.null_tokens.begin(), options.null_tokens.end(), s) !=
               options.null_tokens.end();
    };

    std::vector<std::vector<std::optional<std::string>>> raw(header.size());
    std::size_t row_number = 1;  // header was row 1
    while (read_record(source, options.delimiter, fields)) {
        ++row_number;
        if (fields.size() != header.size()) {
            throw std::runtime_error("row " + std::to_string(row_number) + " has " +
                                     std::to_string(fields.size()) + " fields, expected " +
                                     std::to_string(header.size()));
        }
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (is_null_token(fields[i])) {
                raw[i].push_back(std::nullopt);
            } else {
                raw[i].push_back(std::move(fields[i]));
            }
        }
    }

    std::vector<FeatureColumn> cols;
    cols.reserve(header.size());
    for (std::size_t i = 0; i < header.size(); ++i) {
        FeatureColumn col{header[i], infer_feature_type(raw[i]), {}};
        col.values.reserve(raw[i].size());
        for (const auto& cell : raw[i]) {
            if (!cell) {
                col.values.push_back(std::nullopt);
                continue;
            }
            switch (col.type) {
                case FeatureType::Int: {
                    std::int64_t v = 0;
                    parse_int64(*cell, v);
                    col.values.push_back(Value{v});
                    break;
                }
                case FeatureType::Float: {
                    double v = 0;
                    parse_finite_double(*cell, v);
                    col.values.push_back(Value{v});
                    break;
                }
                case FeatureType::String:
                    col.values.push_back(Value{*cell});
                    break;
            }
        }
        cols.push_back(std::move(col));
    }
    return Dataset(batch_id, std::move(cols));
}

Dataset load_csv_file(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return load_csv(in, options, path);
}

}  // namespace dv

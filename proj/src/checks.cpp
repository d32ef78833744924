#include "dv/checks.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "dv/statistics.hpp"
#include "json.hpp"

namespace dv {

std::string to_string(CheckKind k) {
    switch (k) {
        case CheckKind::Completeness: return "COMPLETENESS";
        case CheckKind::Uniqueness: return "UNIQUENESS";
        case CheckKind::Size: return "SIZE";
        case CheckKind::InRange: return "IN_RANGE";
        case CheckKind::Duplicates: return "DUPLICATES";
        case CheckKind::Outliers: return "OUTLIERS";
        case CheckKind::RareCategories: return "RARE_CATEGORIES";
        case CheckKind::ConstantFeature: return "CONSTANT_FEATURE";
    }
    return "?";
}

CheckKind check_kind_from_string(const std::string& s) {
    if (s == "COMPLETENESS") return CheckKind::Completeness;
    if (s == "UNIQUENESS") return CheckKind::Uniqueness;
    if (s == "SIZE") return CheckKind::Size;
    if (s == "IN_RANGE") return CheckKind::InRange;
    if (s == "DUPLICATES") return CheckKind::Duplicates;
    if (s == "OUTLIERS") return CheckKind::Outliers;
    if (s == "RARE_CATEGORIES") return CheckKind::RareCategories;
    if (s == "CONSTANT_FEATURE") return CheckKind::ConstantFeature;
    throw std::runtime_error("unknown check kind '" + s + "'");
}

namespace {

std::vector<std::string> resolve_targets(const Dataset& ds, const Check& check) {
    if (check.targets.empty()) return ds.column_names();
    for (const auto& t : check.targets) {
        if (!ds.has_column(t)) {
            throw std::runtime_error("check " + to_string(check.kind) +
                                     " targets unknown feature '" + t + "'");
        }
    }
    return check.targets;
}

void sort_unique(std::vector<std::size_t>& rows) {
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
}

CheckResult completeness(const Dataset& ds, const Check& check) {
    CheckResult res{check};
    double worst = 1.0;
    for (const auto& name : resolve_targets(ds, check)) {
        const auto& col = ds.column(name);
        double c = col.size() == 0
                       ? 1.0
                       : 1.0 - static_cast<double>(col.null_count()) /
                                   static_cast<double>(col.size());
        res.per_feature[name] = c;
        worst = std::min(worst, c);
        for (std::size_t r = 0; r < col.size(); ++r) {
            if (col.is_null(r)) res.failed_rows.push_back(r);
        }
    }
    sort_unique(res.failed_rows);
    res.metric = worst;
    res.passed = worst >= check.min_completeness;
    return res;
}

CheckResult uniqueness(const Dataset& ds, const Check& check) {
    CheckResult res{check};
    double worst = 1.0;
    for (const auto& name : resolve_targets(ds, check)) {
        const auto& col = ds.column(name);
        std::unordered_set<std::string> seen;
        std::size_t non_null = 0;
        for (std::size_t r = 0; r < col.size(); ++r) {
            if (col.is_null(r)) continue;
            ++non_null;
            if (!seen.insert(format_value(*col.values[r])).second) {
                res.failed_rows.push_back(r);
            }
        }
        double u = non_null == 0 ? 1.0
                                 : static_cast<double>(seen.size()) /
                                       static_cast<double>(non_null);
        res.per_feature[name] = u;
        worst = std::min(worst, u);
    }
    sort_unique(res.failed_rows);
    res.metric = worst;
    res.passed = worst >= check.min_uniqueness;
    return res;
}

CheckResult size_check(const Dataset& ds, const Check& check) {
    CheckResult res{check};
    res.metric = static_cast<double>(ds.n_rows());
    res.passed = ds.n_rows() >= check.min_rows &&
                 (!check.max_rows || ds.n_rows() <= *check.max_rows);
    return res;
}

CheckResult in_range(const Dataset& ds, const Check& check) {
    if (!check.min_value && !check.max_value) {
        throw std::runtime_error("IN_RANGE check needs min and/or max");
    }
    if (check.min_value && check.max_value && *check.min_value > *check.max_value) {
        throw std::runtime_error("IN_RANGE check has min > max");
    }
    CheckResult res{check};
    std::size_t cells = 0;
    std::size_t bad = 0;
    for (const auto& name : resolve_targets(ds, check)) {
        const auto& col = ds.column(name);
        if (!col.is_numeric()) {
            throw std::runtime_error("IN_RANGE on non-numeric feature '" + name + "'");
        }
        std::size_t col_bad = 0;
        std::size_t col_cells = 0;
        for (std::size_t r = 0; r < col.size(); ++r) {
            if (col.is_null(r)) continue;
            ++col_cells;
            double v = col.as_double(r);
            if ((check.min_value && v < *check.min_value) ||
                (check.max_value && v > *check.max_value)) {
                ++col_bad;
                res.failed_rows.push_back(r);
            }
        }
        res.per_feature[name] =
            col_cells == 0 ? 1.0 : 1.0 - static_cast<double>(col_bad) / col_cells;
        cells += col_cells;
        bad += col_bad;
    }
    sort_unique(res.failed_rows);
    res.metric = cells == 0 ? 1.0 : 1.0 - static_cast<double>(bad) / cells;
    res.passed = bad == 0;
    return res;
}

}  // namespace

CheckResult duplicate_ratio(const Dataset& ds, const std::vector<std::string>& key_columns) {
    Check check{CheckKind::Duplicates, {}};
    check.key_columns = key_columns;
    CheckResult res{check};
    if (ds.n_rows() == 0) {
        res.metric = 0.0;
        res.passed = true;
        return res;
    }
    std::vector<std::string> keys = key_columns.empty() ? ds.column_names() : key_columns;
    if (keys.empty()) throw std::runtime_error("duplicate_ratio on a dataset with no columns");
    std::unordered_set<std::string> seen;
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        if (!seen.insert(ds.row_key(keys, r)).second) res.failed_rows.push_back(r);
    }
    res.metric = static_cast<double>(ds.n_rows() - seen.size()) /
                 static_cast<double>(ds.n_rows());
    res.passed = res.metric <= check.max_duplicate_ratio;
    return res;
}

CheckResult outlier_ratio(const Dataset& ds, const OutlierParams& params) {
    Check check{CheckKind::Outliers, {}};
    check.iqr_multiplier = params.k;
    check.outlier_scope = params.scope;
    CheckResult res{check};

    std::size_t numeric_cols = 0;
    std::size_t total_cells = 0;
    std::size_t outlier_cells = 0;
    std::vector<bool> row_hit(ds.n_rows(), false);

    for (const auto& col : ds.columns()) {
        if (!col.is_numeric()) continue;
        ++numeric_cols;
        std::vector<double> sorted = col.numeric_values();
        std::sort(sorted.begin(), sorted.end());
        if (sorted.empty()) continue;
        double q1 = quantile(sorted, 0.25);
        double q3 = quantile(sorted, 0.75);
        double iqr = q3 - q1;
        double lo = q1 - params.k * iqr;
        double hi = q3 + params.k * iqr;
        std::size_t col_bad = 0;
        std::size_t col_cells = 0;
        for (std::size_t r = 0; r < col.size(); ++r) {
            if (col.is_null(r)) continue;
            ++col_cells;
            double v = col.as_double(r);
            if (v < lo || v > hi) {  // strict: IQR 0 flags nothing
                ++col_bad;
                row_hit[r] = true;
            }
        }
        res.per_feature[col.name] =
            col_cells == 0 ? 0.0 : static_cast<double>(col_bad) / col_cells;
        total_cells += col_cells;
        outlier_cells += col_bad;
    }
    if (numeric_cols == 0) {
        throw std::runtime_error("OUTLIERS check needs at least one numeric feature");
    }
    for (std::size_t r = 0; r < row_hit.size(); ++r) {
        if (row_hit[r]) res.failed_rows.push_back(r);
    }
    if (params.scope == OutlierScope::Rows) {
        res.metric = ds.n_rows() == 0
                         ? 0.0
                         : static_cast<double>(res.failed_rows.size()) / ds.n_rows();
    } else {
        res.metric =
            total_cells == 0 ? 0.0 : static_cast<double>(outlier_cells) / total_cells;
    }
    res.passed = res.metric <= check.max_outlier_ratio;
    return res;
}

CheckResult rare_categories(const Dataset& ds, const std::string& column, double min_freq) {
    const auto& col = ds.column(column);
    if (col.type != FeatureType::String) {
        throw std::runtime_error("RARE_CATEGORIES on non-STRING feature '" + column + "'");
    }
    Check check{CheckKind::RareCategories, {column}};
    check.min_category_freq = min_freq;
    CheckResult res{check};

    FrequencyTable freq = frequency_table(col);
    std::size_t non_null = col.size() - col.null_count();
    std::set<std::string> rare;
    for (const auto& [cat, n] : freq) {
        if (static_cast<double>(n) / static_cast<double>(non_null) < min_freq) rare.insert(cat);
    }
    for (std::size_t r = 0; r < col.size(); ++r) {
        if (!col.is_null(r) && rare.count(col.as_string(r))) res.failed_rows.push_back(r);
    }
    res.metric = non_null == 0
                     ? 0.0
                     : static_cast<double>(res.failed_rows.size()) / non_null;
    res.passed = rare.empty();
    for (const auto& cat : rare) {
        res.detail += (res.detail.empty() ? "rare: " : ", ") + cat;
    }
    return res;
}

CheckResult constant_features(const Dataset& ds) {
    Check check{CheckKind::ConstantFeature, {}};
    CheckResult res{check};
    std::size_t flagged = 0;
    for (const auto& col : ds.columns()) {
        FeatureStatistics st = summarize(col);
        bool all_zero = col.is_numeric() && st.zero_count &&
                        *st.zero_count == st.count - st.null_count &&
                        st.count > st.null_count;
        bool constant = st.is_constant || all_zero;
        res.per_feature[col.name] = constant ? 1.0 : 0.0;
        if (constant) {
            ++flagged;
            res.detail += (res.detail.empty() ? "" : ", ") + col.name;
        }
    }
    res.metric = ds.n_columns() == 0 ? 0.0 : static_cast<double>(flagged) / ds.n_columns();
    res.passed = flagged == 0;
    return res;
}

CheckResult run_check(const Dataset& ds, const Check& check) {
    switch (check.kind) {
        case CheckKind::Completeness: return completeness(ds, check);
        case CheckKind::Uniqueness: return uniqueness(ds, check);
        case CheckKind::Size: return size_check(ds, check);
        case CheckKind::InRange: return in_range(ds, check);
        case CheckKind::Duplicates: {
            CheckResult res = duplicate_ratio(ds, check.key_columns);
            res.check = check;
            res.passed = res.metric <= check.max_duplicate_ratio;
            return res;
        }
        case CheckKind::Outliers: {
            Dataset scoped = check.targets.empty() ? ds : ds.project(resolve_targets(ds, check));
            CheckResult res =
                outlier_ratio(scoped, {check.iqr_multiplier, check.outlier_scope});
            res.check = check;
            res.passed = res.metric <= check.max_outlier_ratio;
            return res;
        }
        case CheckKind::RareCategories: {
            if (check.targets.size() != 1) {
                throw std::runtime_error("RARE_CATEGORIES takes exactly one target feature");
            }
            CheckResult res = rare_categories(ds, check.targets[0], check.min_category_freq);
            res.check = check;
            return res;
        }
        case CheckKind::ConstantFeature: {
            Dataset scoped = check.targets.empty() ? ds : ds.project(resolve_targets(ds, check));
            CheckResult res = constant_features(scoped);
            res.check = check;
            return res;
        }
    }
    throw std::runtime_error("unhandled check kind");
}

Dataset retrieve_failed_records(const Dataset& ds, const CheckResult& result) {
    return ds.select_rows(result.failed_rows);
}

namespace {

using nlohmann::ordered_json;

Check parse_check(const ordered_json& jc) {
    Check c{check_kind_from_string(jc.at("kind").get<std::string>()), {}};
    if (jc.contains("targets")) {
        for (const auto& t : jc.at("targets")) c.targets.push_back(t.get<std::string>());
    }
    if (jc.contains("severity")) {
        std::string s = jc.at("severity").get<std::string>();
        if (s == "warning") {
            c.severity = Severity::Warning;
        } else if (s == "error") {
            c.severity = Severity::Error;
        } else {
            throw std::runtime_error("invalid severity '" + s + "'");
        }
    }
    ordered_json params = jc.value("params", ordered_json::object());
    for (auto it = params.begin(); it != params.end(); ++it) {
        const std::string& key = it.key();
        if (key == "min_completeness") c.min_completeness = it->get<double>();
        else if (key == "min_uniqueness") c.min_uniqueness = it->get<double>();
        else if (key == "min_rows") c.min_rows = it->get<std::size_t>();
        else if (key == "max_rows") c.max_rows = it->get<std::size_t>();
        else if (key == "min") c.min_value = it->get<double>();
        else if (key == "max") c.max_value = it->get<double>();
        else if (key == "key_columns") c.key_columns = it->get<std::vector<std::string>>();
        else if (key == "max_duplicate_ratio") c.max_duplicate_ratio = it->get<double>();
        else if (key == "k") c.iqr_multiplier = it->get<double>();
        else if (key == "scope") {
            std::string s = it->get<std::string>();
            if (s == "ROWS") c.outlier_scope = OutlierScope::Rows;
            else if (s == "CELLS") c.outlier_scope = OutlierScope::Cells;
            else throw std::runtime_error("invalid outlier scope '" + s + "'");
        }
        else if (key == "max_outlier_ratio") c.max_outlier_ratio = it->get<double>();
        else if (key == "min_freq") c.min_category_freq = it->get<double>();
        else throw std::runtime_error("unknown check parameter '" + key + "'");
    }
    return c;
}

}  // namespace

std::vector<Check> parse_checks_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw std::runtime_error(std::string("malformed checks config: ") + e.what());
    }
    if (!j.is_array()) throw std::runtime_error("checks config must be a JSON array");
    std::vector<Check> checks;
    for (const auto& jc : j) {
        for (auto it = jc.begin(); it != jc.end(); ++it) {
            if (it.key() != "kind" && it.key() != "targets" && it.key() != "params" &&
                it.key() != "severity") {
                throw std::runtime_error("unknown field '" + it.key() + "' in check");
            }
        }
        checks.push_back(parse_check(jc));
    }
    return checks;
}

std::vector<Check> read_checks_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checks config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_checks_json(buf.str());
}

}  // namespace dv

#include "dv/generator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <stdexcept>

#include "dv/statistics.hpp"
#include "json.hpp"

namespace dv {

namespace {

// Hand-rolled transforms on mt19937_64 keep output independent of the
// standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double normal(double mean, double stddev) {
        if (have_spare_) {
            have_spare_ = false;
            return mean + stddev * spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 1e-300) u1 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return mean + stddev * r * std::cos(2.0 * M_PI * u2);
    }

    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(engine_() % n);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

std::int64_t round_nonneg(double v) {
    return static_cast<std::int64_t>(std::llround(std::max(0.0, v)));
}

// Deterministic sample of k distinct values from `pool` (partial
// Fisher-Yates); pool is consumed in place.
std::vector<std::size_t> sample(std::vector<std::size_t>& pool, std::size_t k, Rng& rng) {
    if (k > pool.size()) throw std::runtime_error("corpus spec exceeds injection capacity");
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + rng.index(pool.size() - i);
        std::swap(pool[i], pool[j]);
        out.push_back(pool[i]);
    }
    pool.erase(pool.begin(), pool.begin() + k);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::pair<Dataset, GroundTruth> generate(const CorpusSpec& spec) {
    auto check_fraction = [](double f, const char* name) {
        if (f < 0.0 || f > 1.0) {
            throw std::runtime_error(std::string(name) + " must be in [0,1]");
        }
    };
    check_fraction(spec.duplicate_fraction, "duplicate_fraction");
    check_fraction(spec.null_fraction, "null_fraction");
    check_fraction(spec.outlier_fraction, "outlier_fraction");

    Rng rng(spec.seed);
    // Extra features draw from their own stream so adding them leaves the
    // base columns byte-identical to a spec without them.
    Rng extra_rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
    std::size_t n = spec.n_rows;
    std::size_t n_dup = static_cast<std::size_t>(spec.duplicate_fraction * static_cast<double>(n));
    if (n_dup >= n && n > 0) throw std::runtime_error("duplicate_fraction leaves no base rows");
    std::size_t n_base = n - n_dup;

    struct ColDef {
        std::string name;
        FeatureType type;
    };
    std::vector<ColDef> defs;
    for (std::size_t i = 0; i < spec.pattern_features; ++i) {
        defs.push_back({"pattern_" + std::to_string(i), FeatureType::Int});
    }
    if (spec.include_total_lines) defs.push_back({"total_lines", FeatureType::Int});
    if (spec.include_duration) defs.push_back({"duration", FeatureType::Int});
    if (spec.include_entry_rate) defs.push_back({"entry_rate", FeatureType::Float});
    if (spec.tool_columns) {
        defs.push_back({"fail_pass", FeatureType::String});
        defs.push_back({"list_of_hits", FeatureType::String});
        defs.push_back({"number_of_hits", FeatureType::Int});
    }
    for (std::size_t i = 0; i < spec.n_new_features; ++i) {
        defs.push_back({"extra_" + std::to_string(i), FeatureType::Int});
    }

    static const char* kHitLists[] = {"R1", "R1;R4", "R2", "R4;R9", "R1;R2;R9", "R7"};

    std::vector<FeatureColumn> cols;
    cols.reserve(defs.size());
    for (const auto& d : defs) {
        cols.push_back({d.name, d.type, {}});
        cols.back().values.reserve(n);
    }

    // Base rows, generated row-major so the stream of draws is stable under
    // column-set changes only at the end of each row.
    for (std::size_t r = 0; r < n_base; ++r) {
        std::size_t c = 0;
        for (std::size_t i = 0; i < spec.pattern_features; ++i) {
            double mu = 20.0 + 3.0 * static_cast<double>(i % 17);
            double sigma = 4.0 + static_cast<double>(i % 5);
            cols[c++].values.push_back(Value{round_nonneg(rng.normal(mu, sigma))});
        }
        if (spec.include_total_lines) {
            cols[c++].values.push_back(Value{round_nonneg(rng.normal(5000.0, 400.0))});
        }
        if (spec.include_duration) {
            cols[c++].values.push_back(Value{round_nonneg(rng.normal(3600.0, 300.0))});
        }
        if (spec.include_entry_rate) {
            cols[c++].values.push_back(Value{std::abs(rng.normal(2.5, 0.6))});
        }
        if (spec.tool_columns) {
            bool fail = rng.uniform01() < 0.2;
            cols[c++].values.push_back(Value{std::string(fail ? "FAIL" : "PASS")});
            cols[c++].values.push_back(
                Value{std::string(fail ? kHitLists[rng.index(6)] : "NONE")});
            // Total pattern hits over the batch; kept well spread so a clean
            // corpus has a healthy interquartile range on every numeric column.
            cols[c++].values.push_back(Value{round_nonneg(rng.normal(12.0, 3.0))});
        }
        for (std::size_t i = 0; i < spec.n_new_features; ++i) {
            cols[c++].values.push_back(Value{round_nonneg(extra_rng.normal(50.0, 10.0))});
        }
    }

    GroundTruth gt;
    gt.n_rows = n;
    gt.seed = spec.seed;
    for (std::size_t i = 0; i < spec.n_new_features; ++i) {
        gt.new_features.push_back("extra_" + std::to_string(i));
    }

    // Duplicates: copies of base rows appended at the end. The copied
    // sources are kept out of later corruption so full-row keys stay equal.
    std::set<std::size_t> protected_rows;
    for (std::size_t j = 0; j < n_dup; ++j) {
        std::size_t src = rng.index(n_base);
        for (auto& col : cols) col.values.push_back(col.values[src]);
        gt.duplicate_rows.push_back(n_base + j);
        protected_rows.insert(src);
    }

    std::vector<std::size_t> eligible;
    for (std::size_t r = 0; r < n_base; ++r) {
        if (!protected_rows.count(r)) eligible.push_back(r);
    }

    // Nulls: per-column row sample over eligible rows.
    if (spec.null_fraction > 0.0) {
        std::size_t per_col =
            static_cast<std::size_t>(spec.null_fraction * static_cast<double>(eligible.size()));
        for (auto& col : cols) {
            std::vector<std::size_t> pool = eligible;
            std::vector<std::size_t> rows = sample(pool, per_col, rng);
            for (std::size_t r : rows) col.values[r] = std::nullopt;
            if (!rows.empty()) gt.null_cells[col.name] = std::move(rows);
        }
    }

    // Outliers: one numeric cell per selected row, placed beyond Q3 + 10*IQR
    // of the column so the default 1.5 fence is guaranteed to catch it.
    if (spec.outlier_fraction > 0.0) {
        std::size_t n_out =
            static_cast<std::size_t>(spec.outlier_fraction * static_cast<double>(n));
        std::vector<std::size_t> numeric_cols;
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (cols[c].type == FeatureType::String) continue;
            std::vector<double> sorted = cols[c].numeric_values();
            std::sort(sorted.begin(), sorted.end());
            if (sorted.empty()) continue;
            if (quantile(sorted, 0.75) - quantile(sorted, 0.25) > 0.0) numeric_cols.push_back(c);
        }
        if (numeric_cols.empty() && n_out > 0) {
            throw std::runtime_error("outlier injection needs a non-constant numeric column");
        }
        std::vector<std::size_t> pool = eligible;
        std::vector<std::size_t> rows = sample(pool, n_out, rng);
        for (std::size_t j = 0; j < rows.size(); ++j) {
            std::size_t c = numeric_cols[j % numeric_cols.size()];
            auto& col = cols[c];
            std::vector<double> sorted = col.numeric_values();
            std::sort(sorted.begin(), sorted.end());
            double q3 = quantile(sorted, 0.75);
            double iqr = q3 - quantile(sorted, 0.25);
            double v = q3 + 10.0 * iqr + rng.uniform01() * iqr;
            if (col.type == FeatureType::Int) {
                col.values[rows[j]] = Value{static_cast<std::int64_t>(std::ceil(v))};
            } else {
                col.values[rows[j]] = Value{v};
            }
            gt.outlier_cells[col.name].push_back(rows[j]);
            gt.outlier_rows.push_back(rows[j]);
        }
        std::sort(gt.outlier_rows.begin(), gt.outlier_rows.end());
        for (auto& [name, cells] : gt.outlier_cells) std::sort(cells.begin(), cells.end());
    }

    // Drifted-batch mode: shift every base numeric feature by skew_shift
    // column stddevs.
    if (spec.skew_shift != 0.0) {
        for (auto& col : cols) {
            if (col.type == FeatureType::String) continue;
            bool is_extra = col.name.rfind("extra_", 0) == 0;
            if (is_extra) continue;
            FeatureStatistics st = summarize(col);
            if (!st.stddev || *st.stddev == 0.0) continue;
            double shift = spec.skew_shift * *st.stddev;
            for (auto& cell : col.values) {
                if (!cell) continue;
                if (col.type == FeatureType::Int) {
                    cell = Value{std::get<std::int64_t>(*cell) +
                                 static_cast<std::int64_t>(std::llround(shift))};
                } else {
                    cell = Value{std::get<double>(*cell) + shift};
                }
            }
        }
    }

    return {Dataset("generated-seed-" + std::to_string(spec.seed), std::move(cols)),
            std::move(gt)};
}

namespace {
using nlohmann::ordered_json;
}

void write_ground_truth(const GroundTruth& gt, const std::string& path) {
    ordered_json j;
    j["n_rows"] = gt.n_rows;
    j["seed"] = gt.seed;
    j["duplicate_rows"] = gt.duplicate_rows;
    j["null_cells"] = gt.null_cells;
    j["outlier_cells"] = gt.outlier_cells;
    j["outlier_rows"] = gt.outlier_rows;
    j["new_features"] = gt.new_features;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write ground truth '" + path + "'");
    out << j.dump(2) << "\n";
}

GroundTruth read_ground_truth(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open ground truth '" + path + "'");
    ordered_json j;
    try {
        in >> j;
    } catch (const ordered_json::parse_error& e) {
        throw std::runtime_error(std::string("malformed ground truth: ") + e.what());
    }
    GroundTruth gt;
    gt.n_rows = j.at("n_rows").get<std::size_t>();
    gt.seed = j.at("seed").get<std::uint64_t>();
    gt.duplicate_rows = j.at("duplicate_rows").get<std::vector<std::size_t>>();
    gt.null_cells = j.at("null_cells").get<std::map<std::string, std::vector<std::size_t>>>();
    gt.outlier_cells = j.at("outlier_cells").get<std::map<std::string, std::vector<std::size_t>>>();
    gt.outlier_rows = j.at("outlier_rows").get<std::vector<std::size_t>>();
    gt.new_features = j.at("new_features").get<std::vector<std::string>>();
    for (std::size_t r : gt.duplicate_rows) {
        if (r >= gt.n_rows) throw std::runtime_error("ground truth row index out of range");
    }
    return gt;
}

}  // namespace dv

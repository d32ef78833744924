#include "dv/skew.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace dv {

namespace {

void check_probability_vector(const std::vector<double>& p, const char* name) {
    double sum = 0.0;
    for (double v : p) {
        if (v < 0.0) throw std::invalid_argument(std::string(name) + " has a negative entry");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument(std::string(name) + " does not sum to 1 (sum = " +
                                    format_double(sum) + ")");
    }
}

double entropy_bits(const std::vector<double>& p) {
    double h = 0.0;
    for (double v : p) {
        if (v > 0.0) h -= v * std::log2(v);
    }
    return h;
}

}  // namespace

double js_divergence(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw std::invalid_argument("js_divergence: length mismatch");
    check_probability_vector(p, "p");
    check_probability_vector(q, "q");
    std::vector<double> m(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) m[i] = 0.5 * (p[i] + q[i]);
    double jsd = entropy_bits(m) - 0.5 * (entropy_bits(p) + entropy_bits(q));
    return std::clamp(jsd, 0.0, 1.0);
}

double cosine_similarity(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw std::invalid_argument("cosine_similarity: length mismatch");
    double dot = 0.0, np = 0.0, nq = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        dot += p[i] * q[i];
        np += p[i] * p[i];
        nq += q[i] * q[i];
    }
    if (np == 0.0 || nq == 0.0) throw std::invalid_argument("cosine_similarity: zero vector");
    return dot / (std::sqrt(np) * std::sqrt(nq));
}

SkewReport compare_batches(const Dataset& baseline, const Dataset& current,
                           const SkewConfig& cfg) {
    SkewReport report;
    report.jsd_threshold = cfg.jsd_threshold;
    report.row_count_change = {baseline.n_rows(), current.n_rows()};

    std::set<std::string> base_names;
    for (const auto& n : baseline.column_names()) base_names.insert(n);
    std::set<std::string> cur_names;
    for (const auto& n : current.column_names()) cur_names.insert(n);

    for (const auto& n : cur_names) {
        if (base_names.count(n)) report.common_features.push_back(n);
        else report.new_features.push_back(n);
    }
    for (const auto& n : base_names) {
        if (!cur_names.count(n)) report.missing_features.push_back(n);
    }

    for (const auto& name : report.common_features) {
        const auto& b = baseline.column(name);
        const auto& c = current.column(name);
        FeatureDivergence div;
        double b_null = b.size() ? static_cast<double>(b.null_count()) / b.size() : 0.0;
        double c_null = c.size() ? static_cast<double>(c.null_count()) / c.size() : 0.0;
        div.null_fraction_delta = c_null - b_null;

        if (b.is_numeric() && c.is_numeric()) {
            div.metric_kind = "numeric-histogram";
            std::vector<double> bv = b.numeric_values();
            std::vector<double> cv = c.numeric_values();
            if (bv.empty() || cv.empty()) continue;  // no distribution to compare
            auto [bmin, bmax] = std::minmax_element(bv.begin(), bv.end());
            auto [cmin, cmax] = std::minmax_element(cv.begin(), cv.end());
            double lo = std::min(*bmin, *cmin);
            double hi = std::max(*bmax, *cmax);
            std::vector<double> edges;
            if (lo == hi) {
                edges = {lo, hi};
            } else {
                edges.resize(cfg.n_bins + 1);
                for (std::size_t i = 0; i <= cfg.n_bins; ++i) {
                    edges[i] = lo + (hi - lo) * static_cast<double>(i) / cfg.n_bins;
                }
                edges.back() = hi;
            }
            div.jsd = js_divergence(histogram_on_edges(bv, edges).mass,
                                    histogram_on_edges(cv, edges).mass);
        } else {
            // Mixed numeric/string types compare on canonical string forms.
            div.metric_kind = "categorical";
            std::set<std::string> cats;
            auto collect = [&](const FeatureColumn& col) {
                for (std::size_t r = 0; r < col.size(); ++r) {
                    if (!col.is_null(r)) cats.insert(format_value(*col.values[r]));
                }
            };
            collect(b);
            collect(c);
            if (cats.empty()) continue;
            std::vector<std::string> order(cats.begin(), cats.end());
            auto dist = [&](const FeatureColumn& col) {
                std::map<std::string, std::size_t> freq;
                std::size_t total = 0;
                for (std::size_t r = 0; r < col.size(); ++r) {
                    if (col.is_null(r)) continue;
                    ++freq[format_value(*col.values[r])];
                    ++total;
                }
                std::vector<double> d(order.size(), 0.0);
                if (total == 0) return d;
                for (std::size_t i = 0; i < order.size(); ++i) {
                    auto it = freq.find(order[i]);
                    if (it != freq.end()) d[i] = static_cast<double>(it->second) / total;
                }
                return d;
            };
            std::vector<double> bd = dist(b);
            std::vector<double> cd = dist(c);
            auto is_zero = [](const std::vector<double>& v) {
                return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
            };
            if (is_zero(bd) || is_zero(cd)) continue;
            div.jsd = js_divergence(bd, cd);
        }
        report.per_feature_divergence[name] = div;
        if (div.jsd > cfg.jsd_threshold) report.flagged.push_back(name);
    }
    return report;
}

ReferenceProfile build_reference_profile(const Dataset& ds, std::size_t n_bins) {
    ReferenceProfile profile;
    profile.source_batch = ds.batch_id();
    for (const auto& col : ds.columns()) {
        ReferenceFeature feat;
        if (col.is_numeric()) {
            feat.kind = "numeric";
            feat.hist = histogram(col, n_bins);
            if (col.numeric_values().empty()) continue;
        } else {
            feat.kind = "categorical";
            FrequencyTable freq = frequency_table(col);
            std::size_t total = 0;
            for (const auto& [c, n] : freq) total += n;
            if (total == 0) continue;
            for (const auto& [c, n] : freq) {
                feat.probs[c] = static_cast<double>(n) / total;
            }
        }
        profile.features[col.name] = std::move(feat);
    }
    return profile;
}

namespace {
using nlohmann::ordered_json;
}

void write_reference_profile(const ReferenceProfile& profile, const std::string& path) {
    ordered_json j;
    j["source_batch"] = profile.source_batch;
    j["features"] = ordered_json::object();
    for (const auto& [name, feat] : profile.features) {
        ordered_json jf;
        jf["kind"] = feat.kind;
        if (feat.kind == "numeric") {
            jf["edges"] = feat.hist.edges;
            jf["mass"] = feat.hist.mass;
        } else {
            jf["probs"] = feat.probs;
        }
        j["features"][name] = std::move(jf);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write reference profile '" + path + "'");
    out << j.dump(2) << "\n";
}

ReferenceProfile read_reference_profile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open reference profile '" + path + "'");
    ordered_json j;
    try {
        in >> j;
    } catch (const ordered_json::parse_error& e) {
        throw std::runtime_error(std::string("malformed reference profile: ") + e.what());
    }
    ReferenceProfile profile;
    profile.source_batch = j.value("source_batch", "");
    for (auto it = j.at("features").begin(); it != j.at("features").end(); ++it) {
        ReferenceFeature feat;
        feat.kind = it->at("kind").get<std::string>();
        if (feat.kind == "numeric") {
            feat.hist.edges = it->at("edges").get<std::vector<double>>();
            feat.hist.mass = it->at("mass").get<std::vector<double>>();
        } else if (feat.kind == "categorical") {
            feat.probs = it->at("probs").get<std::map<std::string, double>>();
        } else {
            throw std::runtime_error("invalid reference feature kind '" + feat.kind + "'");
        }
        profile.features[it.key()] = std::move(feat);
    }
    return profile;
}

}  // namespace dv

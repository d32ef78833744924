#include "dv/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace dv {

FeatureStatistics summarize(const FeatureColumn& col) {
    FeatureStatistics st;
    st.count = col.size();
    std::unordered_set<std::string> distinct;
    double sum = 0.0;
    std::size_t n = 0;
    std::size_t zeros = 0;
    for (std::size_t r = 0; r < col.size(); ++r) {
        if (col.is_null(r)) {
            ++st.null_count;
            continue;
        }
        distinct.insert(format_value(*col.values[r]));
        if (col.is_numeric()) {
            double v = col.as_double(r);
            sum += v;
            ++n;
            if (v == 0.0) ++zeros;
            if (!st.min || v < *st.min) st.min = v;
            if (!st.max || v > *st.max) st.max = v;
        }
    }
    st.distinct_count = distinct.size();
    st.is_constant = st.distinct_count <= 1;
    if (col.is_numeric()) {
        st.zero_count = zeros;
        if (n > 0) {
            double mean = sum / static_cast<double>(n);
            double ssd = 0.0;
            for (std::size_t r = 0; r < col.size(); ++r) {
                if (col.is_null(r)) continue;
                double d = col.as_double(r) - mean;
                ssd += d * d;
            }
            st.mean = mean;
            st.stddev = st.is_constant ? 0.0 : std::sqrt(ssd / static_cast<double>(n));
        }
    }
    return st;
}

Histogram histogram(const FeatureColumn& col, std::size_t n_bins,
                    std::optional<std::pair<double, double>> range) {
    if (n_bins < 1) throw std::runtime_error("histogram requires n_bins >= 1");
    if (!col.is_numeric()) throw std::runtime_error("histogram requires a numeric column");
    std::vector<double> values = col.numeric_values();

    double lo, hi;
    if (range) {
        lo = range->first;
        hi = range->second;
        if (lo > hi) throw std::runtime_error("histogram range must have lo <= hi");
    } else if (values.empty()) {
        lo = 0.0;
        hi = 1.0;
    } else {
        auto [mn, mx] = std::minmax_element(values.begin(), values.end());
        lo = *mn;
        hi = *mx;
    }

    Histogram h;
    if (lo == hi) {
        h.edges = {lo, hi};
        h.mass = {values.empty() ? 0.0 : 1.0};
        return h;
    }
    h.edges.resize(n_bins + 1);
    for (std::size_t i = 0; i <= n_bins; ++i) {
        h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_bins);
    }
    h.edges.back() = hi;  // guard against rounding past the range
    return histogram_on_edges(values, h.edges);
}

Histogram histogram_on_edges(const std::vector<double>& values,
                             const std::vector<double>& edges) {
    if (edges.size() < 2) throw std::runtime_error("histogram edges must have >= 2 entries");
    Histogram h;
    h.edges = edges;
    std::size_t n_bins = edges.size() - 1;
    std::vector<std::size_t> counts(n_bins, 0);
    double lo = edges.front();
    double hi = edges.back();
    for (double v : values) {
        std::size_t bin;
        if (v <= lo) {
            bin = 0;
        } else if (v >= hi) {
            bin = n_bins - 1;
        } else {
            auto it = std::upper_bound(edges.begin(), edges.end(), v);
            bin = static_cast<std::size_t>(it - edges.begin()) - 1;
            if (bin >= n_bins) bin = n_bins - 1;
        }
        ++counts[bin];
    }
    h.mass.assign(n_bins, 0.0);
    if (!values.empty()) {
        double total = static_cast<double>(values.size());
        for (std::size_t i = 0; i < n_bins; ++i) {
            h.mass[i] = static_cast<double>(counts[i]) / total;
        }
    }
    return h;
}

FrequencyTable frequency_table(const FeatureColumn& col) {
    if (col.type != FeatureType::String) {
        throw std::runtime_error("frequency_table requires a STRING column");
    }
    FrequencyTable table;
    for (std::size_t r = 0; r < col.size(); ++r) {
        if (!col.is_null(r)) ++table[col.as_string(r)];
    }
    return table;
}

double quantile(const std::vector<double>& sorted_values, double q) {
    if (sorted_values.empty()) throw std::runtime_error("quantile of empty sequence");
    if (q < 0.0 || q > 1.0) throw std::runtime_error("quantile q must be in [0,1]");
    double pos = q * static_cast<double>(sorted_values.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted_values.size()) return sorted_values.back();
    double frac = pos - static_cast<double>(lo);
    return sorted_values[lo] + frac * (sorted_values[lo + 1] - sorted_values[lo]);
}

}  // namespace dv

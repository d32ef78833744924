#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dv/dataset.hpp"

namespace dv {

struct FeatureStatistics {
    std::size_t count = 0;       // rows, including nulls
    std::size_t null_count = 0;
    std::size_t distinct_count = 0;  // nulls excluded
    // Numeric columns only.
    std::optional<double> min;
    std::optional<double> max;
    std::optional<double> mean;
    std::optional<double> stddev;  // population
    std::optional<std::size_t> zero_count;
    bool is_constant = false;  // distinct_count <= 1

    double null_fraction() const {
        return count == 0 ? 0.0 : static_cast<double>(null_count) / static_cast<double>(count);
    }
};

struct Histogram {
    std::vector<double> edges;  // n_bins + 1, ascending
    std::vector<double> mass;   // n_bins, sums to 1 (all-zero if no values)

    std::size_t n_bins() const { return mass.size(); }
};

using FrequencyTable = std::map<std::string, std::size_t>;

FeatureStatistics summarize(const FeatureColumn& col);

/// Equal-width bins. Default range is [min, max] of the non-null values;
/// min == max collapses to a single bin holding all mass. With an explicit
/// range, values outside clamp into the end bins. Last bin is closed on
/// the right.
Histogram histogram(const FeatureColumn& col, std::size_t n_bins = 10,
                    std::optional<std::pair<double, double>> range = std::nullopt);

/// Bin pre-extracted values on fixed edges, clamping out-of-range values
/// into the end bins. Used wherever two distributions must share edges.
Histogram histogram_on_edges(const std::vector<double>& values,
                             const std::vector<double>& edges);

FrequencyTable frequency_table(const FeatureColumn& col);

/// Quartile by linear interpolation over sorted values, q in [0,1].
double quantile(const std::vector<double>& sorted_values, double q);

}  // namespace dv

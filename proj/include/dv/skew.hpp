#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dv/dataset.hpp"
#include "dv/statistics.hpp"

namespace dv {

/// Jensen-Shannon divergence in bits: JSD(p,q) = H(m) - (H(p)+H(q))/2 with
/// m = (p+q)/2. Base-2 entropy keeps the result in [0,1]; 0*log0 == 0.
/// Inputs must be same-length probability vectors (sum 1 within 1e-9).
double js_divergence(const std::vector<double>& p, const std::vector<double>& q);

/// dot(p,q) / (|p| * |q|); zero vectors are a hard error.
double cosine_similarity(const std::vector<double>& p, const std::vector<double>& q);

struct FeatureDivergence {
    double jsd = 0.0;
    std::string metric_kind;  // "numeric-histogram" | "categorical"
    double null_fraction_delta = 0.0;  // current - baseline
};

struct SkewReport {
    std::vector<std::string> common_features;
    std::vector<std::string> new_features;      // in current, not baseline
    std::vector<std::string> missing_features;  // in baseline, not current
    std::map<std::string, FeatureDivergence> per_feature_divergence;
    std::pair<std::size_t, std::size_t> row_count_change{0, 0};
    std::vector<std::string> flagged;  // jsd > threshold
    double jsd_threshold = 0.1;
};

struct SkewConfig {
    std::size_t n_bins = 10;
    double jsd_threshold = 0.1;
};

/// Cross-batch comparison. Numeric features are histogrammed on shared
/// edges spanning both batches' value ranges; STRING features use frequency
/// distributions over the union of categories. Features with no non-null
/// values on either side carry no divergence entry.
SkewReport compare_batches(const Dataset& baseline, const Dataset& current,
                           const SkewConfig& cfg = {});

/// Reference profile consumed by the stream module's drift detector.
struct ReferenceFeature {
    std::string kind;  // "numeric" | "categorical"
    Histogram hist;                          // numeric
    std::map<std::string, double> probs;     // categorical
};

struct ReferenceProfile {
    std::string source_batch;
    std::map<std::string, ReferenceFeature> features;
};

ReferenceProfile build_reference_profile(const Dataset& ds, std::size_t n_bins = 10);
void write_reference_profile(const ReferenceProfile& profile, const std::string& path);
ReferenceProfile read_reference_profile(const std::string& path);

}  // namespace dv

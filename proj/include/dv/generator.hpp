#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dv/dataset.hpp"

namespace dv {

/// Synthetic HW-log-style training batch: integer pattern-count columns,
/// timing columns, tool verdict columns, plus configurable injected errors
/// whose exact locations are recorded as ground truth.
struct CorpusSpec {
    std::size_t n_rows = 1000;
    std::uint64_t seed = 0;
    std::size_t pattern_features = 10;
    bool include_entry_rate = true;
    bool include_duration = true;
    bool include_total_lines = true;
    bool tool_columns = true;

    double duplicate_fraction = 0.0;
    double null_fraction = 0.0;
    double outlier_fraction = 0.0;
    std::size_t n_new_features = 0;
    double skew_shift = 0.0;  // mean shift per numeric feature, in column stddevs
};

struct GroundTruth {
    std::size_t n_rows = 0;
    std::uint64_t seed = 0;
    /// Rows whose full-row key repeats an earlier row.
    std::vector<std::size_t> duplicate_rows;
    std::map<std::string, std::vector<std::size_t>> null_cells;
    std::map<std::string, std::vector<std::size_t>> outlier_cells;
    std::vector<std::size_t> outlier_rows;
    std::vector<std::string> new_features;
};

/// Deterministic for a fixed spec: same (spec, seed) gives byte-identical
/// CSV output. Duplicates are copied before null/outlier injection and the
/// copied rows are excluded from further corruption, so injected counts are
/// exact under full-row keys. Injected outliers sit beyond Q3 + 10*IQR.
std::pair<Dataset, GroundTruth> generate(const CorpusSpec& spec);

void write_ground_truth(const GroundTruth& gt, const std::string& path);
GroundTruth read_ground_truth(const std::string& path);

}  // namespace dv

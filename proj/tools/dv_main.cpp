#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dv/checks.hpp"
#include "dv/dataset.hpp"
#include "dv/generator.hpp"
#include "dv/report.hpp"
#include "dv/schema.hpp"
#include "dv/skew.hpp"
#include "dv/statistics.hpp"
#include "dv/stream.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitAnomalies = 1;
constexpr int kExitError = 2;

struct CommonOpts {
    std::string format = "text";
    std::string output;
    bool timestamp = false;
};

void emit_report(const dv::ValidationReport& report, const CommonOpts& opts) {
    std::string body =
        opts.format == "json" ? dv::render_json(report) : dv::render_text(report);
    if (opts.timestamp) {
        char buf[64];
        std::time_t now = std::time(nullptr);
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        body = std::string("# generated at ") + buf + "\n" + body;
    }
    if (!opts.output.empty()) {
        std::ofstream out(opts.output, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + opts.output + "'");
        out << body;
    } else {
        std::cout << body;
    }
}

std::vector<dv::Check> default_checks() {
    dv::Check dup{dv::CheckKind::Duplicates, {}};
    dup.max_duplicate_ratio = 0.0;
    dv::Check out{dv::CheckKind::Outliers, {}};
    out.iqr_multiplier = 1.5;
    out.outlier_scope = dv::OutlierScope::Rows;
    out.max_outlier_ratio = 0.15;
    return {dup, out};
}

int cmd_infer_schema(const std::string& input, const std::string& output,
                     std::size_t domain_max_distinct, double null_slack) {
    dv::Dataset ds = dv::load_csv_file(input);
    dv::Schema schema = dv::infer_schema(ds, {domain_max_distinct, null_slack});
    dv::write_schema(schema, output);
    std::cout << "schema version " << schema.version << ": " << schema.features.size()
              << " features from " << ds.n_rows() << " rows\n";
    return kExitPass;
}

int cmd_validate(const std::string& input, const std::string& schema_path,
                 const std::string& checks_path, const std::string& failed_records,
                 bool accept_revision, const CommonOpts& opts) {
    dv::Dataset ds = dv::load_csv_file(input);
    dv::Schema schema = dv::read_schema(schema_path);

    dv::ReportInputs inputs;
    inputs.batch_id = input;
    inputs.schema_version = schema.version;
    inputs.n_rows = ds.n_rows();
    inputs.total_cells = ds.n_rows() * ds.n_columns();
    inputs.schema_anomalies = dv::validate_schema(ds, schema);

    std::vector<dv::Check> checks =
        checks_path.empty() ? default_checks() : dv::read_checks_config(checks_path);
    for (const auto& check : checks) {
        inputs.check_results.push_back(dv::run_check(ds, check));
    }

    inputs.revision = dv::suggest_schema_update(inputs.schema_anomalies, ds, schema);
    if (inputs.revision) {
        if (accept_revision) {
            dv::write_schema(inputs.revision->proposed, schema_path);
            std::cerr << "accepted schema revision " << inputs.revision->proposed.version
                      << " (" << inputs.revision->changes.size() << " changes)\n";
        } else {
            dv::write_schema(inputs.revision->proposed, schema_path + ".rev.json");
        }
    }

    dv::ValidationReport report = dv::build_report(inputs);
    emit_report(report, opts);

    if (!failed_records.empty()) {
        std::set<std::size_t> rows;
        for (const auto& a : inputs.schema_anomalies) {
            rows.insert(a.failed_rows.begin(), a.failed_rows.end());
        }
        for (const auto& res : inputs.check_results) {
            if (!res.passed) rows.insert(res.failed_rows.begin(), res.failed_rows.end());
        }
        dv::Dataset failed = ds.select_rows({rows.begin(), rows.end()});
        std::ofstream out(failed_records, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + failed_records + "'");
        failed.write_csv(out);
    }
    return report.overall == dv::Verdict::Pass ? kExitPass : kExitAnomalies;
}

int cmd_compare(const std::string& baseline_path, const std::string& current_path,
                std::size_t bins, double jsd_threshold, const std::string& export_profile,
                const CommonOpts& opts) {
    dv::Dataset baseline = dv::load_csv_file(baseline_path);
    dv::Dataset current = dv::load_csv_file(current_path);
    dv::SkewReport skew = dv::compare_batches(baseline, current, {bins, jsd_threshold});

    if (!export_profile.empty()) {
        dv::write_reference_profile(dv::build_reference_profile(baseline, bins), export_profile);
    }

    dv::ReportInputs inputs;
    inputs.batch_id = current_path;
    inputs.n_rows = current.n_rows();
    inputs.skew = skew;
    dv::ValidationReport report = dv::build_report(inputs);
    emit_report(report, opts);
    return report.overall == dv::Verdict::Pass ? kExitPass : kExitAnomalies;
}

int cmd_stream(const std::string& schema_path, const std::string& reference_path,
               const std::string& input_path, std::size_t window, std::size_t min_window,
               double jsd_threshold, bool exclude_anomalous, const CommonOpts& opts) {
    dv::Schema schema = dv::read_schema(schema_path);
    std::optional<dv::ReferenceProfile> reference;
    if (!reference_path.empty()) reference = dv::read_reference_profile(reference_path);

    dv::StreamConfig cfg;
    cfg.window_size = window;
    cfg.min_window = min_window;
    cfg.exclude_anomalous = exclude_anomalous;
    dv::StreamState state(schema, cfg);

    std::ifstream file;
    std::istream* in = &std::cin;
    if (!input_path.empty()) {
        file.open(input_path, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open '" + input_path + "'");
        in = &file;
    }

    dv::StreamSummary summary;
    std::set<std::string> drifted;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(*in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::ordered_json verdict_json;
        verdict_json["record"] = state.records_seen();
        try {
            dv::Record record = dv::parse_record_line(line, schema);
            dv::RecordVerdict verdict = dv::validate_record(record, state);
            verdict_json["accepted"] = verdict.accepted();
            verdict_json["anomalies"] = nlohmann::ordered_json::array();
            for (const auto& a : verdict.anomalies) {
                verdict_json["anomalies"].push_back(
                    {{"kind", dv::to_string(a.kind)}, {"feature", a.feature}, {"detail", a.detail}});
            }
            if (!verdict.accepted()) ++summary.rejected;
        } catch (const std::exception& e) {
            state.bump_record();
            verdict_json["accepted"] = false;
            verdict_json["anomalies"] = nlohmann::ordered_json::array(
                {{{"kind", "TYPE_MISMATCH"}, {"feature", ""}, {"detail", e.what()}}});
            ++summary.rejected;
        }
        std::cout << verdict_json.dump() << "\n";

        if (reference && state.records_seen() % 100 == 0) {
            for (const auto& [feature, status] : dv::window_drift(state, *reference)) {
                if (status.ready && status.jsd > jsd_threshold && !drifted.count(feature)) {
                    drifted.insert(feature);
                    ++summary.drift_alerts;
                    nlohmann::ordered_json alert = {{"alert", "drift"},
                                                    {"feature", feature},
                                                    {"jsd", status.jsd},
                                                    {"record", state.records_seen()}};
                    std::cerr << alert.dump() << "\n";
                }
            }
        }
    }
    // End-of-input drift pass covers streams shorter than the check interval.
    if (reference) {
        for (const auto& [feature, status] : dv::window_drift(state, *reference)) {
            if (status.ready && status.jsd > jsd_threshold && !drifted.count(feature)) {
                drifted.insert(feature);
                ++summary.drift_alerts;
                nlohmann::ordered_json alert = {
                    {"alert", "drift"}, {"feature", feature}, {"jsd", status.jsd}};
                std::cerr << alert.dump() << "\n";
            }
        }
    }

    summary.records_seen = state.records_seen();
    dv::ReportInputs inputs;
    inputs.batch_id = input_path.empty() ? "stdin" : input_path;
    inputs.schema_version = schema.version;
    inputs.stream = summary;
    emit_report(dv::build_report(inputs), opts);
    return summary.rejected == 0 && summary.drift_alerts == 0 ? kExitPass : kExitAnomalies;
}

int cmd_generate(const dv::CorpusSpec& spec, const std::string& output,
                 const std::string& ground_truth) {
    auto [ds, gt] = dv::generate(spec);
    std::ofstream out(output, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + output + "'");
    ds.write_csv(out);
    if (!ground_truth.empty()) dv::write_ground_truth(gt, ground_truth);
    std::cout << "wrote " << ds.n_rows() << " rows x " << ds.n_columns() << " features to "
              << output << "\n";
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dv - data validation for ML training batches"};
    app.require_subcommand(1);

    // infer-schema
    auto* infer = app.add_subcommand("infer-schema", "Infer a first-version schema from a batch");
    std::string in_path, out_path;
    std::size_t domain_max_distinct = 32;
    double null_slack = 0.0;
    infer->add_option("--input", in_path, "Input CSV batch")->required();
    infer->add_option("--output", out_path, "Schema JSON output path")->required();
    infer->add_option("--domain-max-distinct", domain_max_distinct,
                      "Max distinct values for a categorical domain constraint");
    infer->add_option("--null-slack", null_slack, "Slack added to observed null fractions");

    // validate
    auto* validate = app.add_subcommand("validate", "Validate a batch against a schema");
    std::string v_input, v_schema, v_checks, v_failed;
    bool v_accept = false;
    CommonOpts v_opts;
    validate->add_option("--input", v_input, "Input CSV batch")->required();
    validate->add_option("--schema", v_schema, "Schema JSON file")->required();
    validate->add_option("--checks", v_checks, "Checks-config JSON file");
    validate->add_option("--format", v_opts.format, "Report format")
        ->check(CLI::IsMember({"text", "json"}));
    validate->add_option("--output", v_opts.output, "Write the report to a file");
    validate->add_option("--failed-records", v_failed, "Export failed records as CSV");
    validate->add_flag("--accept-schema-revision", v_accept,
                       "Write the proposed schema revision over the schema file");
    validate->add_flag("--timestamp", v_opts.timestamp, "Prefix the report with a timestamp line");

    // compare
    auto* compare = app.add_subcommand("compare", "Cross-batch skew report");
    std::string c_baseline, c_current, c_profile;
    std::size_t c_bins = 10;
    double c_threshold = 0.1;
    CommonOpts c_opts;
    compare->add_option("--baseline", c_baseline, "Baseline CSV batch")->required();
    compare->add_option("--current", c_current, "Current CSV batch")->required();
    compare->add_option("--bins", c_bins, "Histogram bins for numeric features");
    compare->add_option("--jsd-threshold", c_threshold, "Flagging threshold for per-feature JSD");
    compare->add_option("--export-profile", c_profile,
                        "Write the baseline's reference profile (for `stream`)");
    compare->add_option("--format", c_opts.format, "Report format")
        ->check(CLI::IsMember({"text", "json"}));
    compare->add_option("--output", c_opts.output, "Write the report to a file");
    compare->add_flag("--timestamp", c_opts.timestamp, "Prefix the report with a timestamp line");

    // stream
    auto* stream = app.add_subcommand("stream", "Validate records one at a time");
    std::string s_schema, s_reference, s_input;
    std::size_t s_window = 1000, s_min_window = 100;
    double s_threshold = 0.1;
    bool s_exclude = false;
    CommonOpts s_opts;
    stream->add_option("--schema", s_schema, "Schema JSON file")->required();
    stream->add_option("--reference", s_reference, "Reference profile from `compare --export-profile`");
    stream->add_option("--input", s_input, "Record file (default: standard input)");
    stream->add_option("--window", s_window, "Sliding window size");
    stream->add_option("--min-window", s_min_window, "Records required before drift checks");
    stream->add_option("--jsd-threshold", s_threshold, "Drift alert threshold");
    stream->add_flag("--exclude-anomalous", s_exclude,
                     "Keep anomalous values out of the running statistics");
    stream->add_option("--format", s_opts.format, "Summary format")
        ->check(CLI::IsMember({"text", "json"}));

    // generate
    auto* generate = app.add_subcommand("generate", "Write a synthetic batch with known errors");
    dv::CorpusSpec spec;
    std::string g_output, g_gt;
    generate->add_option("--rows", spec.n_rows, "Row count")->required();
    generate->add_option("--seed", spec.seed, "RNG seed");
    generate->add_option("--pattern-features", spec.pattern_features,
                         "Number of integer pattern-count columns");
    generate->add_option("--duplicates", spec.duplicate_fraction, "Fraction of duplicated rows");
    generate->add_option("--nulls", spec.null_fraction, "Per-feature null fraction");
    generate->add_option("--outliers", spec.outlier_fraction, "Fraction of rows given an outlying cell");
    generate->add_option("--new-features", spec.n_new_features, "Extra columns to append");
    generate->add_option("--skew-shift", spec.skew_shift,
                         "Mean shift per numeric feature, in column stddevs");
    generate->add_option("--output", g_output, "Output CSV path")->required();
    generate->add_option("--ground-truth", g_gt, "Ground-truth JSON sidecar");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    }

    try {
        if (*infer) return cmd_infer_schema(in_path, out_path, domain_max_distinct, null_slack);
        if (*validate) return cmd_validate(v_input, v_schema, v_checks, v_failed, v_accept, v_opts);
        if (*compare) return cmd_compare(c_baseline, c_current, c_bins, c_threshold, c_profile, c_opts);
        if (*stream) return cmd_stream(s_schema, s_reference, s_input, s_window, s_min_window,
                                       s_threshold, s_exclude, s_opts);
        if (*generate) return cmd_generate(spec, g_output, g_gt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}

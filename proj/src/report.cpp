#include "dv/report.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

namespace dv {

std::string to_string(Verdict v) {
    return v == Verdict::Pass ? "PASS" : "ANOMALIES";
}

std::string to_string(MitigationAction a) {
    switch (a) {
        case MitigationAction::ImputeFixedValue: return "IMPUTE_FIXED_VALUE";
        case MitigationAction::UpdateSchema: return "UPDATE_SCHEMA";
        case MitigationAction::InvestigateSource: return "INVESTIGATE_SOURCE";
        case MitigationAction::Deduplicate: return "DEDUPLICATE";
        case MitigationAction::ReviewOutliers: return "REVIEW_OUTLIERS";
    }
    return "?";
}

namespace {

std::string section_title(CheckKind kind) {
    switch (kind) {
        case CheckKind::Completeness: return "Completeness";
        case CheckKind::Uniqueness: return "Uniqueness";
        case CheckKind::Size: return "Size";
        case CheckKind::InRange: return "In range";
        case CheckKind::Duplicates: return "Duplicated";
        case CheckKind::Outliers: return "Outliers";
        case CheckKind::RareCategories: return "Rare categories";
        case CheckKind::ConstantFeature: return "Constant features";
    }
    return "?";
}

std::string metric_name(CheckKind kind) {
    switch (kind) {
        case CheckKind::Completeness: return "completeness";
        case CheckKind::Uniqueness: return "uniqueness";
        case CheckKind::Size: return "row count";
        case CheckKind::InRange: return "in-range ratio";
        case CheckKind::Duplicates: return "duplicate ratio";
        case CheckKind::Outliers: return "outlier ratio";
        case CheckKind::RareCategories: return "rare category ratio";
        case CheckKind::ConstantFeature: return "constant feature ratio";
    }
    return "?";
}

bool per_feature_section(CheckKind kind) {
    return kind == CheckKind::Completeness || kind == CheckKind::Uniqueness ||
           kind == CheckKind::InRange;
}

ReportSection section_for_check(const CheckResult& res) {
    ReportSection sec;
    sec.title = section_title(res.check.kind);
    if (per_feature_section(res.check.kind) && !res.per_feature.empty()) {
        for (const auto& [feature, value] : res.per_feature) {
            bool ok = true;
            switch (res.check.kind) {
                case CheckKind::Completeness: ok = value >= res.check.min_completeness; break;
                case CheckKind::Uniqueness: ok = value >= res.check.min_uniqueness; break;
                case CheckKind::InRange: ok = value >= 1.0; break;
                default: break;
            }
            sec.metrics.push_back({feature, metric_name(res.check.kind), value, ok});
        }
    } else if (res.check.kind == CheckKind::RareCategories) {
        std::string target = res.check.targets.empty() ? "Dataset" : res.check.targets[0];
        sec.metrics.push_back({target, metric_name(res.check.kind), res.metric, res.passed});
    } else {
        sec.metrics.push_back({"Dataset", metric_name(res.check.kind), res.metric, res.passed});
    }
    if (!res.detail.empty()) sec.anomalies.push_back(res.detail);
    return sec;
}

ReportSection schema_section(const ReportInputs& inputs) {
    ReportSection sec;
    sec.title = "Schema validation";
    std::int64_t new_features = 0, missing = 0, type_mismatch = 0, not_in_minmax = 0,
                 domain = 0, null_frac = 0;
    for (const auto& a : inputs.schema_anomalies) {
        switch (a.kind) {
            case AnomalyKind::NewFeature: ++new_features; break;
            case AnomalyKind::MissingFeature: ++missing; break;
            case AnomalyKind::TypeMismatch: ++type_mismatch; break;
            case AnomalyKind::NotInMinMax: not_in_minmax += static_cast<std::int64_t>(a.count); break;
            case AnomalyKind::DomainViolation: domain += static_cast<std::int64_t>(a.count); break;
            case AnomalyKind::NullFractionExceeded: ++null_frac; break;
        }
        sec.anomalies.push_back(to_string(a.kind) + " " + a.feature +
                                (a.detail.empty() ? "" : ": " + a.detail));
    }
    if (new_features) sec.counts.push_back({"New features", new_features});
    if (missing) sec.counts.push_back({"Missing features", missing});
    if (type_mismatch) sec.counts.push_back({"Type mismatch", type_mismatch});
    if (not_in_minmax) sec.counts.push_back({"Not in Min-Max", not_in_minmax});
    if (domain) sec.counts.push_back({"Domain violation", domain});
    if (null_frac) sec.counts.push_back({"Null fraction exceeded", null_frac});
    // Count plus a cell-level ratio reading of the same number.
    if (not_in_minmax && inputs.total_cells > 0) {
        sec.metrics.push_back({"Not in Min-Max", "cell ratio",
                               static_cast<double>(not_in_minmax) /
                                   static_cast<double>(inputs.total_cells),
                               false});
    }
    return sec;
}

ReportSection skew_section(const SkewReport& skew) {
    ReportSection sec;
    sec.title = "Skew";
    if (!skew.new_features.empty()) {
        sec.counts.push_back({"New features", static_cast<std::int64_t>(skew.new_features.size())});
    }
    if (!skew.missing_features.empty()) {
        sec.counts.push_back(
            {"Missing features", static_cast<std::int64_t>(skew.missing_features.size())});
    }
    for (const auto& name : skew.flagged) {
        sec.metrics.push_back({name, "jsd", skew.per_feature_divergence.at(name).jsd, false});
    }
    for (const auto& name : skew.new_features) {
        sec.anomalies.push_back("new feature '" + name + "'");
    }
    for (const auto& name : skew.missing_features) {
        sec.anomalies.push_back("missing feature '" + name + "'");
    }
    return sec;
}

ReportSection stream_section(const StreamSummary& stream) {
    ReportSection sec;
    sec.title = "Stream";
    sec.metrics.push_back({"Dataset", "records", static_cast<double>(stream.records_seen), true});
    sec.metrics.push_back(
        {"Dataset", "rejected records", static_cast<double>(stream.rejected), stream.rejected == 0});
    sec.metrics.push_back({"Dataset", "drift alerts", static_cast<double>(stream.drift_alerts),
                           stream.drift_alerts == 0});
    return sec;
}

bool section_empty(const ReportSection& sec) {
    return sec.counts.empty() && sec.metrics.empty() && sec.anomalies.empty();
}

}  // namespace

std::vector<MitigationSuggestion> suggest_mitigations(const ReportInputs& inputs,
                                                      const ValidationReport& report,
                                                      const MitigationConfig& cfg) {
    std::vector<MitigationSuggestion> out;
    (void)report;

    bool schema_update_suggested = false;
    for (const auto& a : inputs.schema_anomalies) {
        switch (a.kind) {
            case AnomalyKind::NullFractionExceeded:
                out.push_back({"Schema validation", "Null fraction exceeded",
                               MitigationAction::ImputeFixedValue,
                               "impute nulls in '" + a.feature + "' with " +
                                   format_double(cfg.impute_value)});
                break;
            case AnomalyKind::NewFeature:
            case AnomalyKind::NotInMinMax: {
                if (schema_update_suggested) break;
                std::string target =
                    a.kind == AnomalyKind::NewFeature ? "New features" : "Not in Min-Max";
                std::string msg = "review the proposed schema revision";
                if (inputs.revision) {
                    msg += " (version " + std::to_string(inputs.revision->proposed.version) +
                           ", " + std::to_string(inputs.revision->changes.size()) + " changes)";
                }
                out.push_back({"Schema validation", target, MitigationAction::UpdateSchema, msg});
                schema_update_suggested = true;
                break;
            }
            case AnomalyKind::MissingFeature:
            case AnomalyKind::TypeMismatch:
                out.push_back({"Schema validation",
                               a.kind == AnomalyKind::MissingFeature ? "Missing features"
                                                                     : "Type mismatch",
                               MitigationAction::InvestigateSource,
                               "investigate the source of '" + a.feature + "': " + a.detail});
                break;
            case AnomalyKind::DomainViolation:
                out.push_back({"Schema validation", "Domain violation",
                               MitigationAction::UpdateSchema,
                               "extend the domain of '" + a.feature + "' if the categories are valid"});
                break;
        }
    }

    for (const auto& res : inputs.check_results) {
        if (res.passed) continue;
        switch (res.check.kind) {
            case CheckKind::Duplicates: {
                std::string keys = res.check.key_columns.empty() ? "all columns" : "";
                for (const auto& k : res.check.key_columns) {
                    keys += (keys.empty() ? "" : ", ") + k;
                }
                out.push_back({"Duplicated", "Dataset", MitigationAction::Deduplicate,
                               "drop " + std::to_string(res.failed_rows.size()) +
                                   " duplicate row(s) keyed on " + keys});
                break;
            }
            case CheckKind::Outliers:
                out.push_back({"Outliers", "Dataset", MitigationAction::ReviewOutliers,
                               "review " + std::to_string(res.failed_rows.size()) +
                                   " row(s) with outlying cells"});
                break;
            case CheckKind::Completeness:
                for (const auto& [feature, value] : res.per_feature) {
                    if (value < res.check.min_completeness) {
                        out.push_back({"Completeness", feature,
                                       MitigationAction::ImputeFixedValue,
                                       "impute nulls in '" + feature + "' with " +
                                           format_double(cfg.impute_value)});
                    }
                }
                break;
            default:
                break;
        }
    }

    if (inputs.skew) {
        for (const auto& name : inputs.skew->flagged) {
            out.push_back({"Skew", name, MitigationAction::InvestigateSource,
                           "distribution of '" + name + "' shifted (jsd " +
                               format_double(inputs.skew->per_feature_divergence.at(name).jsd) +
                               "); explore the data sources and confirm the anomaly"});
        }
    }
    return out;
}

ValidationReport build_report(const ReportInputs& inputs) {
    ValidationReport report;
    report.batch_id = inputs.batch_id;
    report.schema_version = inputs.schema_version;

    std::vector<ReportSection> sections;
    sections.push_back(schema_section(inputs));

    // Duplicated and Outliers come first; the rest keep configuration order.
    for (const auto& res : inputs.check_results) {
        if (res.check.kind == CheckKind::Duplicates) sections.push_back(section_for_check(res));
    }
    for (const auto& res : inputs.check_results) {
        if (res.check.kind == CheckKind::Outliers) sections.push_back(section_for_check(res));
    }
    for (const auto& res : inputs.check_results) {
        if (res.check.kind != CheckKind::Duplicates && res.check.kind != CheckKind::Outliers) {
            sections.push_back(section_for_check(res));
        }
    }
    if (inputs.skew) sections.push_back(skew_section(*inputs.skew));
    if (inputs.stream) sections.push_back(stream_section(*inputs.stream));

    for (auto& sec : sections) {
        if (!section_empty(sec)) report.sections.push_back(std::move(sec));
    }

    bool anomalies = !inputs.schema_anomalies.empty();
    for (const auto& res : inputs.check_results) {
        if (!res.passed && res.check.severity == Severity::Error) anomalies = true;
    }
    if (inputs.skew && (!inputs.skew->flagged.empty() || !inputs.skew->new_features.empty() ||
                        !inputs.skew->missing_features.empty())) {
        anomalies = true;
    }
    if (inputs.stream && (inputs.stream->rejected > 0 || inputs.stream->drift_alerts > 0)) {
        anomalies = true;
    }
    report.overall = anomalies ? Verdict::Anomalies : Verdict::Pass;
    report.mitigations = suggest_mitigations(inputs, report);
    return report;
}

std::string render_text(const ValidationReport& report) {
    std::string out;
    for (const auto& sec : report.sections) {
        out += sec.title + "\n";
        if (!sec.counts.empty()) {
            out += "{";
            for (std::size_t i = 0; i < sec.counts.size(); ++i) {
                if (i) out += ", ";
                out += "'" + sec.counts[i].name + "': " + std::to_string(sec.counts[i].value);
            }
            out += "}\n";
        }
        for (const auto& m : sec.metrics) {
            out += "{'" + m.target + "': '" + m.metric_name + ": " + format_double(m.value) +
                   "'}\n";
        }
    }
    if (!report.mitigations.empty()) {
        out += "Mitigations\n";
        for (const auto& m : report.mitigations) {
            out += "- " + to_string(m.action) + " [" + m.section + "/" + m.target + "]: " +
                   m.message + "\n";
        }
    }
    out += "Overall: " + to_string(report.overall) + "\n";
    return out;
}

namespace {
using nlohmann::ordered_json;
}

std::string render_json(const ValidationReport& report) {
    ordered_json j;
    j["batch_id"] = report.batch_id;
    if (report.schema_version) {
        j["schema_version"] = *report.schema_version;
    } else {
        j["schema_version"] = nullptr;
    }
    j["overall"] = to_string(report.overall);
    j["sections"] = ordered_json::array();
    for (const auto& sec : report.sections) {
        ordered_json js;
        js["title"] = sec.title;
        js["counts"] = ordered_json::array();
        for (const auto& c : sec.counts) {
            js["counts"].push_back({{"name", c.name}, {"value", c.value}});
        }
        js["metrics"] = ordered_json::array();
        for (const auto& m : sec.metrics) {
            js["metrics"].push_back({{"target", m.target},
                                     {"name", m.metric_name},
                                     {"value", m.value},
                                     {"passed", m.passed}});
        }
        js["anomalies"] = sec.anomalies;
        j["sections"].push_back(std::move(js));
    }
    j["mitigations"] = ordered_json::array();
    for (const auto& m : report.mitigations) {
        j["mitigations"].push_back({{"section", m.section},
                                    {"target", m.target},
                                    {"action", to_string(m.action)},
                                    {"message", m.message}});
    }
    return j.dump(2) + "\n";
}

namespace {

MitigationAction mitigation_action_from_string(const std::string& s) {
    if (s == "IMPUTE_FIXED_VALUE") return MitigationAction::ImputeFixedValue;
    if (s == "UPDATE_SCHEMA") return MitigationAction::UpdateSchema;
    if (s == "INVESTIGATE_SOURCE") return MitigationAction::InvestigateSource;
    if (s == "DEDUPLICATE") return MitigationAction::Deduplicate;
    if (s == "REVIEW_OUTLIERS") return MitigationAction::ReviewOutliers;
    throw std::runtime_error("unknown mitigation action '" + s + "'");
}

}  // namespace

ValidationReport parse_report_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw std::runtime_error(std::string("malformed report document: ") + e.what());
    }
    ValidationReport report;
    report.batch_id = j.value("batch_id", "");
    if (j.contains("schema_version") && !j.at("schema_version").is_null()) {
        report.schema_version = j.at("schema_version").get<int>();
    }
    std::string overall = j.at("overall").get<std::string>();
    if (overall == "PASS") {
        report.overall = Verdict::Pass;
    } else if (overall == "ANOMALIES") {
        report.overall = Verdict::Anomalies;
    } else {
        throw std::runtime_error("invalid overall verdict '" + overall + "'");
    }
    for (const auto& js : j.at("sections")) {
        ReportSection sec;
        sec.title = js.at("title").get<std::string>();
        for (const auto& jc : js.at("counts")) {
            sec.counts.push_back({jc.at("name").get<std::string>(),
                                  jc.at("value").get<std::int64_t>()});
        }
        for (const auto& jm : js.at("metrics")) {
            sec.metrics.push_back({jm.at("target").get<std::string>(),
                                   jm.at("name").get<std::string>(),
                                   jm.at("value").get<double>(),
                                   jm.at("passed").get<bool>()});
        }
        sec.anomalies = js.at("anomalies").get<std::vector<std::string>>();
        report.sections.push_back(std::move(sec));
    }
    for (const auto& jm : j.at("mitigations")) {
        report.mitigations.push_back(
            {jm.at("section").get<std::string>(), jm.at("target").get<std::string>(),
             mitigation_action_from_string(jm.at("action").get<std::string>()),
             jm.at("message").get<std::string>()});
    }
    return report;
}

}  // namespace dv

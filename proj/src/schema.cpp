#include "dv/schema.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dv/statistics.hpp"
#include "json.hpp"

namespace dv {

std::string to_string(AnomalyKind k) {
    switch (k) {
        case AnomalyKind::NewFeature: return "NEW_FEATURE";
        case AnomalyKind::MissingFeature: return "MISSING_FEATURE";
        case AnomalyKind::TypeMismatch: return "TYPE_MISMATCH";
        case AnomalyKind::NotInMinMax: return "NOT_IN_MIN_MAX";
        case AnomalyKind::DomainViolation: return "DOMAIN_VIOLATION";
        case AnomalyKind::NullFractionExceeded: return "NULL_FRACTION_EXCEEDED";
    }
    return "?";
}

bool Schema::has_feature(const std::string& name) const {
    return std::any_of(features.begin(), features.end(),
                       [&](const FeatureSpec& f) { return f.name == name; });
}

const FeatureSpec& Schema::feature(const std::string& name) const {
    for (const auto& f : features) {
        if (f.name == name) return f;
    }
    throw std::runtime_error("schema has no feature '" + name + "'");
}

namespace {

FeatureSpec spec_from_column(const FeatureColumn& col, const InferConfig& cfg,
                             Presence presence) {
    FeatureSpec spec;
    spec.name = col.name;
    spec.type = col.type;
    spec.presence = presence;
    FeatureStatistics st = summarize(col);
    if (col.is_numeric()) {
        spec.min = st.min;
        spec.max = st.max;
    } else if (st.distinct_count > 0 && st.distinct_count <= cfg.domain_max_distinct) {
        std::set<std::string> domain;
        for (const auto& [cat, n] : frequency_table(col)) domain.insert(cat);
        spec.domain = std::move(domain);
    }
    spec.max_null_fraction = std::min(1.0, st.null_fraction() + cfg.null_slack);
    return spec;
}

}  // namespace

Schema infer_schema(const Dataset& ds, const InferConfig& cfg) {
    if (ds.n_columns() == 0) throw std::runtime_error("cannot infer a schema from a dataset with no columns");
    Schema schema;
    schema.version = 1;
    schema.source_batch = ds.batch_id();
    for (const auto& col : ds.columns()) {
        schema.features.push_back(spec_from_column(col, cfg, Presence::Required));
    }
    return schema;
}

namespace {

// INT arriving where FLOAT is declared widens safely; everything else that
// disagrees is a mismatch. Columns with no non-null values carry no type
// evidence and are skipped.
bool type_compatible(FeatureType observed, FeatureType declared) {
    if (observed == declared) return true;
    if (observed == FeatureType::Int && declared == FeatureType::Float) return true;
    return false;
}

}  // namespace

std::vector<SchemaAnomaly> validate_schema(const Dataset& ds, const Schema& schema) {
    std::vector<SchemaAnomaly> anomalies;

    for (const auto& col : ds.columns()) {
        if (!schema.has_feature(col.name)) {
            anomalies.push_back({AnomalyKind::NewFeature, col.name, 1,
                                 "feature not declared in schema version " +
                                     std::to_string(schema.version),
                                 {}});
        }
    }
    for (const auto& spec : schema.features) {
        if (!ds.has_column(spec.name)) {
            if (spec.presence == Presence::Required) {
                anomalies.push_back({AnomalyKind::MissingFeature, spec.name, 1,
                                     "required feature absent from batch", {}});
            }
            continue;
        }
        const auto& col = ds.column(spec.name);
        std::size_t non_null = col.size() - col.null_count();

        if (non_null > 0 && !type_compatible(col.type, spec.type)) {
            anomalies.push_back({AnomalyKind::TypeMismatch, spec.name, 1,
                                 "declared " + to_string(spec.type) + ", observed " +
                                     to_string(col.type),
                                 {}});
        } else if (col.is_numeric() && (spec.min || spec.max)) {
            SchemaAnomaly a{AnomalyKind::NotInMinMax, spec.name, 0, "", {}};
            for (std::size_t r = 0; r < col.size(); ++r) {
                if (col.is_null(r)) continue;
                double v = col.as_double(r);
                if ((spec.min && v < *spec.min) || (spec.max && v > *spec.max)) {
                    ++a.count;
                    a.failed_rows.push_back(r);
                }
            }
            if (a.count > 0) {
                a.detail = "bounds [" +
                           (spec.min ? format_double(*spec.min) : std::string("-inf")) + ", " +
                           (spec.max ? format_double(*spec.max) : std::string("+inf")) + "], " +
                           std::to_string(a.count) + " cell(s) outside";
                anomalies.push_back(std::move(a));
            }
        } else if (col.type == FeatureType::String && spec.domain) {
            SchemaAnomaly a{AnomalyKind::DomainViolation, spec.name, 0, "", {}};
            std::set<std::string> unseen;
            for (std::size_t r = 0; r < col.size(); ++r) {
                if (col.is_null(r)) continue;
                if (!spec.domain->count(col.as_string(r))) {
                    ++a.count;
                    a.failed_rows.push_back(r);
                    unseen.insert(col.as_string(r));
                }
            }
            if (a.count > 0) {
                std::string cats;
                for (const auto& c : unseen) cats += (cats.empty() ? "" : ", ") + c;
                a.detail = "categories outside domain: " + cats;
                anomalies.push_back(std::move(a));
            }
        }

        double nf = non_null == 0 && col.size() == 0
                        ? 0.0
                        : static_cast<double>(col.null_count()) / static_cast<double>(col.size());
        if (col.size() > 0 && nf > spec.max_null_fraction) {
            SchemaAnomaly a{AnomalyKind::NullFractionExceeded, spec.name, col.null_count(),
                            "null fraction " + format_double(nf) + " > allowed " +
                                format_double(spec.max_null_fraction),
                            {}};
            for (std::size_t r = 0; r < col.size(); ++r) {
                if (col.is_null(r)) a.failed_rows.push_back(r);
            }
            anomalies.push_back(std::move(a));
        }
    }
    return anomalies;
}

std::optional<SchemaRevision> suggest_schema_update(const std::vector<SchemaAnomaly>& anomalies,
                                                    const Dataset& ds, const Schema& schema) {
    SchemaRevision rev;
    rev.proposed = schema;
    rev.proposed.version = schema.version + 1;

    auto find_spec = [&](const std::string& name) -> FeatureSpec& {
        for (auto& f : rev.proposed.features) {
            if (f.name == name) return f;
        }
        throw std::runtime_error("anomaly references feature '" + name + "' not in schema");
    };

    for (const auto& a : anomalies) {
        switch (a.kind) {
            case AnomalyKind::NewFeature: {
                FeatureSpec spec =
                    spec_from_column(ds.column(a.feature), InferConfig{}, Presence::Optional);
                rev.changes.push_back("add OPTIONAL feature '" + a.feature + "' (" +
                                      to_string(spec.type) + ")");
                rev.proposed.features.push_back(std::move(spec));
                break;
            }
            case AnomalyKind::NotInMinMax: {
                FeatureSpec& spec = find_spec(a.feature);
                FeatureStatistics st = summarize(ds.column(a.feature));
                std::string before = "[" + (spec.min ? format_double(*spec.min) : "-inf") + ", " +
                                     (spec.max ? format_double(*spec.max) : "+inf") + "]";
                if (spec.min && st.min && *st.min < *spec.min) spec.min = st.min;
                if (spec.max && st.max && *st.max > *spec.max) spec.max = st.max;
                rev.changes.push_back(
                    "widen bounds of '" + a.feature + "' from " + before + " to [" +
                    (spec.min ? format_double(*spec.min) : "-inf") + ", " +
                    (spec.max ? format_double(*spec.max) : "+inf") + "]");
                break;
            }
            case AnomalyKind::DomainViolation: {
                FeatureSpec& spec = find_spec(a.feature);
                const auto& col = ds.column(a.feature);
                std::size_t added = 0;
                for (const auto& [cat, n] : frequency_table(col)) {
                    if (spec.domain->insert(cat).second) ++added;
                }
                rev.changes.push_back("extend domain of '" + a.feature + "' with " +
                                      std::to_string(added) + " observed categories");
                break;
            }
            case AnomalyKind::MissingFeature:
                rev.notes.push_back("feature '" + a.feature +
                                    "' is missing; investigate the data source before relaxing presence");
                break;
            case AnomalyKind::TypeMismatch:
                rev.notes.push_back("feature '" + a.feature + "' type changed (" + a.detail +
                                    "); investigate before changing the declared type");
                break;
            case AnomalyKind::NullFractionExceeded:
                rev.notes.push_back("feature '" + a.feature + "' exceeded its null budget (" +
                                    a.detail + "); impute or raise max_null_fraction deliberately");
                break;
        }
    }
    if (rev.changes.empty()) return std::nullopt;
    return rev;
}

namespace {

using nlohmann::ordered_json;

void reject_unknown_fields(const ordered_json& obj, const std::vector<std::string>& allowed,
                           const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
            throw std::runtime_error("unknown field '" + it.key() + "' in " + where);
        }
    }
}

}  // namespace

std::string schema_to_json(const Schema& schema) {
    ordered_json j;
    j["version"] = schema.version;
    j["source_batch"] = schema.source_batch;
    j["features"] = ordered_json::array();
    for (const auto& f : schema.features) {
        ordered_json jf;
        jf["name"] = f.name;
        jf["type"] = to_string(f.type);
        jf["presence"] = f.presence == Presence::Required ? "REQUIRED" : "OPTIONAL";
        if (f.min) jf["min"] = *f.min;
        if (f.max) jf["max"] = *f.max;
        if (f.domain) jf["domain"] = *f.domain;
        jf["max_null_fraction"] = f.max_null_fraction;
        j["features"].push_back(std::move(jf));
    }
    return j.dump(2) + "\n";
}

Schema parse_schema_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw std::runtime_error(std::string("malformed schema document: ") + e.what());
    }
    if (!j.is_object()) throw std::runtime_error("schema document must be a JSON object");
    reject_unknown_fields(j, {"version", "source_batch", "features"}, "schema document");

    Schema schema;
    schema.version = j.at("version").get<int>();
    if (schema.version < 1) throw std::runtime_error("schema version must be >= 1");
    schema.source_batch = j.value("source_batch", "");
    std::set<std::string> seen;
    for (const auto& jf : j.at("features")) {
        reject_unknown_fields(
            jf, {"name", "type", "presence", "min", "max", "domain", "max_null_fraction"},
            "feature spec");
        FeatureSpec f;
        f.name = jf.at("name").get<std::string>();
        if (!seen.insert(f.name).second) {
            throw std::runtime_error("duplicate feature '" + f.name + "' in schema");
        }
        f.type = feature_type_from_string(jf.at("type").get<std::string>());
        std::string presence = jf.value("presence", "REQUIRED");
        if (presence == "REQUIRED") {
            f.presence = Presence::Required;
        } else if (presence == "OPTIONAL") {
            f.presence = Presence::Optional;
        } else {
            throw std::runtime_error("invalid presence '" + presence + "'");
        }
        if (jf.contains("min")) f.min = jf.at("min").get<double>();
        if (jf.contains("max")) f.max = jf.at("max").get<double>();
        if (f.min && f.max && *f.min > *f.max) {
            throw std::runtime_error("feature '" + f.name + "' has min > max");
        }
        if ((f.min || f.max) && f.type == FeatureType::String) {
            throw std::runtime_error("feature '" + f.name + "' declares bounds on a STRING type");
        }
        if (jf.contains("domain")) {
            if (f.type != FeatureType::String) {
                throw std::runtime_error("feature '" + f.name + "' declares a domain on a numeric type");
            }
            f.domain = jf.at("domain").get<std::set<std::string>>();
        }
        f.max_null_fraction = jf.value("max_null_fraction", 0.0);
        if (f.max_null_fraction < 0.0 || f.max_null_fraction > 1.0) {
            throw std::runtime_error("max_null_fraction must be in [0,1]");
        }
        schema.features.push_back(std::move(f));
    }
    return schema;
}

Schema read_schema(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open schema file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_schema_json(buf.str());
}

void write_schema(const Schema& schema, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write schema file '" + path + "'");
    out << schema_to_json(schema);
}

}  // namespace dv

#include "dv/stream.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace dv {

void OnlineStats::update(double v) {
    ++count;
    if (count == 1) {
        min = max = v;
    } else {
        min = std::min(min, v);
        max = std::max(max, v);
    }
    double delta = v - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (v - mean);
}

double OnlineStats::stddev() const {
    return std::sqrt(variance());
}

StreamState::StreamState(const Schema& schema, StreamConfig cfg)
    : schema_(schema), cfg_(cfg) {
    for (const auto& f : schema_.features) {
        if (f.type != FeatureType::String) stats_[f.name] = OnlineStats{};
        windows_[f.name] = FeatureWindow{};
    }
}

const OnlineStats& StreamState::stats(const std::string& feature) const {
    auto it = stats_.find(feature);
    if (it == stats_.end()) throw std::runtime_error("no stream statistics for '" + feature + "'");
    return it->second;
}

const FeatureWindow& StreamState::window(const std::string& feature) const {
    auto it = windows_.find(feature);
    if (it == windows_.end()) throw std::runtime_error("no stream window for '" + feature + "'");
    return it->second;
}

void StreamState::observe(const std::string& feature, double value) {
    stats_[feature].update(value);
    auto& w = windows_[feature].numeric;
    w.push_back(value);
    if (w.size() > cfg_.window_size) w.pop_front();
}

void StreamState::observe_category(const std::string& feature, const std::string& value) {
    auto& w = windows_[feature].category;
    w.push_back(value);
    if (w.size() > cfg_.window_size) w.pop_front();
}

namespace {

bool parse_number(const std::string& s, FeatureType type, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') ++first;
    if (type == FeatureType::Int) {
        std::int64_t v;
        auto [p, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || p != last || p == first) return false;
        out = static_cast<double>(v);
        return true;
    }
    auto [p, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && p == last && p != first && std::isfinite(out);
}

}  // namespace

RecordVerdict validate_record(const Record& record, StreamState& state) {
    RecordVerdict verdict;
    verdict.record_index = state.records_seen();
    const Schema& schema = state.schema();

    struct Observation {
        std::string feature;
        bool numeric;
        double value = 0.0;
        std::string category;
        bool anomalous = false;
    };
    std::vector<Observation> observations;

    for (const auto& spec : schema.features) {
        auto it = record.find(spec.name);
        if (it == record.end()) {
            if (spec.presence == Presence::Required) {
                verdict.anomalies.push_back({AnomalyKind::MissingFeature, spec.name, 1,
                                             "required field absent from record", {}});
            }
            continue;
        }
        if (!it->second.has_value()) continue;  // null cell: no value checks
        const std::string& raw = *it->second;
        Observation obs{spec.name, spec.type != FeatureType::String, 0.0, {}};
        bool value_anomaly = false;

        if (obs.numeric) {
            double v;
            if (!parse_number(raw, spec.type, v)) {
                // An INT-typed parse failure may still be a valid float where
                // FLOAT semantics apply; for declared INT it is a mismatch.
                verdict.anomalies.push_back({AnomalyKind::TypeMismatch, spec.name, 1,
                                             "value '" + raw + "' is not a valid " +
                                                 to_string(spec.type),
                                             {}});
                continue;
            }
            obs.value = v;
            if ((spec.min && v < *spec.min) || (spec.max && v > *spec.max)) {
                verdict.anomalies.push_back(
                    {AnomalyKind::NotInMinMax, spec.name, 1,
                     "value " + format_double(v) + " outside bounds [" +
                         (spec.min ? format_double(*spec.min) : "-inf") + ", " +
                         (spec.max ? format_double(*spec.max) : "+inf") + "]",
                     {}});
                value_anomaly = true;
            }
        } else {
            obs.category = raw;
            if (spec.domain && !spec.domain->count(raw)) {
                verdict.anomalies.push_back({AnomalyKind::DomainViolation, spec.name, 1,
                                             "category '" + raw + "' not in domain", {}});
                value_anomaly = true;
            }
        }
        obs.anomalous = value_anomaly;
        observations.push_back(std::move(obs));
    }

    for (const auto& obs : observations) {
        if (state.config().exclude_anomalous && obs.anomalous) continue;
        if (obs.numeric) {
            state.observe(obs.feature, obs.value);
        } else {
            state.observe_category(obs.feature, obs.category);
        }
    }
    state.bump_record();
    return verdict;
}

Record parse_record_line(const std::string& line, const Schema& schema,
                         const CsvOptions& csv) {
    Record record;
    auto is_null_token = [&](const std::string& s) {
        return std::find(csv.null_tokens.begin(), csv.null_tokens.end(), s) !=
               csv.null_tokens.end();
    };

    auto first_non_space = line.find_first_not_of(" \t");
    if (first_non_space != std::string::npos && line[first_non_space] == '{') {
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw std::runtime_error("record line is not a JSON object");
        }
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (it->is_null()) {
                record[it.key()] = std::nullopt;
            } else if (it->is_string()) {
                record[it.key()] = it->get<std::string>();
            } else {
                record[it.key()] = it->dump();
            }
        }
        return record;
    }

    // CSV line in schema feature order.
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == csv.delimiter) {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    if (fields.size() != schema.features.size()) {
        throw std::runtime_error("record has " + std::to_string(fields.size()) +
                                 " fields, schema declares " +
                                 std::to_string(schema.features.size()));
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (is_null_token(fields[i])) {
            record[schema.features[i].name] = std::nullopt;
        } else {
            record[schema.features[i].name] = std::move(fields[i]);
        }
    }
    return record;
}

std::map<std::string, DriftStatus> window_drift(const StreamState& state,
                                                const ReferenceProfile& reference) {
    std::map<std::string, DriftStatus> drift;
    for (const auto& [name, ref] : reference.features) {
        DriftStatus status;
        try {
            const FeatureWindow& w = state.window(name);
            if (ref.kind == "numeric") {
                if (w.numeric.size() >= state.config().min_window && ref.hist.edges.size() >= 2) {
                    std::vector<double> values(w.numeric.begin(), w.numeric.end());
                    Histogram h = histogram_on_edges(values, ref.hist.edges);
                    status.ready = true;
                    status.jsd = js_divergence(h.mass, ref.hist.mass);
                }
            } else {
                if (w.category.size() >= state.config().min_window && !ref.probs.empty()) {
                    // Union of reference categories and window categories.
                    std::map<std::string, double> window_freq;
                    for (const auto& c : w.category) window_freq[c] += 1.0;
                    std::vector<std::string> order;
                    for (const auto& [c, p] : ref.probs) order.push_back(c);
                    for (const auto& [c, n] : window_freq) {
                        if (!ref.probs.count(c)) order.push_back(c);
                    }
                    std::vector<double> p(order.size(), 0.0), q(order.size(), 0.0);
                    double total = static_cast<double>(w.category.size());
                    for (std::size_t i = 0; i < order.size(); ++i) {
                        auto rit = ref.probs.find(order[i]);
                        if (rit != ref.probs.end()) p[i] = rit->second;
                        auto wit = window_freq.find(order[i]);
                        if (wit != window_freq.end()) q[i] = wit->second / total;
                    }
                    status.ready = true;
                    status.jsd = js_divergence(p, q);
                }
            }
        } catch (const std::runtime_error&) {
            // Feature absent from the schema/state: not ready.
        }
        drift[name] = status;
    }
    return drift;
}

}  // namespace dv

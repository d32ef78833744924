#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>

#include "doctest.h"
#include "dv/generator.hpp"
#include "dv/schema.hpp"

using namespace dv;

namespace {

Dataset from_csv(const std::string& text) {
    std::istringstream in(text);
    return load_csv(in, {}, "test");
}

}  // namespace

TEST_CASE("infer_schema uses observed bounds") {
    Schema s = infer_schema(from_csv("a\n1\n5\n3\n"));
    CHECK(s.version == 1);
    const auto& f = s.feature("a");
    CHECK(f.type == FeatureType::Int);
    CHECK(*f.min == 1.0);
    CHECK(*f.max == 5.0);
    CHECK(f.presence == Presence::Required);
    CHECK(f.max_null_fraction == 0.0);
}

TEST_CASE("infer_schema domain only below the distinct threshold") {
    std::ostringstream csv;
    csv << "s\n";
    for (int i = 0; i < 40; ++i) csv << "cat" << i << "\n";
    InferConfig cfg;
    cfg.domain_max_distinct = 32;
    Schema s = infer_schema(from_csv(csv.str()), cfg);
    CHECK_FALSE(s.feature("s").domain.has_value());

    cfg.domain_max_distinct = 64;
    Schema s2 = infer_schema(from_csv(csv.str()), cfg);
    REQUIRE(s2.feature("s").domain.has_value());
    CHECK(s2.feature("s").domain->size() == 40);
}

TEST_CASE("infer_schema records observed null fraction plus slack") {
    Dataset ds = from_csv("a\n1\n\n1\n\n");
    Schema s = infer_schema(ds);
    CHECK(s.feature("a").max_null_fraction == doctest::Approx(0.5));
    Schema slack = infer_schema(ds, {32, 0.75});
    CHECK(slack.feature("a").max_null_fraction == 1.0);  // clamped
}

TEST_CASE("validate_schema on self-inferred schema is clean") {
    Dataset ds = from_csv("a,b,s\n1,2.5,x\n4,,y\n2,0.5,x\n");
    CHECK(validate_schema(ds, infer_schema(ds)).empty());
}

TEST_CASE("validate_schema new and missing features") {
    Dataset base = from_csv("a\n1\n");
    Schema s = infer_schema(base);
    Dataset other = from_csv("b\n1\n");
    auto anomalies = validate_schema(other, s);
    REQUIRE(anomalies.size() == 2);
    CHECK(anomalies[0].kind == AnomalyKind::NewFeature);
    CHECK(anomalies[0].feature == "b");
    CHECK(anomalies[1].kind == AnomalyKind::MissingFeature);
    CHECK(anomalies[1].feature == "a");
}

TEST_CASE("validate_schema optional feature may be absent") {
    Schema s = infer_schema(from_csv("a,b\n1,2\n"));
    s.features[1].presence = Presence::Optional;
    auto anomalies = validate_schema(from_csv("a\n1\n"), s);
    CHECK(anomalies.empty());
}

TEST_CASE("type widening: INT arriving where FLOAT is declared is fine") {
    Schema s = infer_schema(from_csv("a\n1.5\n"));
    CHECK(s.feature("a").type == FeatureType::Float);
    s.features[0].min = std::nullopt;
    s.features[0].max = std::nullopt;
    CHECK(validate_schema(from_csv("a\n1\n"), s).empty());

    Schema si = infer_schema(from_csv("a\n1\n"));
    si.features[0].min = std::nullopt;
    si.features[0].max = std::nullopt;
    auto anomalies = validate_schema(from_csv("a\n1.5\n"), si);
    REQUIRE(anomalies.size() == 1);
    CHECK(anomalies[0].kind == AnomalyKind::TypeMismatch);
}

TEST_CASE("validate_schema counts out-of-bounds cells and failed rows") {
    Schema s = infer_schema(from_csv("a\n0\n10\n"));
    auto anomalies = validate_schema(from_csv("a\n5\n11\n7\n"), s);
    REQUIRE(anomalies.size() == 1);
    CHECK(anomalies[0].kind == AnomalyKind::NotInMinMax);
    CHECK(anomalies[0].count == 1);
    CHECK(anomalies[0].failed_rows == std::vector<std::size_t>{1});
}

TEST_CASE("validate_schema domain violations") {
    Schema s = infer_schema(from_csv("s\na\nb\n"));
    auto anomalies = validate_schema(from_csv("s\na\nc\nd\nc\n"), s);
    REQUIRE(anomalies.size() == 1);
    CHECK(anomalies[0].kind == AnomalyKind::DomainViolation);
    CHECK(anomalies[0].count == 3);
    CHECK(anomalies[0].failed_rows == std::vector<std::size_t>{1, 2, 3});
}

TEST_CASE("validate_schema null budget") {
    Schema s = infer_schema(from_csv("a\n1\n2\n"));
    auto anomalies = validate_schema(from_csv("a\n1\n\n"), s);
    REQUIRE(anomalies.size() == 1);
    CHECK(anomalies[0].kind == AnomalyKind::NullFractionExceeded);
}

TEST_CASE("suggest_schema_update: nothing to propose means no revision") {
    Dataset ds = from_csv("a\n1\n");
    Schema s = infer_schema(ds);
    CHECK_FALSE(suggest_schema_update({}, ds, s).has_value());
}

TEST_CASE("suggest_schema_update widens bounds to observed values") {
    Schema s = infer_schema(from_csv("a\n0\n10\n"));
    Dataset ds = from_csv("a\n11\n");
    auto anomalies = validate_schema(ds, s);
    auto rev = suggest_schema_update(anomalies, ds, s);
    REQUIRE(rev.has_value());
    CHECK(rev->proposed.version == 2);
    CHECK(*rev->proposed.feature("a").max == 11.0);
    CHECK(*rev->proposed.feature("a").min == 0.0);
    CHECK(s.version == 1);  // original untouched
}

TEST_CASE("suggest_schema_update adds OPTIONAL specs for new features") {
    Schema s = infer_schema(from_csv("a\n1\n"));
    Dataset ds = from_csv("a,f_201\n1,5\n1,9\n");
    auto rev = suggest_schema_update(validate_schema(ds, s), ds, s);
    REQUIRE(rev.has_value());
    const auto& f = rev->proposed.feature("f_201");
    CHECK(f.presence == Presence::Optional);
    CHECK(f.type == FeatureType::Int);
    CHECK(*f.min == 5.0);
    CHECK(*f.max == 9.0);
}

TEST_CASE("suggest_schema_update leaves notes for missing/type anomalies") {
    Schema s = infer_schema(from_csv("a,b\n1,2\n"));
    Dataset ds = from_csv("a,c\n1.5,1\n");
    auto anomalies = validate_schema(ds, s);
    auto rev = suggest_schema_update(anomalies, ds, s);
    REQUIRE(rev.has_value());  // new feature c produces a change
    CHECK(rev->notes.size() == 2);  // missing b, type change of a
    CHECK(rev->proposed.has_feature("b"));  // b is kept, not dropped
}

TEST_CASE("applying a revision clears new/bounds/domain anomalies") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        CorpusSpec spec;
        spec.n_rows = 100;
        spec.seed = rng();
        auto [base, gt0] = generate(spec);
        Schema s = infer_schema(base);

        CorpusSpec wider = spec;
        wider.seed = rng();
        wider.n_new_features = 3;
        auto [current, gt1] = generate(wider);

        auto anomalies = validate_schema(current, s);
        auto rev = suggest_schema_update(anomalies, current, s);
        if (!rev) continue;
        for (const auto& a : validate_schema(current, rev->proposed)) {
            CHECK(a.kind != AnomalyKind::NewFeature);
            CHECK(a.kind != AnomalyKind::NotInMinMax);
            CHECK(a.kind != AnomalyKind::DomainViolation);
        }
    }
}

TEST_CASE("schema persistence round-trip is identity") {
    Dataset ds = from_csv("a,s\n1,x\n2,y\n");
    Schema s = infer_schema(ds);
    std::string path = (std::filesystem::temp_directory_path() / "dv_schema_rt.json").string();
    write_schema(s, path);
    Schema back = read_schema(path);
    CHECK(back == s);
    std::remove(path.c_str());
}

TEST_CASE("schema parsing is strict") {
    CHECK_THROWS(parse_schema_json("not json"));
    CHECK_THROWS_WITH_AS(
        parse_schema_json(R"({"version":1,"source_batch":"","features":[],"extra":1})"),
        doctest::Contains("extra"), std::runtime_error);
    CHECK_THROWS(parse_schema_json(R"({"version":0,"source_batch":"","features":[]})"));
    CHECK_THROWS(parse_schema_json(
        R"({"version":1,"source_batch":"","features":[{"name":"a","type":"INT","bogus":1}]})"));
    CHECK_THROWS(parse_schema_json(
        R"({"version":1,"source_batch":"","features":[{"name":"a","type":"INT","min":5,"max":1}]})"));
    CHECK_THROWS(parse_schema_json(
        R"({"version":1,"source_batch":"","features":[{"name":"a","type":"STRING","min":0}]})"));
}

TEST_CASE("property: self-inferred schemas validate cleanly on random corpora") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 25; ++trial) {
        CorpusSpec spec;
        spec.n_rows = 50 + rng() % 100;
        spec.seed = rng();
        spec.null_fraction = (trial % 3) * 0.05;
        auto [ds, gt] = generate(spec);
        Schema s = infer_schema(ds);
        CHECK(validate_schema(ds, s).empty());
    }
}

#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "dv/checks.hpp"
#include "dv/statistics.hpp"

using namespace dv;

namespace {

Dataset from_csv(const std::string& text) {
    std::istringstream in(text);
    return load_csv(in, {}, "test");
}

// Brute-force quartile/fence oracle independent of the implementation path.
std::vector<std::size_t> iqr_outlier_rows_oracle(const std::vector<double>& v, double k) {
    std::vector<double> s = v;
    std::sort(s.begin(), s.end());
    auto interp = [&](double q) {
        double pos = q * (s.size() - 1);
        std::size_t lo = static_cast<std::size_t>(pos);
        if (lo + 1 >= s.size()) return s.back();
        return s[lo] + (pos - lo) * (s[lo + 1] - s[lo]);
    };
    double q1 = interp(0.25), q3 = interp(0.75);
    double lo = q1 - k * (q3 - q1), hi = q3 + k * (q3 - q1);
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] < lo || v[i] > hi) rows.push_back(i);
    }
    return rows;
}

}  // namespace

TEST_CASE("SIZE on empty dataset fails") {
    Check c{CheckKind::Size, {}};
    c.min_rows = 1;
    auto res = run_check(from_csv("a\n"), c);
    CHECK(res.metric == 0.0);
    CHECK_FALSE(res.passed);
}

TEST_CASE("COMPLETENESS on null-free column passes at threshold 1") {
    Check c{CheckKind::Completeness, {"a"}};
    auto res = run_check(from_csv("a\n1\n2\n"), c);
    CHECK(res.metric == 1.0);
    CHECK(res.passed);
}

TEST_CASE("COMPLETENESS reports per-feature values and null rows") {
    Check c{CheckKind::Completeness, {}};
    c.min_completeness = 0.9;
    auto res = run_check(from_csv("a,b\n1,2\n,3\n4,5\n,6\n"), c);
    CHECK(res.per_feature.at("a") == doctest::Approx(0.5));
    CHECK(res.per_feature.at("b") == 1.0);
    CHECK(res.metric == doctest::Approx(0.5));
    CHECK_FALSE(res.passed);
    CHECK(res.failed_rows == std::vector<std::size_t>{1, 3});
}

TEST_CASE("IN_RANGE flags the out-of-bounds row") {
    Check c{CheckKind::InRange, {"a"}};
    c.min_value = 0;
    c.max_value = 10;
    auto res = run_check(from_csv("a\n5\n11\n"), c);
    CHECK(res.failed_rows == std::vector<std::size_t>{1});
    CHECK_FALSE(res.passed);
}

TEST_CASE("UNIQUENESS counts repeated values") {
    Check c{CheckKind::Uniqueness, {"a"}};
    auto res = run_check(from_csv("a\n1\n2\n1\n"), c);
    CHECK(res.metric == doctest::Approx(2.0 / 3));
    CHECK(res.failed_rows == std::vector<std::size_t>{2});
}

TEST_CASE("run_check rejects bad targets") {
    Check c{CheckKind::Completeness, {"nope"}};
    CHECK_THROWS(run_check(from_csv("a\n1\n"), c));
    Check o{CheckKind::Outliers, {"s"}};
    CHECK_THROWS(run_check(from_csv("s\nx\ny\n"), o));
}

TEST_CASE("duplicate_ratio is zero for unique rows and empty datasets") {
    CHECK(duplicate_ratio(from_csv("a\n1\n2\n3\n")).metric == 0.0);
    CHECK(duplicate_ratio(from_csv("a\n")).metric == 0.0);
}

TEST_CASE("duplicate_ratio keeps first occurrences") {
    // 10 rows, 4 repeat earlier keys
    Dataset ds = from_csv("a,b\n1,x\n2,y\n1,x\n3,z\n2,y\n4,w\n1,x\n5,v\n3,z\n6,u\n");
    auto res = duplicate_ratio(ds);
    CHECK(res.metric == doctest::Approx(0.4));
    CHECK(res.failed_rows == std::vector<std::size_t>{2, 4, 6, 8});
}

TEST_CASE("duplicate_ratio respects key columns") {
    Dataset ds = from_csv("id,v\n1,a\n1,b\n2,c\n");
    CHECK(duplicate_ratio(ds).metric == 0.0);
    auto res = duplicate_ratio(ds, {"id"});
    CHECK(res.metric == doctest::Approx(1.0 / 3));
    CHECK(res.failed_rows == std::vector<std::size_t>{1});
}

TEST_CASE("property: self-concatenation at least doubles duplicates") {
    std::mt19937 rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        std::ostringstream csv;
        csv << "a,b\n";
        std::ostringstream rows;
        for (int r = 0; r < 5 + static_cast<int>(rng() % 20); ++r) {
            rows << rng() % 50 << "," << rng() % 50 << "\n";
        }
        csv << rows.str() << rows.str();
        auto res = duplicate_ratio(from_csv(csv.str()));
        CHECK(res.metric >= 0.5);
    }
}

TEST_CASE("outlier_ratio: constant columns contribute nothing") {
    auto res = outlier_ratio(from_csv("a\n7\n7\n7\n"));
    CHECK(res.metric == 0.0);
    CHECK(res.passed);
}

TEST_CASE("outlier_ratio flags the far value") {
    auto res = outlier_ratio(from_csv("a\n1\n2\n3\n4\n5\n6\n7\n8\n9\n10\n100\n"));
    CHECK(res.failed_rows == std::vector<std::size_t>{10});
    CHECK(res.per_feature.at("a") == doctest::Approx(1.0 / 11));
}

TEST_CASE("outlier_ratio agrees with the brute-force fence oracle") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> v(60);
        for (double& x : v) x = std::normal_distribution<>(0, 2)(rng);
        v[rng() % 60] = 1000;  // guaranteed outlier
        std::ostringstream csv;
        csv << "a\n";
        for (double x : v) csv << format_double(x) << "\n";
        auto res = outlier_ratio(from_csv(csv.str()));
        CHECK(res.failed_rows == iqr_outlier_rows_oracle(v, 1.5));
    }
}

TEST_CASE("outlier_ratio ROWS scope counts rows once") {
    // one outlying cell, row 3, 10 rows, two numeric columns
    std::ostringstream csv;
    csv << "a,b\n";
    for (int r = 0; r < 10; ++r) {
        csv << r % 4 << "," << (r == 3 ? 999 : r % 3) << "\n";
    }
    auto res = outlier_ratio(from_csv(csv.str()), {1.5, OutlierScope::Rows});
    CHECK(res.metric == doctest::Approx(0.1));
    CHECK(res.failed_rows == std::vector<std::size_t>{3});
}

TEST_CASE("outlier detection is translation-invariant under CELLS scope") {
    std::mt19937 rng(13);
    std::ostringstream a, b;
    a << "x\n";
    b << "x\n";
    for (int r = 0; r < 50; ++r) {
        double v = std::normal_distribution<>(0, 5)(rng);
        a << format_double(v) << "\n";
        b << format_double(v + 1234.5) << "\n";
    }
    auto ra = outlier_ratio(from_csv(a.str()), {1.5, OutlierScope::Cells});
    auto rb = outlier_ratio(from_csv(b.str()), {1.5, OutlierScope::Cells});
    CHECK(ra.failed_rows == rb.failed_rows);
}

TEST_CASE("rare_categories flags infrequent values") {
    std::ostringstream csv;
    csv << "s\n";
    for (int i = 0; i < 999; ++i) csv << "A\n";
    csv << "B\n";
    auto res = rare_categories(from_csv(csv.str()), "s", 0.01);
    CHECK_FALSE(res.passed);
    CHECK(res.failed_rows == std::vector<std::size_t>{999});
    CHECK(res.detail == "rare: B");
}

TEST_CASE("rare_categories passes on balanced and empty columns") {
    CHECK(rare_categories(from_csv("s\na\nb\na\nb\n"), "s", 0.01).passed);
    CHECK(rare_categories(from_csv("s\n\n\n"), "s", 0.01).passed);
}

TEST_CASE("constant_features flags constants and all-zero columns") {
    auto res = constant_features(from_csv("z,c,ok,zn\n0,5,0,0\n0,5,1,\n0,5,2,0\n"));
    CHECK(res.per_feature.at("z") == 1.0);   // all zero
    CHECK(res.per_feature.at("c") == 1.0);   // constant
    CHECK(res.per_feature.at("ok") == 0.0);
    CHECK(res.per_feature.at("zn") == 1.0);  // all-zero among non-nulls
    CHECK_FALSE(res.passed);
}

TEST_CASE("retrieve_failed_records returns exactly the failed rows") {
    Dataset ds = from_csv("a\n5\n11\n7\n12\n");
    Check c{CheckKind::InRange, {"a"}};
    c.min_value = 0;
    c.max_value = 10;
    auto res = run_check(ds, c);
    Dataset failed = retrieve_failed_records(ds, res);
    REQUIRE(failed.n_rows() == 2);
    CHECK(failed.column("a").as_double(0) == 11);
    CHECK(failed.column("a").as_double(1) == 12);

    // Re-running the same row-local check on the failed subset fails every row.
    auto again = run_check(failed, c);
    CHECK(again.failed_rows.size() == failed.n_rows());

    // A passing result yields an empty subset.
    Check ok{CheckKind::InRange, {"a"}};
    ok.min_value = 0;
    ok.max_value = 100;
    CHECK(retrieve_failed_records(ds, run_check(ds, ok)).n_rows() == 0);
}

TEST_CASE("check metrics stay in [0,1] except SIZE") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        std::ostringstream csv;
        csv << "a,s\n";
        for (int r = 0; r < 30; ++r) {
            if (rng() % 5 == 0) csv << ",\n";
            else csv << rng() % 10 << ",c" << rng() % 4 << "\n";
        }
        Dataset ds = from_csv(csv.str());
        for (CheckKind kind : {CheckKind::Completeness, CheckKind::Uniqueness,
                               CheckKind::Duplicates, CheckKind::Outliers,
                               CheckKind::ConstantFeature}) {
            Check c{kind, {}};
            if (kind == CheckKind::Outliers || kind == CheckKind::Completeness ||
                kind == CheckKind::Uniqueness) {
                c.targets = {"a"};
            }
            auto res = run_check(ds, c);
            CHECK(res.metric >= 0.0);
            CHECK(res.metric <= 1.0);
        }
    }
}

TEST_CASE("checks config parsing") {
    auto checks = parse_checks_json(R"([
      {"kind": "COMPLETENESS", "targets": ["a"], "params": {"min_completeness": 0.9}},
      {"kind": "DUPLICATES", "params": {"key_columns": ["id"], "max_duplicate_ratio": 0.05}},
      {"kind": "OUTLIERS", "params": {"k": 3.0, "scope": "CELLS"}, "severity": "warning"}
    ])");
    REQUIRE(checks.size() == 3);
    CHECK(checks[0].min_completeness == 0.9);
    CHECK(checks[1].key_columns == std::vector<std::string>{"id"});
    CHECK(checks[2].iqr_multiplier == 3.0);
    CHECK(checks[2].outlier_scope == OutlierScope::Cells);
    CHECK(checks[2].severity == Severity::Warning);

    CHECK_THROWS(parse_checks_json(R"([{"kind": "NOPE"}])"));
    CHECK_THROWS(parse_checks_json(R"([{"kind": "SIZE", "params": {"wat": 1}}])"));
    CHECK_THROWS(parse_checks_json(R"({"kind": "SIZE"})"));
}

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>

#include "doctest.h"
#include "dv/skew.hpp"

using namespace dv;

namespace {

Dataset from_csv(const std::string& text, const std::string& id = "test") {
    std::istringstream in(text);
    return load_csv(in, {}, id);
}

std::vector<double> random_probability_vector(std::mt19937& rng, std::size_t n) {
    std::vector<double> p(n);
    double sum = 0;
    for (double& x : p) {
        x = std::uniform_real_distribution<>(0.0, 1.0)(rng);
        sum += x;
    }
    for (double& x : p) x /= sum;
    return p;
}

}  // namespace

TEST_CASE("js_divergence identity is exactly zero") {
    std::mt19937 rng(1);
    for (int i = 0; i < 20; ++i) {
        auto p = random_probability_vector(rng, 2 + i % 8);
        CHECK(js_divergence(p, p) == 0.0);
    }
}

TEST_CASE("js_divergence disjoint support reaches one bit") {
    CHECK(js_divergence({1, 0}, {0, 1}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(js_divergence({0.5, 0.5, 0, 0}, {0, 0, 0.5, 0.5}) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("js_divergence hand-computed value") {
    // Direct evaluation of H(m) - (H(p)+H(q))/2 with m=(0.75,0.25):
    // H(m) = 0.81127812..., H(p) = 1, H(q) = 0 -> 0.31127812...
    CHECK(js_divergence({0.5, 0.5}, {1.0, 0.0}) == doctest::Approx(0.311278).epsilon(1e-6));
}

TEST_CASE("js_divergence is symmetric") {
    std::mt19937 rng(2);
    for (int i = 0; i < 50; ++i) {
        auto p = random_probability_vector(rng, 5);
        auto q = random_probability_vector(rng, 5);
        CHECK(js_divergence(p, q) == js_divergence(q, p));
    }
}

TEST_CASE("sqrt(JSD) satisfies the triangle inequality") {
    std::mt19937 rng(3);
    for (int i = 0; i < 500; ++i) {
        auto p = random_probability_vector(rng, 4);
        auto q = random_probability_vector(rng, 4);
        auto r = random_probability_vector(rng, 4);
        double pq = std::sqrt(js_divergence(p, q));
        double qr = std::sqrt(js_divergence(q, r));
        double pr = std::sqrt(js_divergence(p, r));
        CHECK(pr <= pq + qr + 1e-9);
    }
}

TEST_CASE("js_divergence input validation") {
    CHECK_THROWS(js_divergence({1, 0}, {1, 0, 0}));
    CHECK_THROWS(js_divergence({0.7, 0.7}, {1, 0}));
    CHECK_THROWS(js_divergence({1.5, -0.5}, {1, 0}));
}

TEST_CASE("cosine_similarity basics") {
    CHECK(cosine_similarity({2, 3}, {2, 3}) == doctest::Approx(1.0));
    CHECK(cosine_similarity({1, 0}, {0, 1}) == doctest::Approx(0.0));
    CHECK(cosine_similarity({1, 1}, {1, 0}) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK_THROWS(cosine_similarity({0, 0}, {1, 0}));
    CHECK_THROWS(cosine_similarity({1}, {1, 0}));
}

TEST_CASE("compare_batches against itself is clean") {
    Dataset ds = from_csv("a,s\n1,x\n2,y\n3,x\n");
    SkewReport rep = compare_batches(ds, ds);
    CHECK(rep.new_features.empty());
    CHECK(rep.missing_features.empty());
    CHECK(rep.flagged.empty());
    for (const auto& [name, div] : rep.per_feature_divergence) {
        CHECK(div.jsd == 0.0);
    }
}

TEST_CASE("compare_batches disjoint numeric ranges give JSD 1") {
    std::ostringstream a, b;
    a << "x\n";
    b << "x\n";
    std::mt19937 rng(4);
    for (int i = 0; i < 100; ++i) {
        a << std::uniform_real_distribution<>(0, 1)(rng) << "\n";
        b << std::uniform_real_distribution<>(100, 101)(rng) << "\n";
    }
    SkewReport rep = compare_batches(from_csv(a.str()), from_csv(b.str()));
    CHECK(rep.per_feature_divergence.at("x").jsd == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.flagged == std::vector<std::string>{"x"});
}

TEST_CASE("compare_batches partitions feature sets") {
    Dataset a = from_csv("common,only_a\n1,1\n");
    Dataset b = from_csv("common,only_b1,only_b2\n1,1,1\n");
    SkewReport rep = compare_batches(a, b);
    CHECK(rep.common_features == std::vector<std::string>{"common"});
    CHECK(rep.new_features == std::vector<std::string>{"only_b1", "only_b2"});
    CHECK(rep.missing_features == std::vector<std::string>{"only_a"});
    CHECK(rep.row_count_change == std::pair<std::size_t, std::size_t>{1, 1});
}

TEST_CASE("compare_batches feature diffs are anti-symmetric") {
    Dataset a = from_csv("x,y\n1,2\n");
    Dataset b = from_csv("y,z\n2,3\n");
    SkewReport ab = compare_batches(a, b);
    SkewReport ba = compare_batches(b, a);
    CHECK(ab.new_features == ba.missing_features);
    CHECK(ab.missing_features == ba.new_features);
}

TEST_CASE("compare_batches categorical distributions") {
    std::ostringstream a, b;
    a << "s\n";
    b << "s\n";
    for (int i = 0; i < 50; ++i) a << (i % 2 ? "x" : "y") << "\n";
    for (int i = 0; i < 50; ++i) b << "x\n";
    SkewReport rep = compare_batches(from_csv(a.str()), from_csv(b.str()));
    CHECK(rep.per_feature_divergence.at("s").jsd ==
          doctest::Approx(js_divergence({0.5, 0.5}, {1.0, 0.0})));
}

TEST_CASE("compare_batches records null fraction delta") {
    Dataset a = from_csv("x\n1\n2\n3\n4\n");
    Dataset b = from_csv("x\n1\n\n3\n\n");
    SkewReport rep = compare_batches(a, b);
    CHECK(rep.per_feature_divergence.at("x").null_fraction_delta == doctest::Approx(0.5));
}

TEST_CASE("reference profile round-trips") {
    Dataset ds = from_csv("a,s\n1,x\n5,y\n3,x\n");
    ReferenceProfile profile = build_reference_profile(ds, 4);
    std::string path = (std::filesystem::temp_directory_path() / "dv_profile_rt.json").string();
    write_reference_profile(profile, path);
    ReferenceProfile back = read_reference_profile(path);
    REQUIRE(back.features.count("a") == 1);
    CHECK(back.features.at("a").kind == "numeric");
    CHECK(back.features.at("a").hist.edges == profile.features.at("a").hist.edges);
    CHECK(back.features.at("a").hist.mass == profile.features.at("a").hist.mass);
    CHECK(back.features.at("s").probs == profile.features.at("s").probs);
    std::remove(path.c_str());
}

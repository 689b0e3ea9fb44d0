#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "listreg/compression.hpp"
#include "listreg/harness.hpp"

using namespace listreg;

TEST_CASE("size accounting follows the m*l + m*l*k*log2(1/gamma) formula") {
    CompressionRecord rec;
    rec.mode = "realizable";
    rec.gamma = Rat(1, 4);
    rec.k = 1;
    rec.resolution = 4;
    for (int j = 0; j < 3; ++j) {
        std::vector<CompressionEntry> sub;
        for (int t = 0; t < 2; ++t) sub.push_back({0, 1, t, 1});
        rec.subsequences.push_back(std::move(sub));
    }
    CHECK(rec.example_count() == 6);
    CHECK(rec.side_bits() == 12);  // 6 thresholds * 1 * log2(4)
    CHECK(rec.size() == 18);

    // the oig pipeline stores plain examples, no threshold side bits
    CompressionRecord oig;
    oig.mode = "oig";
    oig.gamma = Rat(1, 4);
    oig.k = 2;
    oig.resolution = 4;
    oig.subsequences.push_back({{0, 1, -1, 3}, {1, 2, -1, 2}});
    CHECK(oig.example_count() == 5);
    CHECK(oig.side_bits() == 0);
    CHECK(oig.size() == 5);

    CompressionRecord empty;
    empty.gamma = Rat(1, 4);
    CHECK(empty.size() == 0);
}

TEST_CASE("pipeline records match the declared sizes") {
    HypothesisClass e1 = build_example1(3);
    PipelineParams params;
    params.gamma = Rat(1, 10);
    params.k = 2;
    params.seed = 5;
    params.m_override = 25;
    params.l_override = 7;
    LabeledSample s;
    Rng rng(31);
    for (int i = 0; i < 8; ++i) {
        int x = static_cast<int>(rng.below(3));
        s.pairs.emplace_back(x, e1.value(4, x));
    }
    auto res = reg_realizable(s, e1, params);
    CHECK(static_cast<int>(res.record.subsequences.size()) == 7);
    CHECK(res.record.example_count() == 25 * 7);
    // 1/gamma = 10 encodes in 4 bits per component
    CHECK(res.record.side_bits() == 25 * 7 * 2 * 4);
    CHECK(res.report["compression"]["size"] == res.record.size());
}

TEST_CASE("generalization bound") {
    double base = generalization_bound(100, 0, 0.5, 0.0, 0.0, 1.0);
    CHECK(base == doctest::Approx(std::log(2.0) / 100).epsilon(1e-12));

    // strictly increasing in the compression size
    double a = generalization_bound(1000, 10, 0.1, 0.05, 0.05);
    double b = generalization_bound(1000, 20, 0.1, 0.05, 0.05);
    CHECK(b > a);

    // monotone in 1/delta and in both empirical errors
    CHECK(generalization_bound(1000, 10, 0.01, 0.05, 0.05) > a);
    CHECK(generalization_bound(1000, 10, 0.1, 0.06, 0.05) > a);
    CHECK(generalization_bound(1000, 10, 0.1, 0.05, 0.06) > a);

    // plug-in recomputation by hand
    double n = 1000, size = 50, delta = 0.05, e = 0.1;
    double slack = (size * std::log(n) + std::log(1.0 / delta)) / n;
    double hand = e + std::sqrt(e * slack) + slack;
    CHECK(generalization_bound(1000, 50, 0.05, 0.1, 0.1) == doctest::Approx(hand).epsilon(1e-12));

    // bound never drops below the empirical error
    CHECK(generalization_bound(1000, 50, 0.05, 0.1, 0.1) >= 0.1);

    CHECK_THROWS(generalization_bound(100, 51, 0.5, 0.0, 0.0));  // size above n/2
    CHECK_THROWS(generalization_bound(100, 0, 0.0, 0.0, 0.0));
    CHECK_THROWS(generalization_bound(0, 0, 0.5, 0.0, 0.0));
}

TEST_CASE("records serialize and reconstruct deterministically") {
    HypothesisClass e1 = build_example1(3);
    PipelineParams params;
    params.gamma = Rat(1, 10);
    params.k = 1;
    params.seed = 8;
    params.m_override = 20;
    params.l_override = 5;
    LabeledSample s;
    Rng rng(32);
    for (int i = 0; i < 6; ++i) {
        int x = static_cast<int>(rng.below(3));
        s.pairs.emplace_back(x, e1.value(20, x));
    }
    auto res = reg_realizable(s, e1, params);
    Json j = record_to_json(res.record);
    CompressionRecord back = record_from_json(j);
    CHECK(back.mode == res.record.mode);
    CHECK(back.size() == res.record.size());
    auto h1 = reconstruct_hypothesis(back, e1);
    auto h2 = reconstruct_hypothesis(res.record, e1);
    REQUIRE(h1.size() == h2.size());
    for (std::size_t x = 0; x < h1.size(); ++x) {
        CHECK(h1[x].values == h2[x].values);
        CHECK(h1[x].values == res.hypothesis[x].values);
    }
}

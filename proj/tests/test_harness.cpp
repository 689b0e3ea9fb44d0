#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "listreg/harness.hpp"

using namespace listreg;

TEST_CASE("ternary product class") {
    CHECK(build_example1(3).num_rows() == 27);
    CHECK(build_example1(4).num_rows() == 54);
    HypothesisClass e1 = build_example1(5);
    CHECK(e1.domain_size == 5);
    CHECK(e1.resolution == 10);
    for (int r = 0; r < e1.num_rows(); ++r) {
        for (int x = 0; x < 3; ++x) CHECK(e1.rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(x)] <= 3);
        for (int x = 3; x < 5; ++x) CHECK(e1.rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(x)] <= 2);
    }
    CHECK_THROWS(build_example1(2));
    CHECK_THROWS(build_example1(40));
}

TEST_CASE("binary-sum class values") {
    HypothesisClass e2 = build_example2(1);
    CHECK(e2.num_rows() == 4);
    CHECK(e2.resolution == 32);
    std::set<std::int64_t> vals;
    for (const auto& row : e2.rows) vals.insert(row[0]);
    // (b,c) -> 0, 3/8 + 1/32, 1/2, 1/2 + 13/32
    CHECK(vals == std::set<std::int64_t>{0, 13, 16, 29});

    HypothesisClass e2_3 = build_example2(3);
    CHECK(e2_3.num_rows() == 64);
    CHECK(e2_3.resolution == 128);
    CHECK_THROWS(build_example2(9));
}

TEST_CASE("shattering-based adversarial distributions") {
    HypothesisClass e1 = build_example1(3);
    Rat g(1, 20);
    auto strong = strong_fat_dim(e1, g, 2);
    REQUIRE(strong.dimension == 3);

    std::vector<int> pattern{0, 2, 1};
    FiniteDistribution db = build_db_distribution(e1, strong.witness, pattern);
    CHECK(db.support.size() == 3);
    for (const auto& atom : db.support) CHECK(atom.mass == Rat(1, 3));

    // the best in-class population error under any pattern distribution is 0
    std::vector<int> b(3, 0);
    auto all_patterns = [&](auto&& self, int i) -> void {
        if (i == 3) {
            FiniteDistribution d = build_db_distribution(e1, strong.witness, b);
            Rat best(2);
            for (int r = 0; r < e1.num_rows(); ++r) {
                ListPredictor h = [&](int x) { return LabelList({e1.value(r, x)}); };
                best = rat_min(best, population_error(h, d));
            }
            CHECK(best == Rat(0));
            return;
        }
        for (b[static_cast<std::size_t>(i)] = 0; b[static_cast<std::size_t>(i)] <= 2;
             ++b[static_cast<std::size_t>(i)])
            self(self, i + 1);
    };
    all_patterns(all_patterns, 0);

    CHECK_THROWS(build_db_distribution(e1, strong.witness, std::vector<int>{9, 9, 9}));

    // single-point witnesses give point masses
    HypothesisClass consts;
    consts.domain_size = 1;
    consts.resolution = 8;
    consts.kind = ClassKind::Total;
    consts.rows = {{0}, {2}, {4}};
    auto s1 = strong_fat_dim(consts, Rat(1, 8), 2);
    REQUIRE(s1.dimension == 1);
    FiniteDistribution point = build_db_distribution(consts, s1.witness, {1});
    CHECK(point.support.size() == 1);
    CHECK(point.support[0].mass == Rat(1));
}

TEST_CASE("head-heavy lower-bound distribution") {
    std::vector<Rat> labels{Rat(0), Rat(1, 2), Rat(1)};
    FiniteDistribution pv = build_pv_distribution(labels, Rat(1, 9216), 1);
    CHECK(pv.support[0].mass == Rat(1, 2));  // 1 - 48 * (1/96)
    Rat total(0);
    for (const auto& atom : pv.support) total += atom.mass;
    CHECK(total == Rat(1));

    // two points: the single alternative takes the whole residual
    std::vector<Rat> two{Rat(0), Rat(1)};
    FiniteDistribution pv2 = build_pv_distribution(two, Rat(1, 9216), 1);
    CHECK(pv2.support.size() == 2);
    CHECK(pv2.support[1].mass == Rat(1, 2));

    // boundary spread: 24*(k+1)*sqrt(1/2304) = 1 puts zero mass on the head
    FiniteDistribution edge = build_pv_distribution(labels, Rat(1, 2304), 1);
    CHECK(edge.support[0].mass == Rat(0));

    CHECK_THROWS(build_pv_distribution(labels, Rat(1, 3), 1));      // not a square
    CHECK_THROWS(build_pv_distribution(labels, Rat(1, 4), 1));      // head mass negative
    CHECK_THROWS(build_pv_distribution({Rat(0)}, Rat(1, 9216), 1)); // one point only
}

TEST_CASE("pigeonhole separation kernel") {
    Rat g(1, 5);
    std::vector<Rat> labels{Rat(3, 10), Rat(7, 10)};
    LabelList mu(std::vector<Rat>{Rat(1, 2)});
    // tight: distances 0.2 + 0.2 = 2 gamma exactly
    CHECK(abs_list_loss(mu, labels[0]) + abs_list_loss(mu, labels[1]) == g * Rat(2));
    CHECK(pigeonhole_error_check(mu, labels, g));

    // containing one label exactly still pays on the others
    LabelList hit(std::vector<Rat>{Rat(3, 10)});
    CHECK(pigeonhole_error_check(hit, labels, g));

    std::vector<Rat> close{Rat(0), Rat(1, 10)};
    CHECK_THROWS(pigeonhole_error_check(mu, close, g));

    // exhaustive half-grid sweep at desk scale
    Rat g10(1, 10);
    std::vector<Rat> three{Rat(2, 10), Rat(4, 10), Rat(6, 10)};
    for (std::int64_t a = 0; a <= 20; ++a)
        for (std::int64_t b = a; b <= 20; ++b)
            CHECK(pigeonhole_error_check(LabelList({Rat(a, 20), Rat(b, 20)}), three, g10));
}

TEST_CASE("experiments are deterministic in config and seed") {
    ExperimentConfig cfg;
    cfg.builder = "example1";
    cfg.builder_n = 3;
    cfg.mode = "realizable";
    cfg.gamma = Rat(1, 10);
    cfg.k = 2;
    cfg.sizes = {6};
    cfg.trials = 2;
    cfg.seed = 17;
    cfg.params.gamma = cfg.gamma;
    cfg.params.k = cfg.k;
    cfg.params.m_override = 30;
    cfg.params.l_override = 8;
    auto a = run_experiment(cfg);
    auto b = run_experiment(cfg);
    CHECK(a.json.dump() == b.json.dump());
    CHECK(a.csv == b.csv);
    cfg.seed = 18;
    auto c = run_experiment(cfg);
    CHECK(a.json.dump() != c.json.dump());
}

TEST_CASE("experiment config parsing") {
    Json j;
    j["class"] = Json{{"builder", "example1"}, {"n", 3}};
    j["mode"] = "realizable";
    j["gamma"] = "1/10";
    j["k"] = 2;
    j["sizes"] = Json::array({4, 8});
    j["trials"] = 1;
    j["seed"] = 3;
    j["params"] = Json{{"m", 30}, {"l", 6}};
    ExperimentConfig cfg = ExperimentConfig::from_json(j);
    CHECK(cfg.gamma == Rat(1, 10));
    CHECK(cfg.sizes == std::vector<int>{4, 8});
    CHECK(cfg.params.m_override == 30);
    auto rep = run_experiment(cfg);
    CHECK(rep.json["per_size"].size() == 2);
    CHECK(rep.csv.find("n,trial,") == 0);
}

TEST_CASE("verify suite passes") {
    auto results = verify_suite();
    CHECK(results.size() >= 15);
    for (const auto& r : results) {
        INFO(r.name, ": ", r.detail);
        CHECK(r.pass);
    }
    auto filtered = verify_suite("core.");
    CHECK(filtered.size() < results.size());
}

// Acceptance suite: one line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <vector>

#include "listreg/compression.hpp"
#include "listreg/harness.hpp"
#include "listreg/oig.hpp"

using namespace listreg;

namespace {

struct Criterion {
    int id;
    std::string name;
    double limit_seconds;  // 0 = no stated limit
    std::function<bool(std::string&)> run;
};

// ---------------------------------------------------------------- criterion 1

bool scaled_sum_identity(std::string& detail) {
    long checked = 0;
    for (std::int64_t den : {2, 4, 8, 16}) {
        for (int k = 1; k <= 3; ++k) {
            ThresholdSet ts = ThresholdSet::build(Rat(1, den), k);
            if (ts.count() == 0) continue;
            for (const auto& a : ts.grid) {
                std::vector<int> vals;
                vals.reserve(ts.count());
                for (std::size_t t = 0; t < ts.count(); ++t)
                    vals.push_back(classifier_count(a, ts.tuple_values(t)));
                std::int64_t total = std::accumulate(vals.begin(), vals.end(), std::int64_t{0});
                Rat back = ts.gamma * Rat(total, ts.scale_binom());
                if (back != a) {
                    detail = "identity failed at a=" + a.str() + " gamma=1/" +
                             std::to_string(den) + " k=" + std::to_string(k);
                    return false;
                }
                ++checked;
            }
        }
    }
    detail = std::to_string(checked) + " grid points exact";
    return true;
}

// ---------------------------------------------------------------- criterion 2

bool example1_dimensions(std::string& detail) {
    for (int n = 3; n <= 5; ++n) {
        HypothesisClass e1 = build_example1(n);
        auto k2 = fat_dim(e1, Rat(1, 20), 2);
        if (k2.dimension != 3) {
            detail = "fat(example1(" + std::to_string(n) + "),k=2) = " +
                     std::to_string(k2.dimension) + " != 3";
            return false;
        }
        if (!verify_fat_witness(e1, Rat(1, 20), 2, k2.witness)) {
            detail = "k=2 witness failed replay at n=" + std::to_string(n);
            return false;
        }
        auto k1 = fat_dim(e1, Rat(1, 20), 1);
        if (k1.dimension != n) {
            detail = "fat(example1(" + std::to_string(n) + "),k=1) = " +
                     std::to_string(k1.dimension) + " != n";
            return false;
        }
    }
    detail = "fat dims 3/3/3 at k=2 and n at k=1 for n in {3,4,5}";
    return true;
}

// ---------------------------------------------------------------- criterion 3

bool example2_dimensions(std::string& detail) {
    for (int n = 1; n <= 3; ++n) {
        HypothesisClass e2 = build_example2(n);
        KoigResult d2 = koig_dim(e2, Rat(1, 4), 2, n);
        if (d2.dimension > 1) {
            detail = "koig(example2(" + std::to_string(n) + "),k=2) = " +
                     std::to_string(d2.dimension) + " > 1";
            return false;
        }
        auto fat = fat_dim(e2, Rat(1, 16), 2);
        if (fat.dimension != n) {
            detail = "fat(example2(" + std::to_string(n) + "),1/16,2) = " +
                     std::to_string(fat.dimension) + " != n";
            return false;
        }
    }
    KoigResult k1 = koig_dim(build_example2(3), Rat(1, 4), 1, 3);
    if (k1.dimension < 3) {
        detail = "koig(example2(3),k=1) = " + std::to_string(k1.dimension) + " < 3";
        return false;
    }
    detail = "koig<=1 at k=2, koig=3 at k=1, fat=n at 1/16";
    return true;
}

// ---------------------------------------------------------------- criterion 4

bool training_error_bound(std::string& detail) {
    int fixtures = 0;
    auto run_fixture = [&](const HypothesisClass& cls, const Rat& gamma, int k, int n,
                           std::uint64_t seed) -> bool {
        Rng rng(seed);
        int target = static_cast<int>(rng.below(static_cast<std::uint64_t>(cls.num_rows())));
        LabeledSample s;
        for (int i = 0; i < n; ++i) {
            int x = static_cast<int>(rng.below(static_cast<std::uint64_t>(cls.domain_size)));
            s.pairs.emplace_back(x, cls.value(target, x));
        }
        PipelineParams params;
        params.gamma = gamma;
        params.k = k;
        params.seed = seed * 977 + 13;
        auto res = reg_realizable(s, cls, params);
        ++fixtures;
        return res.training_error <= rat_min(Rat(8 * k + 4) * gamma, Rat(1));
    };
    for (std::uint64_t t = 0; t < 20; ++t)
        if (!run_fixture(build_example1(4), Rat(1, 20), 2, 14, 1000 + t)) {
            detail = "example1 fixture " + std::to_string(t) + " violated the bound";
            return false;
        }
    for (std::uint64_t t = 0; t < 10; ++t)
        if (!run_fixture(build_example1(3), Rat(1, 10), 1, 10, 2000 + t)) {
            detail = "example1 k=1 fixture " + std::to_string(t) + " violated the bound";
            return false;
        }
    for (std::uint64_t t = 0; t < 10; ++t)
        if (!run_fixture(build_example2(2), Rat(1, 8), 2, 10, 3000 + t)) {
            detail = "example2 fixture " + std::to_string(t) + " violated the bound";
            return false;
        }
    Rng gen(4000);
    for (std::uint64_t t = 0; t < 12; ++t) {
        HypothesisClass cls = random_grid_class(gen, 3, 2 + static_cast<int>(gen.below(10)), 4, 8);
        int k = 1 + static_cast<int>(gen.below(2));
        if (!run_fixture(cls, Rat(1, 8), k, 9, 5000 + t)) {
            detail = "random fixture " + std::to_string(t) + " violated the bound";
            return false;
        }
    }
    detail = std::to_string(fixtures) + " realizable fixtures within min((8k+4)gamma,1)";
    return fixtures >= 50;
}

// ---------------------------------------------------------------- criterion 5

// independent recomputation of the admitted set, straight from the procedure
std::set<Rat> reference_admitted(const std::vector<std::vector<int>>& J, const ThresholdSet& ts,
                                 const Rat& r) {
    std::set<Rat> admitted;
    Rat third = r / Rat(3);
    Rat half = ts.gamma / Rat(2);
    std::int64_t binom = ts.scale_binom();
    std::int64_t den = checked_lcm((ts.gamma / Rat(2)).den,
                                   checked_lcm((ts.gamma / Rat(binom)).den, 2));
    std::vector<std::size_t> pos(ts.count(), 0);
    bool done = ts.count() == 0;
    while (!done) {
        std::int64_t total = 0;
        for (std::size_t t = 0; t < ts.count(); ++t) total += J[t][pos[t]];
        Rat hat = rat_min(Rat(1), ts.gamma * Rat(total, binom));
        for (std::int64_t ci = 0; ci <= den && !admitted.count(hat); ++ci) {
            Rat c(ci, den);
            if ((c - hat).abs() > third) continue;
            bool ok = true;
            for (std::size_t t = 0; t < ts.count() && ok; ++t) {
                bool separated = true;
                for (int j = 0; j < ts.k; ++j)
                    if ((ts.component(t, j) - c).abs() < half) separated = false;
                if (separated && J[t][pos[t]] != classifier_count(c, ts.tuple_values(t)))
                    ok = false;
            }
            if (ok) admitted.insert(hat);
        }
        done = true;
        for (std::size_t t = 0; t < ts.count(); ++t) {
            if (++pos[t] < J[t].size()) {
                done = false;
                break;
            }
            pos[t] = 0;
        }
    }
    return admitted;
}

bool merge_lists_cover(std::string& detail) {
    Rng rng(50);
    int maps = 0;
    while (maps < 1000) {
        std::int64_t den = 2 + 2 * static_cast<std::int64_t>(rng.below(2));  // 1/2 or 1/4
        int k = 1 + static_cast<int>(rng.below(3));
        Rat gamma(1, den);
        ThresholdSet ts = ThresholdSet::build(gamma, k, {});
        if (ts.count() == 0 || ts.count() > 10) continue;
        std::vector<std::vector<int>> J;
        for (std::size_t t = 0; t < ts.count(); ++t) {
            std::set<int> s;
            int len = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
            while (static_cast<int>(s.size()) < len)
                s.insert(static_cast<int>(rng.below(static_cast<std::uint64_t>(k + 1))));
            J.emplace_back(s.begin(), s.end());
        }
        Rat r = gamma * Rat(6 * k + 3);
        LabelList ex = merge_lists(J, ts, r, MergeMode::Exhaustive);
        LabelList ca = merge_lists(J, ts, r, MergeMode::Candidate);
        if (ex.values != ca.values) {
            detail = "modes disagree at map " + std::to_string(maps);
            return false;
        }
        if (static_cast<int>(ex.size()) > k) {
            detail = "cover larger than k at map " + std::to_string(maps);
            return false;
        }
        std::set<Rat> admitted = reference_admitted(J, ts, r);
        for (const auto& c : admitted) {
            bool covered = false;
            for (const auto& v : ex.values)
                if ((v - c).abs() <= r) covered = true;
            if (!covered) {
                detail = "admitted point " + c.str() + " not r-covered at map " +
                         std::to_string(maps);
                return false;
            }
        }
        for (const auto& v : ex.values)
            if (!admitted.count(v)) {
                detail = "returned point " + v.str() + " outside the admitted set";
                return false;
            }
        ++maps;
    }
    detail = "1000 synthetic maps: modes agree, covers within r, sizes <= k";
    return true;
}

// ---------------------------------------------------------------- criterion 6

bool leave_one_out_identity(std::string& detail) {
    int fixtures = 0;
    Rng gen(60);
    // real-valued weak learner
    while (fixtures < 12) {
        HypothesisClass cls = random_grid_class(gen, 3, 2 + static_cast<int>(gen.below(6)), 4, 8);
        int k = 1 + static_cast<int>(gen.below(2));
        Rat g(1, 8);
        int target = static_cast<int>(gen.below(static_cast<std::uint64_t>(cls.num_rows())));
        LabeledSample s;
        for (int x = 0; x < 3; ++x) s.pairs.emplace_back(x, cls.value(target, x));
        int misses = 0;
        for (int i = 0; i < 3; ++i) {
            LabeledSample rest;
            for (int j = 0; j < 3; ++j)
                if (j != i) rest.pairs.push_back(s.pairs[static_cast<std::size_t>(j)]);
            LabelList mu =
                weak_learner_real(cls, rest, s.pairs[static_cast<std::size_t>(i)].first, g, k);
            if (!gamma_contains(mu, s.pairs[static_cast<std::size_t>(i)].second, g)) ++misses;
        }
        RestrictedClass proj = restrict(cls, {0, 1, 2});
        OneInclusionGraph graph = build_oig(proj.cls);
        auto orient = min_max_k_outdeg(graph, g, k, OrientMode::Exact);
        int lv = -1;
        for (int v = 0; v < static_cast<int>(graph.vertices.size()); ++v) {
            bool match = true;
            for (int x = 0; x < 3; ++x)
                if (Rat(graph.vertices[static_cast<std::size_t>(v)][static_cast<std::size_t>(x)],
                        graph.den) != s.pairs[static_cast<std::size_t>(x)].second)
                    match = false;
            if (match) lv = v;
        }
        if (lv < 0) continue;
        if (misses != k_outdeg(graph, lv, orient.sigma, g)) {
            detail = "real fixture " + std::to_string(fixtures) + ": misses != outdeg";
            return false;
        }
        ++fixtures;
    }
    // partial (threshold-class) weak learner
    while (fixtures < 22) {
        HypothesisClass cls = random_grid_class(gen, 2, 2 + static_cast<int>(gen.below(5)), 4, 8);
        int k = 1 + static_cast<int>(gen.below(2));
        Rat g(1, 4);
        auto inst = build_threshold_class(cls, g, k);
        int target = static_cast<int>(gen.below(static_cast<std::uint64_t>(cls.num_rows())));
        // pick distinct non-star extended points labeled by the target row
        std::vector<std::pair<int, int>> sample;
        for (int e = 0; e < inst.partial.domain_size && sample.size() < 4; ++e) {
            std::int64_t lbl = inst.partial.rows[static_cast<std::size_t>(target)][static_cast<std::size_t>(e)];
            if (lbl != kStar && (e % 3 == target % 3))
                sample.emplace_back(e, static_cast<int>(lbl));
        }
        if (sample.size() < 4) continue;
        int m1 = static_cast<int>(sample.size());
        int misses = 0;
        for (int i = 0; i < m1; ++i) {
            std::vector<std::pair<int, int>> rest;
            for (int j = 0; j < m1; ++j)
                if (j != i) rest.push_back(sample[static_cast<std::size_t>(j)]);
            auto mu = weak_learner_partial(inst, rest, sample[static_cast<std::size_t>(i)].first);
            if (!std::binary_search(mu.begin(), mu.end(), sample[static_cast<std::size_t>(i)].second))
                ++misses;
        }
        // completion class over the sample points, oriented once
        std::vector<int> pts;
        for (const auto& [e, lbl] : sample) pts.push_back(e);
        std::sort(pts.begin(), pts.end());
        HypothesisClass comp;
        comp.domain_size = m1;
        comp.resolution = std::max(k, 1);
        comp.kind = ClassKind::Total;
        std::set<std::vector<std::int64_t>> seen;
        for (const auto& row : inst.partial.rows) {
            std::vector<std::int64_t> p;
            bool ok = true;
            for (int pt : pts) {
                if (row[static_cast<std::size_t>(pt)] == kStar) {
                    ok = false;
                    break;
                }
                p.push_back(row[static_cast<std::size_t>(pt)]);
            }
            if (ok && seen.insert(p).second) comp.rows.push_back(std::move(p));
        }
        if (comp.rows.empty()) continue;
        OneInclusionGraph graph = build_oig(comp);
        auto orient = min_max_k_outdeg(graph, Rat(0), k, OrientMode::Exact);
        int lv = -1;
        for (int v = 0; v < static_cast<int>(graph.vertices.size()); ++v) {
            bool match = true;
            for (int i = 0; i < m1; ++i) {
                int pos = static_cast<int>(std::lower_bound(pts.begin(), pts.end(),
                                                            sample[static_cast<std::size_t>(i)].first) -
                                           pts.begin());
                if (graph.vertices[static_cast<std::size_t>(v)][static_cast<std::size_t>(pos)] !=
                    sample[static_cast<std::size_t>(i)].second)
                    match = false;
            }
            if (match) lv = v;
        }
        if (lv < 0) continue;
        if (misses != k_outdeg(graph, lv, orient.sigma, Rat(0))) {
            detail = "partial fixture " + std::to_string(fixtures) + ": misses != outdeg";
            return false;
        }
        ++fixtures;
    }
    detail = std::to_string(fixtures) + " fixtures equal outdeg(L)/(m+1) exactly";
    return fixtures >= 20;
}

// ---------------------------------------------------------------- criterion 7

bool game_certificates(std::string& detail) {
    long games = 0;
    auto check_game = [&](const std::vector<std::vector<int>>& m) -> bool {
        Rat oracle = exact_game_value(m);
        GameSolution sol = solve_game(m, Rat(0));
        ++games;
        return std::abs(sol.value.to_double() - oracle.to_double()) <= 1e-6;
    };
    // exhaustive up to 3x3
    for (int rows = 1; rows <= 3; ++rows)
        for (int cols = 1; cols <= 3; ++cols) {
            int cells = rows * cols;
            for (std::uint32_t bits = 0; bits < (1u << cells); ++bits) {
                std::vector<std::vector<int>> m(static_cast<std::size_t>(rows),
                                                std::vector<int>(static_cast<std::size_t>(cols)));
                for (int i = 0; i < cells; ++i)
                    m[static_cast<std::size_t>(i / cols)][static_cast<std::size_t>(i % cols)] =
                        (bits >> i) & 1u;
                if (!check_game(m)) {
                    detail = "exhaustive " + std::to_string(rows) + "x" + std::to_string(cols) +
                             " game mismatch (bits=" + std::to_string(bits) + ")";
                    return false;
                }
            }
        }
    // random larger games up to 6x6
    Rng rng(70);
    for (int t = 0; t < 300; ++t) {
        int rows = 4 + static_cast<int>(rng.below(3));
        int cols = 4 + static_cast<int>(rng.below(3));
        std::vector<std::vector<int>> m(static_cast<std::size_t>(rows),
                                        std::vector<int>(static_cast<std::size_t>(cols)));
        for (auto& row : m)
            for (auto& e : row) e = static_cast<int>(rng.below(2));
        if (!check_game(m)) {
            detail = "random game " + std::to_string(t) + " mismatch";
            return false;
        }
    }
    // weak-learner-induced games with compliant sample size: the support
    // space saturates, so rows are all nonempty supports of the trace
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        Rng gen(seed);
        HypothesisClass cls = random_grid_class(gen, 2, 3, 3, 4);
        Rat g(1, 2);
        int k = 1;
        auto inst = build_threshold_class(cls, g, k);
        int target = static_cast<int>(gen.below(static_cast<std::uint64_t>(cls.num_rows())));
        std::vector<std::pair<int, int>> columns;
        for (int x = 0; x < 2; ++x)
            for (std::size_t t = 0; t < inst.taus.count(); ++t) {
                int label = thr_operator(cls.value(target, x), inst.taus.tuple_values(t), g);
                if (label != kStarLabel)
                    columns.emplace_back(inst.extended_point(x, static_cast<int>(t)), label);
            }
        std::sort(columns.begin(), columns.end());
        columns.erase(std::unique(columns.begin(), columns.end()), columns.end());
        if (columns.empty() || columns.size() > 8) continue;
        std::vector<std::vector<int>> payoff;
        for (std::uint32_t mask = 1; mask < (1u << columns.size()); ++mask) {
            std::vector<std::pair<int, int>> support;
            for (std::size_t i = 0; i < columns.size(); ++i)
                if ((mask >> i) & 1u) support.push_back(columns[i]);
            std::vector<int> row;
            for (const auto& [ext, label] : columns) {
                auto pred = weak_learner_partial(inst, support, ext);
                row.push_back(std::binary_search(pred.begin(), pred.end(), label) ? 0 : 1);
            }
            payoff.push_back(std::move(row));
        }
        GameSolution sol = solve_game(payoff, Rat(1, 2 * (k + 1)));
        if (!(sol.value < Rat(1, 2 * (k + 1)))) {
            detail = "weak-learner game value " + sol.value.str() + " >= 1/(2(k+1))";
            return false;
        }
    }
    detail = std::to_string(games) + " games matched the support-enumeration oracle";
    return true;
}

// ---------------------------------------------------------------- criterion 8

bool union_intersection_claims(std::string& detail) {
    int pc[256];
    for (int i = 0; i < 256; ++i) pc[i] = __builtin_popcount(static_cast<unsigned>(i));
    // exhaustive over the full 8-element universe for k = 1, 2, 3
    for (int k = 1; k <= 3; ++k) {
        bool bad = false;
        if (k == 1) {
            for (int a = 0; a < 256 && !bad; ++a)
                for (int b = 0; b < 256; ++b) {
                    int m = std::min(pc[a], pc[b]);
                    if (k * (pc[a | b] + pc[a & b]) < (k + 1) * m) {
                        bad = true;
                        break;
                    }
                }
        } else if (k == 2) {
            for (int a = 0; a < 256 && !bad; ++a)
                for (int b = 0; b < 256 && !bad; ++b) {
                    int u2 = a | b, i2 = a & b, m2 = std::min(pc[a], pc[b]);
                    for (int c = 0; c < 256; ++c) {
                        int m = std::min(m2, pc[c]);
                        if (k * (pc[u2 | c] + pc[i2 & c]) < (k + 1) * m) {
                            bad = true;
                            break;
                        }
                    }
                }
        } else {
            for (int a = 0; a < 256 && !bad; ++a)
                for (int b = a; b < 256 && !bad; ++b) {  // symmetry in the first pair
                    int u2 = a | b, i2 = a & b, m2 = std::min(pc[a], pc[b]);
                    for (int c = 0; c < 256 && !bad; ++c) {
                        int u3 = u2 | c, i3 = i2 & c, m3 = std::min(m2, pc[c]);
                        for (int d = 0; d < 256; ++d) {
                            int m = std::min(m3, pc[d]);
                            if (k * (pc[u3 | d] + pc[i3 & d]) < (k + 1) * m) {
                                bad = true;
                                break;
                            }
                        }
                    }
                }
        }
        if (bad) {
            detail = "set claim violated exhaustively at k=" + std::to_string(k);
            return false;
        }
    }
    // random instances through the library predicates
    Rng rng(80);
    for (int t = 0; t < 100000; ++t) {
        int k = 1 + static_cast<int>(rng.below(3));
        if (t % 2 == 0) {
            std::vector<std::vector<int>> sets;
            std::int64_t m = INT64_MAX;
            for (int i = 0; i <= k; ++i) {
                std::vector<int> s;
                for (int u = 0; u < 8; ++u)
                    if (rng.below(2)) s.push_back(u);
                m = std::min<std::int64_t>(m, static_cast<std::int64_t>(s.size()));
                sets.push_back(std::move(s));
            }
            if (!union_intersection_check(sets, m)) {
                detail = "set claim violated at random trial " + std::to_string(t);
                return false;
            }
        } else {
            int atoms = 2 + static_cast<int>(rng.below(5));
            std::vector<std::int64_t> raw;
            std::int64_t total = 0;
            for (int a = 0; a < atoms; ++a) {
                raw.push_back(1 + static_cast<std::int64_t>(rng.below(7)));
                total += raw.back();
            }
            std::vector<Rat> masses;
            for (auto w : raw) masses.emplace_back(w, total);
            std::vector<std::vector<int>> events;
            Rat minp(2);
            for (int i = 0; i <= k; ++i) {
                std::vector<int> ev;
                while (ev.empty())
                    for (int a = 0; a < atoms; ++a)
                        if (rng.below(2)) ev.push_back(a);
                Rat p(0);
                for (int a : ev) p += masses[static_cast<std::size_t>(a)];
                minp = rat_min(minp, p);
                events.push_back(std::move(ev));
            }
            if (!union_intersection_prob_check(events, masses, minp * Rat(999, 1000))) {
                detail = "probability claim violated at random trial " + std::to_string(t);
                return false;
            }
        }
    }
    detail = "exhaustive universe-8 sweeps (k<=3) and 100000 random instances clean";
    return true;
}

// ---------------------------------------------------------------- criterion 9

bool dimension_relations(std::string& detail) {
    Rng rng(90);
    int classes = 0;
    while (classes < 200) {
        int n = 2 + static_cast<int>(rng.below(3));
        int rows = 2 + static_cast<int>(rng.below(19));
        HypothesisClass cls = random_grid_class(rng, n, rows, 4, 8);
        int k = 1 + static_cast<int>(rng.below(2));
        Rat gamma(1, 4), alpha(1, 8);
        auto fat = fat_dim(cls, gamma, k);
        auto strong = strong_fat_dim(cls, gamma, k);
        if (strong.dimension > fat.dimension) {
            detail = "strong > fat at class " + std::to_string(classes);
            return false;
        }
        auto inst = build_threshold_class(cls, gamma, k);
        if (k_natarajan_dim(inst.partial, k).dimension >
            fat_dim(cls, gamma / Rat(2), k).dimension) {
            detail = "natarajan above fat(gamma/2) at class " + std::to_string(classes);
            return false;
        }
        HypothesisClass disc = discretize_class(cls, alpha);
        if (fat_dim(disc, rat_max(alpha, gamma - alpha), k).dimension < fat.dimension) {
            detail = "discretization claim violated at class " + std::to_string(classes);
            return false;
        }
        if (!packing_sandwich_check(cls, gamma, k).pass) {
            detail = "packing sandwich violated at class " + std::to_string(classes);
            return false;
        }
        ++classes;
    }
    detail = "200 random classes satisfy all four relations";
    return true;
}

// --------------------------------------------------------------- criterion 10

bool pigeonhole_kernel(std::string& detail) {
    long checked = 0;
    for (int k = 1; k <= 2; ++k) {
        for (std::int64_t q : {10, 20}) {
            Rat gamma(1, q);
            // all (k+1)-tuples of grid labels with pairwise gaps >= 2 gamma
            std::vector<std::vector<Rat>> tuples;
            std::vector<std::int64_t> tup(static_cast<std::size_t>(k + 1));
            auto rec = [&](auto&& self, int pos, std::int64_t start) -> void {
                if (pos == k + 1) {
                    std::vector<Rat> vals;
                    for (auto v : tup) vals.emplace_back(v, q);
                    tuples.push_back(std::move(vals));
                    return;
                }
                for (std::int64_t v = start; v <= q; ++v) {
                    tup[static_cast<std::size_t>(pos)] = v;
                    self(self, pos + 1, v + 2);  // spacing 2 gamma = 2/q
                }
            };
            rec(rec, 0, 0);
            // all half-grid lists of size <= k
            std::vector<LabelList> lists;
            for (std::int64_t a = 0; a <= 2 * q; ++a) {
                lists.push_back(LabelList({Rat(a, 2 * q)}));
                if (k == 2)
                    for (std::int64_t b = a + 1; b <= 2 * q; ++b)
                        lists.push_back(LabelList({Rat(a, 2 * q), Rat(b, 2 * q)}));
            }
            for (const auto& labels : tuples)
                for (const auto& mu : lists) {
                    ++checked;
                    if (!pigeonhole_error_check(mu, labels, gamma)) {
                        detail = "kernel violated at mu=" + mu.str();
                        return false;
                    }
                }
        }
    }
    detail = std::to_string(checked) + " (mu, label-tuple) pairs all above 2gamma/(k+1)";
    return true;
}

// --------------------------------------------------------------- criterion 11

bool generalization_trend(std::string& detail) {
    HypothesisClass e1 = build_example1(5);
    std::vector<Rat> marginal{Rat(35, 100), Rat(30, 100), Rat(6, 100), Rat(17, 100),
                              Rat(12, 100)};
    const int trials = 100;
    std::vector<double> err20(trials), err80(trials);
    for (int trial = 0; trial < trials; ++trial) {
        Rng trng = Rng(1106).derive("trial").derive(static_cast<std::uint64_t>(trial));
        int target = static_cast<int>(trng.below(static_cast<std::uint64_t>(e1.num_rows())));
        FiniteDistribution dist;
        for (int x = 0; x < 5; ++x)
            dist.support.push_back({x, e1.value(target, x), marginal[static_cast<std::size_t>(x)]});
        dist.validate();
        Rng draw = trng.derive("draw");
        LabeledSample s80 = dist.draw(80, draw);
        LabeledSample s20;
        s20.pairs.assign(s80.pairs.begin(), s80.pairs.begin() + 20);  // paired prefix

        for (int which = 0; which < 2; ++which) {
            const LabeledSample& s = which == 0 ? s20 : s80;
            PipelineParams params;
            params.gamma = Rat(1, 20);
            params.k = 2;
            params.seed = Rng::mix(1106 + 7919ull * static_cast<std::uint64_t>(trial) + which);
            auto res = reg_realizable(s, e1, params);
            ListPredictor pred = [&](int x) { return res.hypothesis[static_cast<std::size_t>(x)]; };
            double err = population_error(pred, dist).to_double();
            (which == 0 ? err20 : err80)[static_cast<std::size_t>(trial)] = err;
        }
    }
    double m20 = 0, m80 = 0;
    for (int t = 0; t < trials; ++t) {
        m20 += err20[static_cast<std::size_t>(t)];
        m80 += err80[static_cast<std::size_t>(t)];
    }
    m20 /= trials;
    m80 /= trials;
    // 95% half-width of the paired mean difference
    double mdiff = m20 - m80, var = 0;
    for (int t = 0; t < trials; ++t) {
        double d = err20[static_cast<std::size_t>(t)] - err80[static_cast<std::size_t>(t)];
        var += (d - mdiff) * (d - mdiff);
    }
    var /= trials - 1;
    double half = 1.96 * std::sqrt(var / trials);
    std::ostringstream os;
    os << "mean test error " << m20 << " @20 vs " << m80 << " @80, paired halfwidth " << half;
    detail = os.str();
    double gamma = 0.05;
    if (m80 > gamma + 0.15) {
        detail += "; FAIL absolute bound";
        return false;
    }
    if (!(m80 < m20 - half)) {
        detail += "; FAIL trend";
        return false;
    }
    return true;
}

// --------------------------------------------------------------- criterion 12

bool determinism_and_compression(std::string& detail) {
    ExperimentConfig cfg;
    cfg.builder = "example1";
    cfg.builder_n = 4;
    cfg.mode = "realizable";
    cfg.gamma = Rat(1, 20);
    cfg.k = 2;
    cfg.sizes = {10};
    cfg.trials = 2;
    cfg.seed = 23;
    cfg.params.gamma = cfg.gamma;
    cfg.params.k = cfg.k;
    auto a = run_experiment(cfg);
    auto b = run_experiment(cfg);
    if (a.json.dump() != b.json.dump() || a.csv != b.csv) {
        detail = "reports differ for identical (config, seed)";
        return false;
    }

    HypothesisClass e1 = build_example1(4);
    Rng rng(120);
    for (int trial = 0; trial < 4; ++trial) {
        int target = static_cast<int>(rng.below(static_cast<std::uint64_t>(e1.num_rows())));
        LabeledSample s;
        for (int i = 0; i < 10; ++i) {
            int x = static_cast<int>(rng.below(4));
            s.pairs.emplace_back(x, e1.value(target, x));
        }
        PipelineParams params;
        params.gamma = Rat(1, 20);
        params.k = 2;
        params.seed = 300 + trial;
        auto res = reg_realizable(s, e1, params);
        auto rebuilt = reconstruct_hypothesis(res.record, e1);
        for (int x = 0; x < 4; ++x)
            if (rebuilt[static_cast<std::size_t>(x)].values !=
                res.hypothesis[static_cast<std::size_t>(x)].values) {
                detail = "reconstruction differs from the pipeline output";
                return false;
            }
        // accounting matches m*l examples plus m*l*k*ceil(log2(1/gamma)) bits
        std::int64_t m = res.report["constants"]["m"].get<std::int64_t>();
        std::int64_t l = res.report["constants"]["l"].get<std::int64_t>();
        if (res.record.example_count() != m * l) {
            detail = "example count != m*l";
            return false;
        }
        if (res.record.side_bits() != m * l * 2 * 5) {  // ceil(log2(20)) = 5
            detail = "side bits do not follow the formula";
            return false;
        }
        if (res.record.size() != res.record.example_count() + res.record.side_bits()) {
            detail = "size != examples + side bits";
            return false;
        }
    }
    detail = "byte-identical reports; records reconstruct and account exactly";
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    std::string filter = argc > 1 ? argv[1] : "";
    std::vector<Criterion> criteria = {
        {1, "scaled-sum identity", 10, scaled_sum_identity},
        {2, "example-1 dimensions", 60, example1_dimensions},
        {3, "example-2 dimensions", 600, example2_dimensions},
        {4, "realizable training-error bound", 600, training_error_bound},
        {5, "merge-lists cover", 0, merge_lists_cover},
        {6, "leave-one-out identity", 0, leave_one_out_identity},
        {7, "game certificates", 0, game_certificates},
        {8, "union/intersection claims", 0, union_intersection_claims},
        {9, "dimension relations", 0, dimension_relations},
        {10, "pigeonhole kernel", 0, pigeonhole_kernel},
        {11, "generalization trend", 1800, generalization_trend},
        {12, "determinism and compression", 0, determinism_and_compression},
    };
    bool all = true;
    for (auto& c : criteria) {
        if (!filter.empty() && std::to_string(c.id) != filter) continue;
        auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool pass = false;
        try {
            pass = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_seconds > 0 && secs > c.limit_seconds) {
            pass = false;
            detail += " [over the " + std::to_string(static_cast<int>(c.limit_seconds)) +
                      "s budget]";
        }
        std::printf("CRITERION %2d %s: %s (%.2fs) %s\n", c.id, pass ? "PASS" : "FAIL",
                    c.name.c_str(), secs, detail.c_str());
        std::fflush(stdout);
        all = all && pass;
    }
    return all ? 0 : 1;
}

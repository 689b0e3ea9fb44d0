#include "listreg/harness.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "listreg/oig.hpp"

namespace listreg {

HypothesisClass build_example1(int n) {
    if (n < 3) throw std::invalid_argument("example1 needs n >= 3");
    if (n > 14) throw std::runtime_error("exceeds desk scale: example1 size cap");
    HypothesisClass cls;
    cls.domain_size = n;
    cls.resolution = 10;
    cls.kind = ClassKind::Total;
    std::vector<std::int64_t> row(static_cast<std::size_t>(n), 1);
    auto rec = [&](auto&& self, int x) -> void {
        if (x == n) {
            cls.rows.push_back(row);
            return;
        }
        int hi = x < 3 ? 3 : 2;
        for (int v = 1; v <= hi; ++v) {
            row[static_cast<std::size_t>(x)] = v;
            self(self, x + 1);
        }
    };
    rec(rec, 0);
    return cls;
}

HypothesisClass build_example2(int n) {
    if (n < 1) throw std::invalid_argument("example2 needs n >= 1");
    if (n > 5) throw std::runtime_error("exceeds desk scale: example2 size cap");
    HypothesisClass cls;
    cls.domain_size = n;
    cls.resolution = std::int64_t{1} << (n + 4);
    cls.kind = ClassKind::Total;
    for (std::uint32_t b = 0; b < (1u << n); ++b) {
        std::int64_t tail = 0;  // (1/16) sum_j 2^{-j} b_j as numerator over 2^{n+4}
        for (int j = 1; j <= n; ++j)
            if ((b >> (j - 1)) & 1u) tail += std::int64_t{1} << (n - j);
        for (std::uint32_t c = 0; c < (1u << n); ++c) {
            std::vector<std::int64_t> row(static_cast<std::size_t>(n));
            for (int i = 1; i <= n; ++i) {
                std::int64_t v = tail;
                if ((c >> (i - 1)) & 1u) v += std::int64_t{1} << (n + 3);
                if ((b >> (i - 1)) & 1u) v += 3 * (std::int64_t{1} << (n + 1));
                row[static_cast<std::size_t>(i - 1)] = v;
            }
            cls.rows.push_back(std::move(row));
        }
    }
    return cls;
}

FiniteDistribution build_db_distribution(const HypothesisClass& cls, const ShatterWitness& witness,
                                         const std::vector<int>& pattern) {
    auto it = witness.assignment.find(pattern);
    if (it == witness.assignment.end())
        throw std::invalid_argument("pattern not realized by the witness");
    int row = it->second;
    FiniteDistribution dist;
    std::int64_t d = static_cast<std::int64_t>(witness.points.size());
    for (int x : witness.points)
        dist.support.push_back({x, cls.value(row, x), Rat(1, d)});
    dist.validate();
    return dist;
}

FiniteDistribution build_pv_distribution(const std::vector<Rat>& vertex_labels, const Rat& eps,
                                         int k) {
    if (vertex_labels.size() < 2) throw std::invalid_argument("need at least two points");
    auto isqrt = [](std::int64_t v) -> std::int64_t {
        std::int64_t r = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
        while (r * r > v) --r;
        while ((r + 1) * (r + 1) <= v) ++r;
        return r;
    };
    std::int64_t sn = isqrt(eps.num), sd = isqrt(eps.den);
    if (sn * sn != eps.num || sd * sd != eps.den)
        throw std::invalid_argument("eps must be an exact rational square");
    Rat root(sn, sd);
    Rat spread = Rat(24 * (k + 1)) * root;
    Rat head = Rat(1) - spread;
    if (head < Rat(0) || head > Rat(1))
        throw std::invalid_argument("eps too large: head mass outside [0,1]");
    FiniteDistribution dist;
    std::int64_t rest = static_cast<std::int64_t>(vertex_labels.size()) - 1;
    dist.support.push_back({0, vertex_labels[0], head});
    for (std::size_t i = 1; i < vertex_labels.size(); ++i)
        dist.support.push_back({static_cast<int>(i), vertex_labels[i], spread / Rat(rest)});
    dist.validate();
    return dist;
}

bool pigeonhole_error_check(const LabelList& mu, const std::vector<Rat>& labels,
                            const Rat& gamma) {
    for (std::size_t i = 0; i < labels.size(); ++i)
        for (std::size_t j = i + 1; j < labels.size(); ++j)
            if ((labels[i] - labels[j]).abs() < gamma * Rat(2))
                throw std::invalid_argument("labels not pairwise 2gamma separated");
    Rat total(0);
    for (const auto& c : labels) total += abs_list_loss(mu, c);
    return total >= gamma * Rat(2);
}

HypothesisClass random_grid_class(Rng& rng, int n, int rows, int max_labels, std::int64_t q) {
    std::set<std::int64_t> labels;
    while (static_cast<int>(labels.size()) < max_labels)
        labels.insert(static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(q + 1))));
    std::vector<std::int64_t> pool(labels.begin(), labels.end());
    HypothesisClass cls;
    cls.domain_size = n;
    cls.resolution = q;
    cls.kind = ClassKind::Total;
    for (int r = 0; r < rows; ++r) {
        std::vector<std::int64_t> row(static_cast<std::size_t>(n));
        for (int x = 0; x < n; ++x)
            row[static_cast<std::size_t>(x)] =
                pool[static_cast<std::size_t>(rng.below(pool.size()))];
        cls.rows.push_back(std::move(row));
    }
    return cls;
}

// ------------------------------------------------------------- verify suite

namespace {

using Check = CheckResult (*)();

CheckResult make_pass(const std::string& name) { return {name, true, ""}; }
CheckResult make_fail(const std::string& name, const std::string& detail) {
    return {name, false, detail};
}

CheckResult check_loss_zero_iff_member() {
    const std::string name = "core.loss_zero_iff_member";
    Rng rng(11);
    for (int t = 0; t < 500; ++t) {
        std::int64_t q = 8;
        std::vector<Rat> vs;
        int len = 1 + static_cast<int>(rng.below(3));
        for (int i = 0; i < len; ++i)
            vs.emplace_back(static_cast<std::int64_t>(rng.below(q + 1)), q);
        LabelList mu(vs);
        Rat y(static_cast<std::int64_t>(rng.below(q + 1)), q);
        bool zero = abs_list_loss(mu, y).is_zero();
        if (zero != mu.contains(y)) return make_fail(name, "mismatch at trial " + std::to_string(t));
    }
    return make_pass(name);
}

CheckResult check_gamma_monotone() {
    const std::string name = "core.gamma_contains_monotone";
    Rng rng(12);
    for (int t = 0; t < 500; ++t) {
        std::int64_t q = 12;
        LabelList mu(std::vector<Rat>{Rat(static_cast<std::int64_t>(rng.below(q + 1)), q)});
        Rat y(static_cast<std::int64_t>(rng.below(q + 1)), q);
        Rat g1(static_cast<std::int64_t>(rng.below(q)) + 1, 2 * q);
        Rat g2 = g1 + Rat(1, q);
        if (gamma_contains(mu, y, g1) && !gamma_contains(mu, y, g2))
            return make_fail(name, "monotonicity violated");
    }
    return make_pass(name);
}

CheckResult check_discretize_props() {
    const std::string name = "core.discretize_bounded_and_monotone";
    Rng rng(13);
    for (int t = 0; t < 200; ++t) {
        HypothesisClass cls = random_grid_class(rng, 3, 6, 4, 12);
        Rat alpha(1 + static_cast<std::int64_t>(rng.below(4)), 12);
        HypothesisClass disc = discretize_class(cls, alpha);
        for (int r = 0; r < cls.num_rows(); ++r)
            for (int x = 0; x < cls.domain_size; ++x) {
                Rat before = cls.value(r, x), after = disc.value(r, x);
                if (after > before || before - after >= alpha)
                    return make_fail(name, "moved by >= alpha");
            }
        for (int r = 0; r < cls.num_rows(); ++r)
            for (int s = 0; s < cls.num_rows(); ++s)
                for (int x = 0; x < cls.domain_size; ++x)
                    if (cls.value(r, x) >= cls.value(s, x) &&
                        disc.value(r, x) < disc.value(s, x))
                        return make_fail(name, "order not preserved");
    }
    return make_pass(name);
}

CheckResult check_union_intersection_random() {
    const std::string name = "core.union_intersection_random";
    Rng rng(14);
    for (int t = 0; t < 4000; ++t) {
        int k = 1 + static_cast<int>(rng.below(3));
        int universe = 1 + static_cast<int>(rng.below(8));
        std::vector<std::vector<int>> sets;
        std::int64_t m = INT64_MAX;
        for (int i = 0; i <= k; ++i) {
            std::vector<int> s;
            for (int u = 0; u < universe; ++u)
                if (rng.below(2)) s.push_back(u);
            m = std::min<std::int64_t>(m, static_cast<std::int64_t>(s.size()));
            sets.push_back(std::move(s));
        }
        if (!union_intersection_check(sets, m))
            return make_fail(name, "claim violated at trial " + std::to_string(t));
    }
    return make_pass(name);
}

CheckResult check_union_intersection_prob_random() {
    const std::string name = "core.union_intersection_prob_random";
    Rng rng(15);
    for (int t = 0; t < 2000; ++t) {
        int k = 1 + static_cast<int>(rng.below(3));
        int atoms = 2 + static_cast<int>(rng.below(5));
        std::vector<Rat> masses;
        std::int64_t total = 0;
        std::vector<std::int64_t> raw;
        for (int a = 0; a < atoms; ++a) {
            std::int64_t w = 1 + static_cast<std::int64_t>(rng.below(5));
            raw.push_back(w);
            total += w;
        }
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
        Rat c = minp * Rat(999, 1000);  // strictly below every event mass
        if (!union_intersection_prob_check(events, masses, c))
            return make_fail(name, "probability claim violated at trial " + std::to_string(t));
    }
    return make_pass(name);
}

CheckResult check_dim_relations_random() {
    const std::string name = "dims.relations_random";
    Rng rng(16);
    for (int t = 0; t < 60; ++t) {
        int n = 2 + static_cast<int>(rng.below(3));
        int rows = 2 + static_cast<int>(rng.below(10));
        HypothesisClass cls = random_grid_class(rng, n, rows, 4, 8);
        int k = 1 + static_cast<int>(rng.below(2));
        Rat gamma(1, 4);
        auto fat = fat_dim(cls, gamma, k);
        auto strong = strong_fat_dim(cls, gamma, k);
        if (strong.dimension > fat.dimension) return make_fail(name, "strong > fat");
        if (!verify_fat_witness(cls, gamma, k, fat.witness))
            return make_fail(name, "fat witness failed replay");
        if (!verify_strong_fat_witness(cls, gamma, k, strong.witness))
            return make_fail(name, "strong witness failed replay");
        auto thr = build_threshold_class(cls, gamma, k);
        auto nat = k_natarajan_dim(thr.partial, k);
        auto fat_half = fat_dim(cls, gamma / Rat(2), k);
        if (nat.dimension > fat_half.dimension) return make_fail(name, "natarajan > fat(gamma/2)");
        Rat alpha(1, 8);
        HypothesisClass disc = discretize_class(cls, alpha);
        Rat residual = rat_max(alpha, gamma - alpha);
        if (fat_dim(disc, residual, k).dimension < fat.dimension)
            return make_fail(name, "discretization claim violated");
        auto sandwich = packing_sandwich_check(cls, gamma, k);
        if (!sandwich.pass) return make_fail(name, "packing sandwich violated");
    }
    return make_pass(name);
}

CheckResult check_fat_monotone_k() {
    const std::string name = "dims.fat_monotone_in_k";
    Rng rng(17);
    for (int t = 0; t < 40; ++t) {
        HypothesisClass cls = random_grid_class(rng, 3, 8, 4, 8);
        Rat gamma(1, 8);
        if (fat_dim(cls, gamma, 1).dimension < fat_dim(cls, gamma, 2).dimension)
            return make_fail(name, "fat dim increased with k");
    }
    return make_pass(name);
}

CheckResult check_scaled_sum_identity() {
    const std::string name = "learner.scaled_sum_identity";
    for (std::int64_t den : {2, 4, 8}) {
        for (int k = 1; k <= 3; ++k) {
            Rat gamma(1, den);
            ThresholdSet ts = ThresholdSet::build(gamma, k);
            if (ts.count() == 0) continue;
            for (const auto& a : ts.grid) {
                std::vector<int> vals;
                vals.reserve(ts.count());
                for (std::size_t t = 0; t < ts.count(); ++t)
                    vals.push_back(classifier_count(a, ts.tuple_values(t)));
                Rat back = ts.gamma * Rat(std::accumulate(vals.begin(), vals.end(), std::int64_t{0}),
                                          ts.scale_binom());
                if (back != a)
                    return make_fail(name, "identity failed at a=" + a.str() + " gamma=" +
                                               gamma.str() + " k=" + std::to_string(k));
            }
        }
    }
    return make_pass(name);
}

CheckResult check_thr_coherence() {
    const std::string name = "learner.thr_classifier_coherence";
    for (std::int64_t den : {2, 4, 8}) {
        Rat gamma(1, den);
        for (int k = 1; k <= 2; ++k) {
            ThresholdSet ts = ThresholdSet::build(gamma, k);
            std::int64_t half = 2 * den;
            for (std::int64_t i = 0; i <= half; ++i) {
                Rat y(i, half);
                auto sep = separated_set(y, ts);
                std::set<int> sepset(sep.begin(), sep.end());
                for (std::size_t t = 0; t < ts.count(); ++t) {
                    int thr = thr_operator(y, ts.tuple_values(t), gamma);
                    bool in_sep = sepset.count(static_cast<int>(t)) > 0;
                    if (in_sep != (thr != kStarLabel))
                        return make_fail(name, "separated set mismatch at y=" + y.str());
                    if (thr != kStarLabel && thr != classifier_count(y, ts.tuple_values(t)))
                        return make_fail(name, "thr != classifier at y=" + y.str());
                }
            }
        }
    }
    return make_pass(name);
}

CheckResult check_reconstruction_bound() {
    const std::string name = "learner.reconstruction_bound";
    Rng rng(18);
    for (int trial = 0; trial < 300; ++trial) {
        std::int64_t den = 2 + 2 * static_cast<std::int64_t>(rng.below(4));
        Rat gamma(1, den);
        int k = 1 + static_cast<int>(rng.below(2));
        ThresholdSet ts = ThresholdSet::build(gamma, k);
        if (ts.count() == 0) continue;
        Rat y(static_cast<std::int64_t>(rng.below(2 * den + 1)), 2 * den);
        auto sep = separated_set(y, ts);
        std::set<int> sepset(sep.begin(), sep.end());
        std::vector<int> vals(ts.count(), 0);
        for (std::size_t t = 0; t < ts.count(); ++t) {
            if (sepset.count(static_cast<int>(t)))
                vals[t] = classifier_count(y, ts.tuple_values(t));
            else
                vals[t] = static_cast<int>(rng.below(static_cast<std::uint64_t>(k + 1)));
        }
        Rat recon = scaled_sum(vals, ts);
        if ((recon - y).abs() > Rat(2 * k + 1) * gamma)
            return make_fail(name, "reconstruction error above (2k+1)gamma at y=" + y.str());
    }
    return make_pass(name);
}

CheckResult check_merge_modes_agree() {
    const std::string name = "learner.merge_modes_agree";
    Rng rng(19);
    for (int trial = 0; trial < 120; ++trial) {
        std::int64_t den = 2 + 2 * static_cast<std::int64_t>(rng.below(2));  // 1/2 or 1/4
        int k = 1 + static_cast<int>(rng.below(2));
        Rat gamma(1, den);
        ThresholdSet ts = ThresholdSet::build(gamma, k);
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
        LabelList a = merge_lists(J, ts, r, MergeMode::Exhaustive);
        LabelList b = merge_lists(J, ts, r, MergeMode::Candidate);
        if (a.values != b.values) return make_fail(name, "modes disagree at trial " + std::to_string(trial));
        if (static_cast<int>(a.size()) > k) return make_fail(name, "cover larger than k");
    }
    return make_pass(name);
}

CheckResult check_topk_majority() {
    const std::string name = "learner.topk_majority_inclusion";
    Rng rng(20);
    for (int trial = 0; trial < 400; ++trial) {
        int k = 1 + static_cast<int>(rng.below(3));
        int l = 1 + static_cast<int>(rng.below(9));
        std::vector<std::vector<int>> lists;
        std::vector<int> count(static_cast<std::size_t>(k + 2), 0);
        for (int i = 0; i < l; ++i) {
            std::set<int> s;
            int len = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
            while (static_cast<int>(s.size()) < len)
                s.insert(static_cast<int>(rng.below(static_cast<std::uint64_t>(k + 2))));
            for (int v : s) ++count[static_cast<std::size_t>(v)];
            lists.emplace_back(s.begin(), s.end());
        }
        auto agg = topk_aggregate(lists, k);
        for (int v = 0; v < k + 2; ++v)
            if (static_cast<std::int64_t>(count[static_cast<std::size_t>(v)]) * (k + 1) >
                    static_cast<std::int64_t>(k) * l &&
                !std::binary_search(agg.begin(), agg.end(), v))
                return make_fail(name, "majority label dropped");
    }
    return make_pass(name);
}

CheckResult check_game_small_oracle() {
    const std::string name = "learner.game_matches_support_oracle";
    Rng rng(21);
    for (int trial = 0; trial < 60; ++trial) {
        int r = 2 + static_cast<int>(rng.below(5));
        int c = 2 + static_cast<int>(rng.below(5));
        std::vector<std::vector<int>> m(static_cast<std::size_t>(r),
                                        std::vector<int>(static_cast<std::size_t>(c)));
        for (auto& row : m)
            for (auto& e : row) e = static_cast<int>(rng.below(2));
        Rat oracle = exact_game_value(m);
        GameSolution sol = solve_game(m, Rat(0), Rat(1, 1000000), 60000);
        double diff = std::abs(sol.value.to_double() - oracle.to_double());
        if (diff > 1e-6)
            return make_fail(name, "value off by " + std::to_string(diff));
    }
    return make_pass(name);
}

CheckResult check_pigeonhole_sweep() {
    const std::string name = "harness.pigeonhole_sweep";
    std::int64_t q = 10;
    Rat gamma(1, 10);
    std::vector<Rat> labels{Rat(2, 10), Rat(4, 10), Rat(6, 10)};
    for (std::int64_t a = 0; a <= 2 * q; ++a) {
        for (std::int64_t b = a; b <= 2 * q; ++b) {
            LabelList mu(std::vector<Rat>{Rat(a, 2 * q), Rat(b, 2 * q)});
            if (!pigeonhole_error_check(mu, labels, gamma))
                return make_fail(name, "violated at mu=" + mu.str());
        }
    }
    return make_pass(name);
}

CheckResult check_example_values() {
    const std::string name = "harness.example_class_values";
    if (build_example1(3).num_rows() != 27) return make_fail(name, "example1(3) row count");
    if (build_example1(4).num_rows() != 54) return make_fail(name, "example1(4) row count");
    HypothesisClass e2 = build_example2(1);
    std::set<std::int64_t> vals;
    for (const auto& row : e2.rows) vals.insert(row[0]);
    // n=1 values: 0, 13/32, 1/2, 29/32 over Q=32
    std::set<std::int64_t> expect{0, 13, 16, 29};
    if (vals != expect) return make_fail(name, "example2(1) values");
    return make_pass(name);
}

CheckResult check_pipeline_smoke() {
    const std::string name = "learner.pipeline_training_error";
    HypothesisClass cls = build_example1(3);
    FiniteDistribution dist;
    for (int x = 0; x < 3; ++x) dist.support.push_back({x, Rat(1, 10), Rat(1, 3)});
    Rng rng(31);
    PipelineParams params;
    params.gamma = Rat(1, 10);
    params.k = 2;
    params.seed = 7;
    params.l_override = 12;
    params.m_override = 40;
    for (int trial = 0; trial < 2; ++trial) {
        Rng trial_rng = rng.derive(static_cast<std::uint64_t>(trial));
        int target = static_cast<int>(trial_rng.below(static_cast<std::uint64_t>(cls.num_rows())));
        LabeledSample s;
        for (int i = 0; i < 8; ++i) {
            int x = static_cast<int>(trial_rng.below(3));
            s.pairs.emplace_back(x, cls.value(target, x));
        }
        auto res = reg_realizable(s, cls, params);
        Rat bound = rat_min(Rat(8 * params.k + 4) * params.gamma, Rat(1));
        if (res.training_error > bound) return make_fail(name, "training error above bound");
    }
    return make_pass(name);
}

CheckResult check_oig_identities() {
    const std::string name = "oig.orientation_identities";
    // every split two-vertex edge charges exactly one endpoint
    HypothesisClass e2 = build_example2(2);
    OneInclusionGraph g = build_oig(e2);
    auto res = min_max_k_outdeg(g, Rat(1, 4), 1, OrientMode::Exact);
    std::int64_t total = 0;
    for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v)
        total += k_outdeg(g, v, res.sigma, Rat(1, 4));
    if (total != static_cast<std::int64_t>(g.edges.size()))
        return make_fail(name, "total outdegree != edge count on split edges");
    // dimension monotone in the list size, and projections above it orient
    // under the threshold
    int d1 = koig_dim(e2, Rat(1, 4), 1, 2).dimension;
    int d2 = koig_dim(e2, Rat(1, 4), 2, 2).dimension;
    if (d1 < d2) return make_fail(name, "oig dimension increased with k");
    RestrictedClass proj = restrict(e2, {0, 1});
    auto above = min_max_k_outdeg(build_oig(proj.cls), Rat(1, 4), 2, OrientMode::Exact);
    if (!(Rat(above.max_outdeg) < Rat(2, 6)))
        return make_fail(name, "projection above the dimension missed the threshold");
    return make_pass(name);
}

CheckResult check_leave_one_out_identity() {
    const std::string name = "oig.leave_one_out_identity";
    Rng rng(33);
    int done = 0;
    for (int trial = 0; trial < 30 && done < 10; ++trial) {
        HypothesisClass cls = random_grid_class(rng, 3, 6, 4, 8);
        int k = 1 + static_cast<int>(rng.below(2));
        Rat g(1, 8);
        int target = static_cast<int>(rng.below(static_cast<std::uint64_t>(cls.num_rows())));
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
        if (misses != k_outdeg(graph, lv, orient.sigma, g))
            return make_fail(name, "held-out misses differ from the vertex outdegree");
        ++done;
    }
    return done >= 10 ? make_pass(name) : make_fail(name, "too few usable fixtures");
}

CheckResult check_example_dimension_regressions() {
    const std::string name = "harness.example_dimension_regressions";
    if (fat_dim(build_example1(4), Rat(1, 20), 2).dimension != 3)
        return make_fail(name, "ternary class k=2 dimension");
    if (fat_dim(build_example1(4), Rat(1, 20), 1).dimension != 4)
        return make_fail(name, "ternary class k=1 dimension");
    if (koig_dim(build_example2(2), Rat(1, 4), 2, 2).dimension > 1)
        return make_fail(name, "binary-sum class oig dimension above 1");
    if (fat_dim(build_example2(2), Rat(1, 16), 2).dimension != 2)
        return make_fail(name, "binary-sum class margin dimension");
    return make_pass(name);
}

CheckResult check_compression_invariants() {
    const std::string name = "compression.accounting_and_reconstruction";
    HypothesisClass e1 = build_example1(3);
    PipelineParams params;
    params.gamma = Rat(1, 10);
    params.k = 2;
    params.seed = 19;
    params.m_override = 24;
    params.l_override = 6;
    LabeledSample s;
    Rng rng(34);
    for (int i = 0; i < 7; ++i) {
        int x = static_cast<int>(rng.below(3));
        s.pairs.emplace_back(x, e1.value(9, x));
    }
    auto res = reg_realizable(s, e1, params);
    if (res.record.example_count() != 24 * 6) return make_fail(name, "example count != m*l");
    if (res.record.side_bits() != 24 * 6 * 2 * 4)
        return make_fail(name, "side bits off the k*ceil(log2(1/gamma)) formula");
    auto h1 = reconstruct_hypothesis(res.record, e1);
    auto h2 = reconstruct_hypothesis(res.record, e1);
    for (int x = 0; x < 3; ++x) {
        if (h1[static_cast<std::size_t>(x)].values != res.hypothesis[static_cast<std::size_t>(x)].values)
            return make_fail(name, "reconstruction differs from the pipeline output");
        if (h1[static_cast<std::size_t>(x)].values != h2[static_cast<std::size_t>(x)].values)
            return make_fail(name, "reconstruction not deterministic");
    }
    double b1 = generalization_bound(1000, 10, 0.1, 0.05, 0.05);
    if (generalization_bound(1000, 20, 0.1, 0.05, 0.05) <= b1 ||
        generalization_bound(1000, 10, 0.01, 0.05, 0.05) <= b1 || b1 < 0.05)
        return make_fail(name, "bound monotonicity violated");
    return make_pass(name);
}

CheckResult check_adversarial_distributions() {
    const std::string name = "harness.adversarial_distributions";
    HypothesisClass e1 = build_example1(3);
    Rat g(1, 20);
    auto strong = strong_fat_dim(e1, g, 2);
    if (strong.dimension != 3) return make_fail(name, "unexpected strong dimension");
    std::vector<int> b(3, 0);
    auto rec = [&](auto&& self, int i) -> bool {
        if (i == 3) {
            FiniteDistribution d = build_db_distribution(e1, strong.witness, b);
            Rat best(2);
            for (int r = 0; r < e1.num_rows(); ++r) {
                ListPredictor h = [&](int x) { return LabelList({e1.value(r, x)}); };
                best = rat_min(best, population_error(h, d));
            }
            return best == Rat(0);
        }
        for (b[static_cast<std::size_t>(i)] = 0; b[static_cast<std::size_t>(i)] <= 2;
             ++b[static_cast<std::size_t>(i)])
            if (!self(self, i + 1)) return false;
        return true;
    };
    if (!rec(rec, 0)) return make_fail(name, "some pattern distribution has nonzero best error");

    FiniteDistribution pv = build_pv_distribution({Rat(0), Rat(1, 2), Rat(1)}, Rat(1, 9216), 1);
    Rat total(0);
    for (const auto& atom : pv.support) total += atom.mass;
    if (total != Rat(1) || pv.support[0].mass != Rat(1, 2))
        return make_fail(name, "head-heavy distribution masses wrong");
    return make_pass(name);
}

CheckResult check_report_determinism() {
    const std::string name = "harness.report_determinism";
    ExperimentConfig cfg;
    cfg.builder = "example1";
    cfg.builder_n = 3;
    cfg.mode = "realizable";
    cfg.gamma = Rat(1, 10);
    cfg.k = 2;
    cfg.sizes = {6};
    cfg.trials = 1;
    cfg.seed = 5;
    cfg.params.gamma = cfg.gamma;
    cfg.params.k = cfg.k;
    cfg.params.l_override = 8;
    cfg.params.m_override = 30;
    auto a = run_experiment(cfg);
    auto b = run_experiment(cfg);
    if (a.json.dump() != b.json.dump() || a.csv != b.csv)
        return make_fail(name, "reports differ between identical runs");
    return make_pass(name);
}

}  // namespace

std::vector<CheckResult> verify_suite(const std::string& filter) {
    std::vector<Check> checks = {
        check_loss_zero_iff_member,    check_gamma_monotone,
        check_discretize_props,        check_union_intersection_random,
        check_union_intersection_prob_random, check_dim_relations_random,
        check_fat_monotone_k,          check_scaled_sum_identity,
        check_thr_coherence,           check_reconstruction_bound,
        check_merge_modes_agree,       check_topk_majority,
        check_game_small_oracle,       check_pigeonhole_sweep,
        check_oig_identities,          check_leave_one_out_identity,
        check_example_values,          check_example_dimension_regressions,
        check_compression_invariants,  check_adversarial_distributions,
        check_pipeline_smoke,          check_report_determinism,
    };
    std::vector<CheckResult> results;
    for (auto check : checks) {
        CheckResult r = check();
        if (!filter.empty() && r.name.find(filter) == std::string::npos) continue;
        results.push_back(std::move(r));
    }
    return results;
}

// ----------------------------------------------------------------- experiments

ExperimentConfig ExperimentConfig::from_json(const Json& j) {
    ExperimentConfig cfg;
    cfg.raw = j;
    if (j.contains("class")) {
        const auto& c = j.at("class");
        if (c.contains("file")) {
            cfg.class_file = c.at("file").get<std::string>();
        } else {
            cfg.builder = c.at("builder").get<std::string>();
            cfg.builder_n = c.at("n").get<int>();
        }
    }
    if (j.contains("mode")) cfg.mode = j.at("mode").get<std::string>();
    if (j.contains("gamma")) cfg.gamma = Rat::parse(j.at("gamma").get<std::string>());
    if (j.contains("k")) cfg.k = j.at("k").get<int>();
    if (j.contains("sizes")) cfg.sizes = j.at("sizes").get<std::vector<int>>();
    if (j.contains("trials")) cfg.trials = j.at("trials").get<int>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("marginal"))
        for (const auto& m : j.at("marginal")) cfg.marginal.push_back(Rat::parse(m.get<std::string>()));
    cfg.params.gamma = cfg.gamma;
    cfg.params.k = cfg.k;
    cfg.params.seed = cfg.seed;
    if (j.contains("params")) {
        const auto& p = j.at("params");
        if (p.contains("m")) cfg.params.m_override = p.at("m").get<std::int64_t>();
        if (p.contains("l")) cfg.params.l_override = p.at("l").get<std::int64_t>();
        if (p.contains("r")) cfg.params.r_override = Rat::parse(p.at("r").get<std::string>());
        if (p.contains("n0")) cfg.params.n0_override = p.at("n0").get<int>();
        if (p.contains("retry_cap")) cfg.params.retry_cap = p.at("retry_cap").get<int>();
    }
    if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
    return cfg;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    HypothesisClass cls;
    if (!config.class_file.empty())
        cls = class_from_json(load_json_file(config.class_file));
    else if (config.builder == "example1")
        cls = build_example1(config.builder_n);
    else if (config.builder == "example2")
        cls = build_example2(config.builder_n);
    else
        throw std::invalid_argument("unknown builder: " + config.builder);

    std::vector<Rat> marginal = config.marginal;
    if (marginal.empty())
        marginal.assign(static_cast<std::size_t>(cls.domain_size),
                        Rat(1, cls.domain_size));
    if (static_cast<int>(marginal.size()) != cls.domain_size)
        throw std::invalid_argument("marginal size does not match the domain");

    Json per_size = Json::array();
    std::ostringstream csv;
    csv << "n,trial,train_error,test_error\n";
    Rng master(config.seed);

    for (int n : config.sizes) {
        Json size_block;
        Json trials = Json::array();
        std::vector<double> tests;
        for (int trial = 0; trial < config.trials; ++trial) {
            Rng trial_rng = master.derive("trial").derive(static_cast<std::uint64_t>(trial));
            int target =
                static_cast<int>(trial_rng.below(static_cast<std::uint64_t>(cls.num_rows())));
            FiniteDistribution dist;
            for (int x = 0; x < cls.domain_size; ++x)
                dist.support.push_back({x, cls.value(target, x), marginal[static_cast<std::size_t>(x)]});
            dist.validate();
            Rng draw_rng = trial_rng.derive("draw");
            LabeledSample sample = dist.draw(n, draw_rng);
            PipelineParams params = config.params;
            params.seed = Rng::mix(config.seed ^ Rng::mix(static_cast<std::uint64_t>(trial) * 1315423911ULL +
                                                          static_cast<std::uint64_t>(n)));
            PipelineResult res;
            if (config.mode == "realizable")
                res = reg_realizable(sample, cls, params);
            else if (config.mode == "agnostic")
                res = reg_agnostic(sample, cls, params);
            else if (config.mode == "oig")
                res = realizable_oig_pipeline(sample, cls, params);
            else
                throw std::invalid_argument("unknown mode: " + config.mode);
            ListPredictor pred = [&](int x) { return res.hypothesis[static_cast<std::size_t>(x)]; };
            Rat test_err = population_error(pred, dist);
            tests.push_back(test_err.to_double());
            Json tj;
            tj["trial"] = trial;
            tj["target_row"] = target;
            tj["train_error"] = res.training_error.str();
            tj["test_error"] = test_err.str();
            tj["compression_size"] = res.record.size();
            trials.push_back(std::move(tj));
            csv << n << "," << trial << "," << res.training_error.to_double() << ","
                << test_err.to_double() << "\n";
        }
        double mean = 0;
        for (double t : tests) mean += t;
        mean /= static_cast<double>(tests.size());
        double var = 0;
        for (double t : tests) var += (t - mean) * (t - mean);
        var = tests.size() > 1 ? var / static_cast<double>(tests.size() - 1) : 0.0;
        double half = tests.size() > 1
                          ? 1.96 * std::sqrt(var / static_cast<double>(tests.size()))
                          : 0.0;
        size_block["n"] = n;
        size_block["mean_test_error"] = mean;
        size_block["half_width_95"] = half;
        size_block["trials"] = std::move(trials);
        per_size.push_back(std::move(size_block));
    }

    ExperimentReport rep;
    rep.json["config"] = config.raw.is_null() ? Json::object() : config.raw;
    rep.json["seed"] = config.seed;
    rep.json["mode"] = config.mode;
    rep.json["gamma"] = config.gamma.str();
    rep.json["k"] = config.k;
    rep.json["per_size"] = std::move(per_size);
    rep.csv = csv.str();
    return rep;
}

}  // namespace listreg

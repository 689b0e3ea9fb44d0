#include "listreg/learner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "listreg/dims.hpp"

namespace listreg {

// ---------------------------------------------------------------- thresholds

ThresholdSet ThresholdSet::build(const Rat& gamma, int k, const LearnerCaps& caps) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (gamma.num <= 0 || gamma >= Rat(1)) throw std::invalid_argument("gamma must be in (0,1)");
    ThresholdSet ts;
    ts.gamma = gamma;
    ts.k = k;
    std::int64_t steps = (Rat(1) / gamma).floor();
    for (std::int64_t i = 0; i <= steps; ++i) ts.grid.push_back(gamma * Rat(i));
    int g = static_cast<int>(ts.grid.size());
    if (k > g) return ts;  // no strictly increasing k-tuples exist
    std::vector<int> tup(static_cast<std::size_t>(k));
    auto rec = [&](auto&& self, int pos, int start) -> void {
        if (pos == k) {
            ts.tuples.push_back(tup);
            if (static_cast<std::int64_t>(ts.tuples.size()) > caps.max_thresholds)
                throw std::runtime_error("exceeds desk scale: threshold tuple cap");
            return;
        }
        for (int i = start; i < g; ++i) {
            tup[static_cast<std::size_t>(pos)] = i;
            self(self, pos + 1, i + 1);
        }
    };
    rec(rec, 0, 0);
    return ts;
}

std::vector<Rat> ThresholdSet::tuple_values(std::size_t t) const {
    std::vector<Rat> v;
    v.reserve(tuples[t].size());
    for (int idx : tuples[t]) v.push_back(grid[static_cast<std::size_t>(idx)]);
    return v;
}

std::int64_t ThresholdSet::scale_binom() const {
    std::int64_t n = (Rat(1) / gamma).floor();
    __int128 v = 1;
    for (int i = 0; i < k - 1; ++i) v = v * (n - i) / (i + 1);
    if (v <= 0 || v > INT64_MAX) throw std::overflow_error("scale binomial overflow");
    return static_cast<std::int64_t>(v);
}

int thr_operator(const Rat& y, const std::vector<Rat>& tau, const Rat& gamma) {
    int k = static_cast<int>(tau.size());
    Rat half = gamma / Rat(2);
    if (y <= tau[0] - half) return 0;
    for (int i = 1; i <= k - 1; ++i)
        if (tau[static_cast<std::size_t>(i - 1)] + half <= y &&
            y <= tau[static_cast<std::size_t>(i)] - half)
            return i;
    if (tau[static_cast<std::size_t>(k - 1)] + half <= y) return k;
    return kStarLabel;
}

int classifier_count(const Rat& a, const std::vector<Rat>& tau) {
    int c = 0;
    for (const auto& t : tau)
        if (a > t) ++c;
    return c;
}

Rat scaled_sum(const std::vector<int>& value_per_tuple, const ThresholdSet& ts) {
    if (value_per_tuple.size() != ts.count())
        throw std::invalid_argument("value map must cover every k-threshold");
    std::int64_t total = 0;
    for (int v : value_per_tuple) total += v;
    Rat raw = ts.gamma * Rat(total, ts.scale_binom());
    return rat_min(Rat(1), raw);
}

std::vector<int> separated_set(const Rat& a, const ThresholdSet& ts) {
    std::vector<int> out;
    Rat half = ts.gamma / Rat(2);
    for (std::size_t t = 0; t < ts.count(); ++t) {
        bool ok = true;
        for (int j = 0; j < ts.k; ++j)
            if ((ts.component(t, j) - a).abs() < half) {
                ok = false;
                break;
            }
        if (ok) out.push_back(static_cast<int>(t));
    }
    return out;
}

ThresholdClassInstance build_threshold_class(const HypothesisClass& cls, const Rat& gamma, int k,
                                             const LearnerCaps& caps) {
    if (cls.kind != ClassKind::Total)
        throw std::invalid_argument("threshold class requires a total base class");
    require_grid_compatible(gamma, cls.resolution);
    ThresholdClassInstance inst;
    inst.base = cls;
    inst.gamma = gamma;
    inst.k = k;
    inst.taus = ThresholdSet::build(gamma, k, caps);
    std::int64_t ext = static_cast<std::int64_t>(cls.domain_size) *
                       static_cast<std::int64_t>(inst.taus.count());
    if (ext > caps.max_extended_points)
        throw std::runtime_error("exceeds desk scale: extended domain cap");
    inst.partial.domain_size = static_cast<int>(ext);
    inst.partial.resolution = std::max(k, 1);
    inst.partial.kind = ClassKind::Partial;
    inst.partial.rows.reserve(cls.rows.size());
    for (int r = 0; r < cls.num_rows(); ++r) {
        std::vector<std::int64_t> row;
        row.reserve(static_cast<std::size_t>(ext));
        for (int x = 0; x < cls.domain_size; ++x) {
            Rat y = cls.value(r, x);
            for (std::size_t t = 0; t < inst.taus.count(); ++t) {
                int label = thr_operator(y, inst.taus.tuple_values(t), gamma);
                row.push_back(label == kStarLabel ? kStar : label);
            }
        }
        inst.partial.rows.push_back(std::move(row));
    }
    return inst;
}

std::vector<int> topk_aggregate(const std::vector<std::vector<int>>& lists, int k) {
    if (lists.empty()) throw std::invalid_argument("topk over no lists");
    std::map<int, int> freq;
    for (const auto& l : lists)
        for (int v : l) ++freq[v];
    std::vector<std::pair<int, int>> items(freq.begin(), freq.end());
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<int> out;
    for (std::size_t i = 0; i < items.size() && static_cast<int>(out.size()) < k; ++i)
        out.push_back(items[i].first);
    std::sort(out.begin(), out.end());
    return out;
}

// --------------------------------------------------------------- merge lists

namespace {

// achievable ĉ values for a fixed center c: indices are forced on the
// separated set, free elsewhere; free contributions enumerated exactly as a
// subset-sum over list values
void admit_for_center(const Rat& c, const std::vector<std::vector<int>>& J,
                      const ThresholdSet& ts, const Rat& third, std::set<Rat>& admitted) {
    Rat half = ts.gamma / Rat(2);
    std::int64_t base = 0;
    std::vector<const std::vector<int>*> free_lists;
    for (std::size_t t = 0; t < ts.count(); ++t) {
        bool separated = true;
        for (int j = 0; j < ts.k; ++j)
            if ((ts.component(t, j) - c).abs() < half) {
                separated = false;
                break;
            }
        if (separated) {
            int want = classifier_count(c, ts.tuple_values(t));
            if (!std::binary_search(J[t].begin(), J[t].end(), want)) return;  // inconsistent c
            base += want;
        } else {
            free_lists.push_back(&J[t]);
        }
    }
    std::int64_t max_free = 0;
    for (const auto* l : free_lists) max_free += *std::max_element(l->begin(), l->end());
    std::vector<bool> reach(static_cast<std::size_t>(max_free + 1), false);
    reach[0] = true;
    for (const auto* l : free_lists) {
        std::vector<bool> next(reach.size(), false);
        for (std::size_t s = 0; s < reach.size(); ++s) {
            if (!reach[s]) continue;
            for (int v : *l)
                if (s + static_cast<std::size_t>(v) < next.size())
                    next[s + static_cast<std::size_t>(v)] = true;
        }
        reach = std::move(next);
    }
    std::int64_t binom = ts.scale_binom();
    for (std::size_t s = 0; s < reach.size(); ++s) {
        if (!reach[s]) continue;
        Rat hat = rat_min(Rat(1), ts.gamma * Rat(base + static_cast<std::int64_t>(s), binom));
        if ((c - hat).abs() <= third) admitted.insert(hat);
    }
}

// optimal (min-max radius) partition of sorted points into at most k runs,
// each represented by one of its members
std::optional<std::vector<Rat>> interval_cover(const std::vector<Rat>& pts, int k,
                                               const Rat& radius) {
    int n = static_cast<int>(pts.size());
    if (n == 0) return std::vector<Rat>{};
    auto run_radius = [&](int lo, int hi, int& rep) {
        // best representative minimizes max distance to the run ends
        Rat best;
        rep = lo;
        for (int m = lo; m <= hi; ++m) {
            Rat r = rat_max(pts[static_cast<std::size_t>(m)] - pts[static_cast<std::size_t>(lo)],
                            pts[static_cast<std::size_t>(hi)] - pts[static_cast<std::size_t>(m)]);
            if (m == lo || r < best) {
                best = r;
                rep = m;
            }
        }
        return best;
    };
    // dp[i][c] = minimal achievable max radius covering pts[0..i] with c runs
    std::vector<std::vector<Rat>> dp(static_cast<std::size_t>(n),
                                     std::vector<Rat>(static_cast<std::size_t>(k + 1), Rat(2)));
    std::vector<std::vector<int>> cut(static_cast<std::size_t>(n),
                                      std::vector<int>(static_cast<std::size_t>(k + 1), -1));
    for (int i = 0; i < n; ++i) {
        for (int c = 1; c <= k; ++c) {
            for (int j = 0; j <= i; ++j) {
                Rat prev = j == 0 ? Rat(0) : dp[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(c - 1)];
                if (j > 0 && prev == Rat(2)) continue;
                int rep;
                Rat r = rat_max(prev, run_radius(j, i, rep));
                if (r < dp[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)]) {
                    dp[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] = r;
                    cut[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] = j;
                }
            }
        }
    }
    int best_c = -1;
    for (int c = 1; c <= k; ++c) {
        const Rat& v = dp[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(c)];
        if (v > radius) continue;
        if (best_c < 0 || v < dp[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(best_c)])
            best_c = c;
    }
    if (best_c < 0) return std::nullopt;
    std::vector<Rat> reps;
    int i = n - 1, c = best_c;
    while (i >= 0) {
        int j = cut[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
        int rep;
        run_radius(j, i, rep);
        reps.push_back(pts[static_cast<std::size_t>(rep)]);
        i = j - 1;
        --c;
    }
    std::sort(reps.begin(), reps.end());
    return reps;
}

}  // namespace

LabelList merge_lists(const std::vector<std::vector<int>>& J, const ThresholdSet& ts,
                      const Rat& r, MergeMode mode, const LearnerCaps& caps,
                      std::int64_t extra_lattice_den) {
    if (J.size() != ts.count()) throw std::invalid_argument("J must cover every k-threshold");
    for (const auto& l : J)
        if (l.empty()) throw std::invalid_argument("J value lists must be nonempty");
    Rat third = r / Rat(3);

    // candidate centers live on the lattice refining the gamma/2 grid, the
    // scaled-sum grid, and the caller's label grid
    std::int64_t den = checked_lcm((ts.gamma / Rat(2)).den,
                                   checked_lcm((ts.gamma / Rat(ts.scale_binom())).den,
                                               2 * extra_lattice_den));
    if (den > caps.max_candidates)
        throw std::runtime_error("exceeds desk scale: center lattice cap");

    std::set<Rat> admitted;
    if (mode == MergeMode::Candidate) {
        for (std::int64_t i = 0; i <= den; ++i)
            admit_for_center(Rat(i, den), J, ts, third, admitted);
    } else {
        __int128 combos = 1;
        for (const auto& l : J) {
            combos *= static_cast<std::int64_t>(l.size());
            if (combos > caps.max_indexing_functions)
                throw std::runtime_error("exceeds desk scale: indexing function cap");
        }
        std::vector<std::size_t> pos(ts.count(), 0);
        std::int64_t binom = ts.scale_binom();
        Rat half = ts.gamma / Rat(2);
        bool done = false;
        while (!done) {
            std::int64_t total = 0;
            for (std::size_t t = 0; t < ts.count(); ++t) total += J[t][pos[t]];
            Rat hat = rat_min(Rat(1), ts.gamma * Rat(total, binom));
            if (!admitted.count(hat)) {
                // a consistent center within r/3 of the scaled sum admits it
                std::int64_t lo = ((hat - third) * Rat(den)).floor();
                std::int64_t hi = ((hat + third) * Rat(den)).floor() + 1;
                lo = std::max<std::int64_t>(lo, 0);
                hi = std::min<std::int64_t>(hi, den);
                for (std::int64_t ci = lo; ci <= hi && !admitted.count(hat); ++ci) {
                    Rat c(ci, den);
                    if ((c - hat).abs() > third) continue;
                    bool ok = true;
                    for (std::size_t t = 0; t < ts.count() && ok; ++t) {
                        bool separated = true;
                        for (int j = 0; j < ts.k; ++j)
                            if ((ts.component(t, j) - c).abs() < half) {
                                separated = false;
                                break;
                            }
                        if (separated && J[t][pos[t]] != classifier_count(c, ts.tuple_values(t)))
                            ok = false;
                    }
                    if (ok) admitted.insert(hat);
                }
            }
            // mixed-radix increment
            done = true;
            for (std::size_t t = 0; t < ts.count(); ++t) {
                if (++pos[t] < J[t].size()) {
                    done = false;
                    break;
                }
                pos[t] = 0;
            }
        }
    }

    std::vector<Rat> pts(admitted.begin(), admitted.end());
    if (static_cast<int>(pts.size()) <= ts.k) return LabelList(pts);
    auto reps = interval_cover(pts, ts.k, r);
    if (!reps) throw std::runtime_error("cover violation: admitted set has no k-point r-cover");
    return LabelList(*reps);
}

// --------------------------------------------------------------------- games

namespace {

std::optional<std::vector<Rat>> solve_linear(std::vector<std::vector<Rat>> a,
                                             std::vector<Rat> b) {
    int n = static_cast<int>(a.size());
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int r = col; r < n; ++r)
            if (!a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)].is_zero()) {
                pivot = r;
                break;
            }
        if (pivot < 0) return std::nullopt;
        std::swap(a[static_cast<std::size_t>(col)], a[static_cast<std::size_t>(pivot)]);
        std::swap(b[static_cast<std::size_t>(col)], b[static_cast<std::size_t>(pivot)]);
        Rat inv = Rat(1) / a[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
        for (int c = col; c < n; ++c) a[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)] *= inv;
        b[static_cast<std::size_t>(col)] *= inv;
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            Rat f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)];
            if (f.is_zero()) continue;
            for (int c = col; c < n; ++c)
                a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -=
                    f * a[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)];
            b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(col)];
        }
    }
    return b;
}

struct EqualizerPair {
    std::vector<Rat> p;
    std::vector<Rat> q;
    Rat value;
};

// Solve the square subgame equalizer on (rows, cols) and verify global
// optimality certificates on the full matrix.
std::optional<EqualizerPair> try_supports(const std::vector<std::vector<int>>& m,
                                          const std::vector<int>& rows,
                                          const std::vector<int>& cols) {
    int s = static_cast<int>(rows.size());
    if (s == 0 || s != static_cast<int>(cols.size())) return std::nullopt;
    int R = static_cast<int>(m.size());
    int C = static_cast<int>(m[0].size());

    // unknowns p_0..p_{s-1}, v
    std::vector<std::vector<Rat>> a(static_cast<std::size_t>(s + 1),
                                    std::vector<Rat>(static_cast<std::size_t>(s + 1), Rat(0)));
    std::vector<Rat> b(static_cast<std::size_t>(s + 1), Rat(0));
    for (int j = 0; j < s; ++j) {
        for (int i = 0; i < s; ++i)
            a[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
                Rat(m[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])]
                     [static_cast<std::size_t>(cols[static_cast<std::size_t>(j)])]);
        a[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)] = Rat(-1);
    }
    for (int i = 0; i < s; ++i) a[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)] = Rat(1);
    b[static_cast<std::size_t>(s)] = Rat(1);
    auto sol_p = solve_linear(a, b);
    if (!sol_p) return std::nullopt;
    Rat v = (*sol_p)[static_cast<std::size_t>(s)];
    for (int i = 0; i < s; ++i)
        if ((*sol_p)[static_cast<std::size_t>(i)] < Rat(0)) return std::nullopt;

    // dual side
    std::vector<std::vector<Rat>> aq(static_cast<std::size_t>(s + 1),
                                     std::vector<Rat>(static_cast<std::size_t>(s + 1), Rat(0)));
    std::vector<Rat> bq(static_cast<std::size_t>(s + 1), Rat(0));
    for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j)
            aq[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                Rat(m[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])]
                     [static_cast<std::size_t>(cols[static_cast<std::size_t>(j)])]);
        aq[static_cast<std::size_t>(i)][static_cast<std::size_t>(s)] = Rat(-1);
    }
    for (int j = 0; j < s; ++j) aq[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)] = Rat(1);
    bq[static_cast<std::size_t>(s)] = Rat(1);
    auto sol_q = solve_linear(aq, bq);
    if (!sol_q) return std::nullopt;
    if ((*sol_q)[static_cast<std::size_t>(s)] != v) return std::nullopt;
    for (int j = 0; j < s; ++j)
        if ((*sol_q)[static_cast<std::size_t>(j)] < Rat(0)) return std::nullopt;

    EqualizerPair pair;
    pair.p.assign(static_cast<std::size_t>(R), Rat(0));
    pair.q.assign(static_cast<std::size_t>(C), Rat(0));
    for (int i = 0; i < s; ++i)
        pair.p[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])] =
            (*sol_p)[static_cast<std::size_t>(i)];
    for (int j = 0; j < s; ++j)
        pair.q[static_cast<std::size_t>(cols[static_cast<std::size_t>(j)])] =
            (*sol_q)[static_cast<std::size_t>(j)];
    pair.value = v;

    // global certificates: p pays at most v against every column, q collects
    // at least v against every row
    for (int j = 0; j < C; ++j) {
        Rat col(0);
        for (int i = 0; i < R; ++i)
            if (m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
                col += pair.p[static_cast<std::size_t>(i)];
        if (col > v) return std::nullopt;
    }
    for (int i = 0; i < R; ++i) {
        Rat row(0);
        for (int j = 0; j < C; ++j)
            if (m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
                row += pair.q[static_cast<std::size_t>(j)];
        if (row < v) return std::nullopt;
    }
    return pair;
}

Rat certified_value(const std::vector<std::vector<int>>& m, const std::vector<Rat>& p) {
    int C = static_cast<int>(m[0].size());
    Rat best(0);
    for (int j = 0; j < C; ++j) {
        Rat col(0);
        for (std::size_t i = 0; i < m.size(); ++i)
            if (m[i][static_cast<std::size_t>(j)]) col += p[i];
        if (col > best) best = col;
    }
    return best;
}

Rat dual_value(const std::vector<std::vector<int>>& m, const std::vector<Rat>& q) {
    Rat best(2);
    for (std::size_t i = 0; i < m.size(); ++i) {
        Rat row(0);
        for (std::size_t j = 0; j < q.size(); ++j)
            if (m[i][j]) row += q[j];
        if (row < best) best = row;
    }
    return best;
}

std::vector<Rat> exactify(const std::vector<double>& w) {
    constexpr std::int64_t kScale = std::int64_t{1} << 30;
    double total = 0;
    for (double x : w) total += std::max(x, 0.0);
    std::vector<std::int64_t> nums(w.size(), 0);
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        double frac = total > 0 ? std::max(w[i], 0.0) / total : 0.0;
        nums[i] = static_cast<std::int64_t>(std::llround(frac * static_cast<double>(kScale)));
        sum += nums[i];
    }
    if (sum == 0) {
        nums.assign(w.size(), 1);
        sum = static_cast<std::int64_t>(w.size());
    }
    std::vector<Rat> p(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) p[i] = Rat(nums[i], sum);
    return p;
}

}  // namespace

GameSolution solve_game(const std::vector<std::vector<int>>& payoff, const Rat& target,
                        const Rat& tol, int max_rounds) {
    int R = static_cast<int>(payoff.size());
    if (R == 0) throw std::invalid_argument("game with no rows");
    int C = static_cast<int>(payoff[0].size());
    GameSolution best;
    best.value = Rat(2);
    best.lower_bound = Rat(0);

    auto consider = [&](const std::vector<Rat>& p) {
        Rat v = certified_value(payoff, p);
        if (v < best.value) {
            best.value = v;
            best.strategy = p;
        }
    };

    if (C == 0) {
        best.strategy.assign(static_cast<std::size_t>(R), Rat(0));
        best.strategy[0] = Rat(1);
        best.value = Rat(0);
        best.meets_target = true;
        return best;
    }

    // point masses give immediate certificates (and settle all-zero rows)
    for (int i = 0; i < R; ++i) {
        std::vector<Rat> p(static_cast<std::size_t>(R), Rat(0));
        p[static_cast<std::size_t>(i)] = Rat(1);
        consider(p);
        if (best.value.is_zero()) break;
    }
    if (best.value < target) {
        best.meets_target = true;
        return best;
    }

    std::vector<double> w(static_cast<std::size_t>(R), 1.0);
    std::vector<double> acc(static_cast<std::size_t>(R), 0.0);
    std::vector<double> colcount(static_cast<std::size_t>(C), 0.0);
    double lnR = std::log(std::max(R, 2));

    for (int t = 1; t <= max_rounds; ++t) {
        best.rounds = t;
        double total = 0;
        for (double x : w) total += x;
        // column best response to the current mixed row
        int jstar = 0;
        double bestcol = -1;
        for (int j = 0; j < C; ++j) {
            double col = 0;
            for (int i = 0; i < R; ++i)
                if (payoff[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])
                    col += w[static_cast<std::size_t>(i)];
            if (col > bestcol + 1e-15) {
                bestcol = col;
                jstar = j;
            }
        }
        colcount[static_cast<std::size_t>(jstar)] += 1;
        double eta = std::min(0.5, std::sqrt(lnR / t));
        for (int i = 0; i < R; ++i) {
            acc[static_cast<std::size_t>(i)] += w[static_cast<std::size_t>(i)] / total;
            if (payoff[static_cast<std::size_t>(i)][static_cast<std::size_t>(jstar)])
                w[static_cast<std::size_t>(i)] *= std::exp(-eta);
        }
        if (t % 512 == 0) {
            double wmax = 0;
            for (double x : w) wmax = std::max(wmax, x);
            if (wmax < 1e-200)
                for (double& x : w) x *= 1e200;
        }

        if (t % 128 == 0 || t == max_rounds) {
            consider(exactify(acc));
            consider(exactify(w));
            Rat lower = dual_value(payoff, exactify(colcount));
            if (lower > best.lower_bound) {
                best.lower_bound = lower;
                best.column_mix = exactify(colcount);
            }
            if (best.value < target) {
                best.meets_target = true;
                return best;
            }
            // polish: square supports harvested from the averaged play
            std::vector<int> rows_by_weight(static_cast<std::size_t>(R));
            for (int i = 0; i < R; ++i) rows_by_weight[static_cast<std::size_t>(i)] = i;
            std::stable_sort(rows_by_weight.begin(), rows_by_weight.end(), [&](int a, int b) {
                return acc[static_cast<std::size_t>(a)] > acc[static_cast<std::size_t>(b)];
            });
            std::vector<int> cols_by_weight(static_cast<std::size_t>(C));
            for (int j = 0; j < C; ++j) cols_by_weight[static_cast<std::size_t>(j)] = j;
            std::stable_sort(cols_by_weight.begin(), cols_by_weight.end(), [&](int a, int b) {
                return colcount[static_cast<std::size_t>(a)] > colcount[static_cast<std::size_t>(b)];
            });
            auto accept = [&](const EqualizerPair& pair) {
                best.strategy = pair.p;
                best.value = pair.value;
                best.lower_bound = pair.value;
                best.column_mix = pair.q;
                best.meets_target = best.value < target + tol;
            };
            int smax = std::min({R, C, 8});
            bool polished = false;
            for (int s = 1; s <= smax && !polished; ++s) {
                std::vector<int> rs(rows_by_weight.begin(), rows_by_weight.begin() + s);
                std::vector<int> csel(cols_by_weight.begin(), cols_by_weight.begin() + s);
                std::sort(rs.begin(), rs.end());
                std::sort(csel.begin(), csel.end());
                auto pair = try_supports(payoff, rs, csel);
                if (pair) {
                    accept(*pair);
                    polished = true;
                }
            }
            if (!polished && (t == max_rounds || t % 8192 == 0)) {
                // deep polish: every square pair within the heaviest supports
                int pool = std::min({std::max(R, C), 8});
                std::vector<int> rpool(rows_by_weight.begin(),
                                       rows_by_weight.begin() + std::min(R, pool));
                std::vector<int> cpool(cols_by_weight.begin(),
                                       cols_by_weight.begin() + std::min(C, pool));
                int ssmax = static_cast<int>(std::min(rpool.size(), cpool.size()));
                for (int s = 1; s <= ssmax && !polished; ++s) {
                    std::vector<int> rsel(static_cast<std::size_t>(s)),
                        cs(static_cast<std::size_t>(s));
                    auto rec_c = [&](auto&& self, int pos, int start) -> bool {
                        if (pos == s) {
                            std::vector<int> a = rsel, b = cs;
                            std::sort(a.begin(), a.end());
                            std::sort(b.begin(), b.end());
                            auto pair = try_supports(payoff, a, b);
                            if (pair) {
                                accept(*pair);
                                return true;
                            }
                            return false;
                        }
                        for (int j = start; j < static_cast<int>(cpool.size()); ++j) {
                            cs[static_cast<std::size_t>(pos)] = cpool[static_cast<std::size_t>(j)];
                            if (self(self, pos + 1, j + 1)) return true;
                        }
                        return false;
                    };
                    auto rec_r = [&](auto&& self, int pos, int start) -> bool {
                        if (pos == s) return rec_c(rec_c, 0, 0);
                        for (int i = start; i < static_cast<int>(rpool.size()); ++i) {
                            rsel[static_cast<std::size_t>(pos)] = rpool[static_cast<std::size_t>(i)];
                            if (self(self, pos + 1, i + 1)) return true;
                        }
                        return false;
                    };
                    polished = rec_r(rec_r, 0, 0);
                }
            }
            if (polished) return best;
            if (best.value - best.lower_bound <= tol) {
                best.meets_target = best.value < target + tol;
                return best;
            }
        }
    }
    best.meets_target = best.value < target + tol;
    return best;
}

Rat exact_game_value(const std::vector<std::vector<int>>& payoff) {
    int R = static_cast<int>(payoff.size());
    if (R == 0) throw std::invalid_argument("game with no rows");
    int C = static_cast<int>(payoff[0].size());
    if (C == 0) return Rat(0);
    for (int s = 1; s <= std::min(R, C); ++s) {
        std::vector<int> rows(static_cast<std::size_t>(s)), cols(static_cast<std::size_t>(s));
        std::optional<Rat> found;
        auto rec_cols = [&](auto&& self, int pos, int start) -> bool {
            if (pos == s) {
                auto pair = try_supports(payoff, rows, cols);
                if (pair) {
                    found = pair->value;
                    return true;
                }
                return false;
            }
            for (int j = start; j < C; ++j) {
                cols[static_cast<std::size_t>(pos)] = j;
                if (self(self, pos + 1, j + 1)) return true;
            }
            return false;
        };
        auto rec_rows = [&](auto&& self, int pos, int start) -> bool {
            if (pos == s) return rec_cols(rec_cols, 0, 0);
            for (int i = start; i < R; ++i) {
                rows[static_cast<std::size_t>(pos)] = i;
                if (self(self, pos + 1, i + 1)) return true;
            }
            return false;
        };
        if (rec_rows(rec_rows, 0, 0)) return *found;
    }
    throw std::logic_error("no square equalizer pair found; matrix not 0/1?");
}

// ------------------------------------------------------------- weak learners

namespace {

struct OrientedProjection {
    HypothesisClass proj;  // deduplicated projection on the chosen points
    OneInclusionGraph graph;
    KListOrientation sigma;
};

// orientation results keyed by projected class content (shared across weak
// learner invocations that induce the same projected class)
struct OrientCache {
    Rat gamma;
    int k = 1;
    OigCaps caps;
    std::map<std::vector<std::int64_t>, OrientedProjection> store;

    const OrientedProjection& get(const HypothesisClass& proj) {
        std::vector<std::int64_t> key;
        key.push_back(proj.domain_size);
        key.push_back(proj.resolution);
        for (const auto& row : proj.rows) key.insert(key.end(), row.begin(), row.end());
        auto it = store.find(key);
        if (it != store.end()) return it->second;
        OrientedProjection op;
        op.proj = proj;
        op.graph = build_oig(proj);
        op.sigma = min_max_k_outdeg(op.graph, gamma, k, OrientMode::Exact, caps).sigma;
        return store.emplace(std::move(key), std::move(op)).first->second;
    }
};

// Forced-edge shortcut: an edge whose value set is fully gamma-coverable by a
// k-subset keeps exactly one candidate after dominance pruning, so every
// optimal orientation assigns it; its list is computable from the edge alone.
std::optional<std::vector<std::int64_t>> forced_edge_list(std::vector<std::int64_t> values,
                                                          std::int64_t den, const Rat& gamma,
                                                          int k) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    int m = static_cast<int>(values.size());
    int pick = std::min(k, m);
    auto covered = [&](std::int64_t a, std::int64_t b) {
        std::int64_t d = a > b ? a - b : b - a;
        return static_cast<__int128>(d) * gamma.den <= static_cast<__int128>(gamma.num) * den;
    };
    // first size-`pick` subset in index order with full coverage (matches the
    // orientation solver's candidate ordering and dedup rule)
    std::vector<int> subset(static_cast<std::size_t>(pick));
    std::optional<std::vector<std::int64_t>> found;
    auto rec = [&](auto&& self, int pos, int start) -> bool {
        if (pos == pick) {
            for (int v = 0; v < m; ++v) {
                bool ok = false;
                for (int i = 0; i < pick; ++i)
                    if (covered(values[static_cast<std::size_t>(v)],
                                values[static_cast<std::size_t>(subset[static_cast<std::size_t>(i)])])) {
                        ok = true;
                        break;
                    }
                if (!ok) return false;
            }
            std::vector<std::int64_t> out;
            for (int i = 0; i < pick; ++i)
                out.push_back(values[static_cast<std::size_t>(subset[static_cast<std::size_t>(i)])]);
            found = std::move(out);
            return true;
        }
        for (int i = start; i < m; ++i) {
            subset[static_cast<std::size_t>(pos)] = i;
            if (self(self, pos + 1, i + 1)) return true;
        }
        return false;
    };
    rec(rec, 0, 0);
    return found;
}

std::vector<int> oriented_labels(const OrientedProjection& op, int qpos,
                                 const std::vector<std::pair<int, std::int64_t>>& constraints) {
    // constraints: (position, value) for positions other than qpos
    for (std::size_t v = 0; v < op.graph.vertices.size(); ++v) {
        bool match = true;
        for (const auto& [pos, val] : constraints) {
            if (pos == qpos) continue;
            if (op.graph.vertices[v][static_cast<std::size_t>(pos)] != val) {
                match = false;
                break;
            }
        }
        if (match) {
            int e = op.graph.edge_of[v][static_cast<std::size_t>(qpos)];
            std::set<std::int64_t> labels;
            for (int u : op.sigma[static_cast<std::size_t>(e)])
                labels.insert(op.graph.vertices[static_cast<std::size_t>(u)][static_cast<std::size_t>(qpos)]);
            std::vector<int> out;
            for (auto l : labels) out.push_back(static_cast<int>(l));
            return out;
        }
    }
    return {};  // no vertex consistent with the constraints
}

std::vector<int> weak_partial_core(const ThresholdClassInstance& inst,
                                   const std::vector<std::pair<int, int>>& sample, int query,
                                   const LearnerCaps& caps, OrientCache* cache) {
    std::vector<int> fallback;
    for (int b = 0; b < inst.k; ++b) fallback.push_back(b);

    std::set<int> point_set{query};
    std::map<int, int> labels;
    for (const auto& [e, y] : sample) {
        point_set.insert(e);
        auto it = labels.find(e);
        if (it != labels.end() && it->second != y)
            throw std::invalid_argument("conflicting labels in weak learner sample");
        labels[e] = y;
    }
    std::vector<int> points(point_set.begin(), point_set.end());
    int qpos = static_cast<int>(std::lower_bound(points.begin(), points.end(), query) -
                                points.begin());

    // total completions: star-free projections of the partial class
    HypothesisClass proj;
    proj.domain_size = static_cast<int>(points.size());
    proj.resolution = std::max(inst.k, 1);
    proj.kind = ClassKind::Total;
    std::set<std::vector<std::int64_t>> seen;
    for (const auto& row : inst.partial.rows) {
        std::vector<std::int64_t> p;
        p.reserve(points.size());
        bool ok = true;
        for (int pt : points) {
            std::int64_t e = row[static_cast<std::size_t>(pt)];
            if (e == kStar) {
                ok = false;
                break;
            }
            p.push_back(e);
        }
        if (ok && seen.insert(p).second) proj.rows.push_back(std::move(p));
    }
    if (proj.rows.empty()) return fallback;

    std::vector<std::pair<int, std::int64_t>> constraints;
    for (const auto& [e, y] : labels) {
        int pos = static_cast<int>(std::lower_bound(points.begin(), points.end(), e) -
                                   points.begin());
        constraints.emplace_back(pos, y);
    }

    // the edge through the sample in the query direction
    std::vector<std::int64_t> edge_values;
    for (const auto& row : proj.rows) {
        bool match = true;
        for (const auto& [pos, val] : constraints) {
            if (pos == qpos) continue;
            if (row[static_cast<std::size_t>(pos)] != val) {
                match = false;
                break;
            }
        }
        if (match) edge_values.push_back(row[static_cast<std::size_t>(qpos)]);
    }
    if (edge_values.empty()) return fallback;
    if (auto forced = forced_edge_list(edge_values, proj.resolution, Rat(0), inst.k)) {
        std::vector<int> out;
        for (auto v : *forced) out.push_back(static_cast<int>(v));
        return out;
    }

    OrientCache local{Rat(0), inst.k, caps.oig, {}};
    OrientCache& oc = cache ? *cache : local;
    const OrientedProjection& op = oc.get(proj);
    std::vector<int> out = oriented_labels(op, qpos, constraints);
    if (out.empty()) return fallback;
    return out;
}

LabelList weak_real_core(const HypothesisClass& cls, const LabeledSample& sample, int query,
                         const Rat& gamma, int k, const LearnerCaps& caps, OrientCache* cache) {
    std::set<int> point_set{query};
    std::map<int, Rat> labels;
    for (const auto& [x, y] : sample.pairs) {
        point_set.insert(x);
        auto it = labels.find(x);
        if (it != labels.end() && it->second != y)
            throw std::invalid_argument("unrealizable sample: conflicting labels");
        labels[x] = y;
    }
    std::vector<int> points(point_set.begin(), point_set.end());
    RestrictedClass proj = restrict(cls, points);
    int qpos = static_cast<int>(std::lower_bound(points.begin(), points.end(), query) -
                                points.begin());

    // realizability of the full sample within the projection
    bool realizable = false;
    for (const auto& row : proj.cls.rows) {
        bool ok = true;
        for (const auto& [x, y] : labels) {
            int pos = static_cast<int>(std::lower_bound(points.begin(), points.end(), x) -
                                       points.begin());
            if (Rat(row[static_cast<std::size_t>(pos)], proj.cls.resolution) != y) {
                ok = false;
                break;
            }
        }
        if (ok) { realizable = true; break; }
    }
    if (!realizable) throw std::invalid_argument("unrealizable sample for weak learner");

    std::vector<std::pair<int, std::int64_t>> constraints;
    for (const auto& [x, y] : labels) {
        int pos = static_cast<int>(std::lower_bound(points.begin(), points.end(), x) -
                                   points.begin());
        constraints.emplace_back(pos, (y * Rat(proj.cls.resolution)).num);
    }

    std::vector<std::int64_t> edge_values;
    for (const auto& row : proj.cls.rows) {
        bool match = true;
        for (const auto& [pos, val] : constraints) {
            if (pos == qpos) continue;
            if (row[static_cast<std::size_t>(pos)] != val) {
                match = false;
                break;
            }
        }
        if (match) edge_values.push_back(row[static_cast<std::size_t>(qpos)]);
    }
    if (auto forced = forced_edge_list(edge_values, proj.cls.resolution, gamma, k)) {
        std::vector<Rat> vals;
        for (auto v : *forced) vals.emplace_back(v, proj.cls.resolution);
        return LabelList(vals);
    }

    OrientCache local{gamma, k, caps.oig, {}};
    OrientCache& oc = cache ? *cache : local;
    const OrientedProjection& op = oc.get(proj.cls);
    std::vector<int> raw = oriented_labels(op, qpos, constraints);
    std::vector<Rat> vals;
    for (int v : raw) vals.emplace_back(v, proj.cls.resolution);
    return LabelList(vals);
}

}  // namespace

std::vector<int> weak_learner_partial(const ThresholdClassInstance& inst,
                                      const std::vector<std::pair<int, int>>& sample, int query,
                                      const LearnerCaps& caps) {
    return weak_partial_core(inst, sample, query, caps, nullptr);
}

LabelList weak_learner_real(const HypothesisClass& cls, const LabeledSample& sample, int query,
                            const Rat& gamma, int k, const LearnerCaps& caps) {
    return weak_real_core(cls, sample, query, gamma, k, caps, nullptr);
}

// ------------------------------------------------------------------ pipelines

std::int64_t CompressionRecord::example_count() const {
    std::int64_t total = 0;
    for (const auto& sub : subsequences)
        for (const auto& e : sub) total += e.multiplicity;
    return total;
}

std::int64_t CompressionRecord::side_bits() const {
    // k * ceil(log2(1/gamma)) bits per recorded threshold
    std::int64_t per = 0;
    {
        std::int64_t b = 0;
        __int128 pow = 1;
        while (pow * gamma.num < gamma.den) {
            pow *= 2;
            ++b;
        }
        per = static_cast<std::int64_t>(k) * b;
    }
    std::int64_t total = 0;
    for (const auto& sub : subsequences)
        for (const auto& e : sub)
            if (e.tau_index >= 0) total += e.multiplicity * per;
    return total;
}

namespace {

struct Column {
    int ext = 0;     // extended point (threshold pipelines) or domain point (oig)
    int label = 0;   // discrete label, or unused for oig
    Rat y;           // base label
    int x = 0;       // base domain point
    int tau = -1;
    std::int64_t weight = 1;
};

struct PoolRow {
    std::vector<std::pair<int, std::int64_t>> draws;  // (column index, multiplicity)
};

PoolRow draw_pool_row(const std::vector<Column>& cols, const std::vector<Rat>& weights,
                      std::int64_t m, Rng& rng) {
    // exact inverse-CDF draws on the lcm lattice of the weights
    std::int64_t common = 1;
    for (const auto& w : weights) common = checked_lcm(common, w.den);
    std::vector<std::int64_t> cum(cols.size());
    std::int64_t acc = 0;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        acc += weights[i].num * (common / weights[i].den);
        cum[i] = acc;
    }
    std::map<int, std::int64_t> counts;
    for (std::int64_t t = 0; t < m; ++t) {
        std::int64_t r = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(acc)));
        int idx = static_cast<int>(std::upper_bound(cum.begin(), cum.end(), r) - cum.begin());
        ++counts[idx];
    }
    PoolRow row;
    for (const auto& [i, c] : counts) row.draws.emplace_back(i, c);
    return row;
}

std::vector<Rat> uniform_column_weights(const std::vector<Column>& cols) {
    std::int64_t total = 0;
    for (const auto& c : cols) total += c.weight;
    std::vector<Rat> w;
    w.reserve(cols.size());
    for (const auto& c : cols) w.push_back(Rat(c.weight, total));
    return w;
}

int draw_from_strategy(const std::vector<Rat>& strategy, Rng& rng) {
    std::int64_t common = 1;
    for (const auto& p : strategy) common = checked_lcm(common, p.den);
    std::int64_t total = 0;
    std::vector<std::int64_t> cum(strategy.size());
    for (std::size_t i = 0; i < strategy.size(); ++i) {
        total += strategy[i].num * (common / strategy[i].den);
        cum[i] = total;
    }
    std::int64_t r = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(total)));
    return static_cast<int>(std::upper_bound(cum.begin(), cum.end(), r) - cum.begin());
}

}  // namespace

std::vector<int> select_subsequences(const std::vector<Rat>& strategy, std::int64_t l,
                                     const Rng& seed_root, int retry_cap,
                                     const std::function<bool(const std::vector<int>&)>& verify,
                                     int* attempts_out) {
    std::vector<int> selected;
    for (int attempt = 0; attempt < retry_cap; ++attempt) {
        Rng r = seed_root.derive(static_cast<std::uint64_t>(attempt));
        selected.clear();
        for (std::int64_t i = 0; i < l; ++i) selected.push_back(draw_from_strategy(strategy, r));
        if (verify(selected)) {
            if (attempts_out) *attempts_out = attempt + 1;
            return selected;
        }
    }
    throw std::runtime_error("subsequence selection failed verification after " +
                             std::to_string(retry_cap) + " attempts");
}

namespace {

struct ThresholdPipelineState {
    ThresholdClassInstance inst;
    std::vector<Column> cols;
    OrientCache cache;
    // memoized weak predictions per (registered support, extended query)
    std::vector<std::vector<std::pair<int, int>>> supports;  // (ext, label) sorted
    std::map<std::vector<std::pair<int, int>>, int> support_ids;
    std::vector<std::map<int, std::vector<int>>> memo;
    LearnerCaps caps;

    int register_support(std::vector<std::pair<int, int>> s) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        auto it = support_ids.find(s);
        if (it != support_ids.end()) return it->second;
        int id = static_cast<int>(supports.size());
        support_ids.emplace(s, id);
        supports.push_back(std::move(s));
        memo.emplace_back();
        return id;
    }

    const std::vector<int>& predict(int support_id, int query) {
        auto& table = memo[static_cast<std::size_t>(support_id)];
        auto it = table.find(query);
        if (it != table.end()) return it->second;
        auto pred = weak_partial_core(inst, supports[static_cast<std::size_t>(support_id)], query,
                                      caps, &cache);
        return table.emplace(query, std::move(pred)).first->second;
    }
};

Json game_report(const GameSolution& sol, int pool_size) {
    Json g;
    g["value"] = sol.value.str();
    g["lower_bound"] = sol.lower_bound.str();
    g["rounds"] = sol.rounds;
    g["pool_rows"] = pool_size;
    return g;
}

Json compression_report(const CompressionRecord& rec, std::size_t n) {
    Json c;
    c["examples"] = rec.example_count();
    c["side_bits"] = rec.side_bits();
    c["size"] = rec.size();
    c["within_half_n"] = rec.size() * 2 <= static_cast<std::int64_t>(n);
    return c;
}

}  // namespace

PipelineResult reg_realizable(const LabeledSample& sample, const HypothesisClass& cls,
                              const PipelineParams& params, const LearnerCaps& caps) {
    if (sample.pairs.empty()) throw std::invalid_argument("empty sample");
    if (!realizing_row(cls, sample))
        throw std::invalid_argument("sample not realizable by the class");
    const Rat& gamma = params.gamma;
    int k = params.k;

    ThresholdPipelineState st;
    st.caps = caps;
    st.inst = build_threshold_class(cls, gamma, k, caps);
    st.cache = OrientCache{Rat(0), k, caps.oig, {}};
    const ThresholdSet& ts = st.inst.taus;

    // distinct base points with labels and multiplicities
    std::map<int, std::pair<Rat, std::int64_t>> base;
    for (const auto& [x, y] : sample.pairs) {
        auto it = base.find(x);
        if (it == base.end())
            base[x] = {y, 1};
        else
            ++it->second.second;
    }
    std::int64_t n_prime = 0;
    for (const auto& [x, info] : base) {
        for (std::size_t t = 0; t < ts.count(); ++t) {
            int label = thr_operator(info.first, ts.tuple_values(t), gamma);
            if (label == kStarLabel) continue;
            Column c;
            c.ext = st.inst.extended_point(x, static_cast<int>(t));
            c.label = label;
            c.y = info.first;
            c.x = x;
            c.tau = static_cast<int>(t);
            c.weight = info.second;
            st.cols.push_back(c);
            n_prime += info.second;
        }
    }
    if (st.cols.empty()) throw std::runtime_error("every threshold label fell in a star band");

    std::int64_t m_eff;
    bool m_overridden = params.m_override.has_value();
    if (m_overridden) {
        m_eff = *params.m_override;
    } else {
        int d = std::max(fat_dim(cls, gamma / Rat(2), k).dimension, 1);
        double kk = 1;
        for (int i = 0; i < 5; ++i) kk *= k;
        m_eff = static_cast<std::int64_t>(
            std::ceil(960.0 * kk * std::log(static_cast<double>(k + 1)) * d *
                      params.constant_scale));
        m_eff = std::max<std::int64_t>(m_eff, 1);
    }
    std::int64_t l_eff = params.l_override.value_or(static_cast<std::int64_t>(
        std::ceil(6.0 * (k + 1) * std::log(2.0 * static_cast<double>(n_prime)) *
                  params.constant_scale)));
    l_eff = std::max<std::int64_t>(l_eff, 1);
    Rat radius = params.r_override.value_or(gamma * Rat(6 * k + 3));
    Rat target(1, 2 * (k + 1));

    auto weights = uniform_column_weights(st.cols);
    Rng pool_rng = Rng(params.seed).derive("pool");

    std::vector<PoolRow> pool;
    std::vector<int> pool_support;  // support id per pool row
    std::vector<std::vector<int>> payoff;
    auto add_row = [&](PoolRow row) {
        std::vector<std::pair<int, int>> sup;
        for (const auto& [ci, mult] : row.draws) {
            (void)mult;
            sup.emplace_back(st.cols[static_cast<std::size_t>(ci)].ext,
                             st.cols[static_cast<std::size_t>(ci)].label);
        }
        int sid = st.register_support(std::move(sup));
        pool.push_back(std::move(row));
        pool_support.push_back(sid);
        std::vector<int> pay(st.cols.size(), 0);
        for (std::size_t j = 0; j < st.cols.size(); ++j) {
            const auto& pred = st.predict(sid, st.cols[j].ext);
            pay[j] = std::binary_search(pred.begin(), pred.end(), st.cols[j].label) ? 0 : 1;
        }
        payoff.push_back(std::move(pay));
    };

    for (int b = 0; b < params.pool_batch; ++b) {
        Rng r = pool_rng.derive(static_cast<std::uint64_t>(b));
        add_row(draw_pool_row(st.cols, weights, m_eff, r));
    }

    GameSolution sol;
    bool solved = false;
    for (int round = 0; round <= params.pool_growth_rounds; ++round) {
        sol = solve_game(payoff, target, Rat(1, 1000000), params.game_max_rounds);
        if (sol.value < target) {
            solved = true;
            break;
        }
        if (round == params.pool_growth_rounds) break;
        // grow the pool against the adversarial column mix
        std::vector<Rat> q = sol.column_mix;
        if (q.empty() || std::all_of(q.begin(), q.end(), [](const Rat& x) { return x.is_zero(); }))
            q = weights;
        for (int b = 0; b < params.pool_batch; ++b) {
            Rng r = pool_rng.derive("grow").derive(static_cast<std::uint64_t>(round * 1000 + b));
            add_row(draw_pool_row(st.cols, q, m_eff, r));
        }
    }
    if (!solved)
        throw std::runtime_error("game value stayed at " + sol.value.str() +
                                 " >= 1/(2(k+1)); weak learner pool exhausted");

    // select l subsequences i.i.d. from the certified mix and verify the
    // simultaneous containment condition on every training column
    int attempts = 0;
    auto verify = [&](const std::vector<int>& rows) {
        for (const auto& col : st.cols) {
            std::vector<std::vector<int>> preds;
            preds.reserve(rows.size());
            for (int rowi : rows)
                preds.push_back(st.predict(pool_support[static_cast<std::size_t>(rowi)], col.ext));
            auto agg = topk_aggregate(preds, k);
            if (!std::binary_search(agg.begin(), agg.end(), col.label)) return false;
        }
        return true;
    };
    std::vector<int> selected = select_subsequences(
        sol.strategy, l_eff, Rng(params.seed).derive("select"), params.retry_cap, verify,
        &attempts);

    // compression record: selected subsequences with their thresholds
    PipelineResult res;
    res.record.mode = "realizable";
    res.record.gamma = gamma;
    res.record.k = k;
    res.record.radius = radius;
    res.record.resolution = cls.resolution;
    for (int rowi : selected) {
        std::vector<CompressionEntry> entries;
        for (const auto& [ci, mult] : pool[static_cast<std::size_t>(rowi)].draws) {
            const Column& c = st.cols[static_cast<std::size_t>(ci)];
            CompressionEntry e;
            e.x = c.x;
            e.y_num = (c.y * Rat(cls.resolution)).num;
            e.tau_index = c.tau;
            e.multiplicity = mult;
            entries.push_back(e);
        }
        res.record.subsequences.push_back(std::move(entries));
    }

    // the hypothesis is reconstructed from the record alone (this is the
    // reconstruction map; the pipeline output and rho(kappa(S)) coincide by
    // construction)
    res.hypothesis = reconstruct_hypothesis(res.record, cls, caps);
    ListPredictor pred = [&](int x) { return res.hypothesis[static_cast<std::size_t>(x)]; };
    res.training_error = empirical_error(pred, sample);

    Json rep;
    rep["mode"] = "realizable";
    rep["constants"] = Json{{"gamma", gamma.str()},
                            {"k", k},
                            {"m", m_eff},
                            {"m_overridden", m_overridden},
                            {"l", l_eff},
                            {"l_overridden", params.l_override.has_value()},
                            {"r", radius.str()},
                            {"r_overridden", params.r_override.has_value()},
                            {"seed", params.seed}};
    rep["game"] = game_report(sol, static_cast<int>(pool.size()));
    rep["selection_attempts"] = attempts;
    rep["n_prime"] = n_prime;
    rep["compression"] = compression_report(res.record, sample.pairs.size());
    rep["training_error"] = res.training_error.str();
    res.report = std::move(rep);
    return res;
}

PipelineResult reg_agnostic(const LabeledSample& sample, const HypothesisClass& cls,
                            const PipelineParams& params, const LearnerCaps& caps) {
    if (sample.pairs.empty()) throw std::invalid_argument("empty sample");
    int star = erm_row(cls, sample);
    LabeledSample relabeled;
    relabeled.pairs.reserve(sample.pairs.size());
    for (const auto& [x, y] : sample.pairs) {
        (void)y;
        relabeled.pairs.emplace_back(x, cls.value(star, x));
    }
    PipelineResult res = reg_realizable(relabeled, cls, params, caps);
    res.record.mode = "agnostic";
    ListPredictor pred = [&](int x) { return res.hypothesis[static_cast<std::size_t>(x)]; };
    Rat err_original = empirical_error(pred, sample);
    Rat inf_err(0);
    {
        ListPredictor h = [&](int x) {
            return LabelList(std::vector<Rat>{cls.value(star, x)});
        };
        inf_err = empirical_error(h, sample);
    }
    res.report["mode"] = "agnostic";
    res.report["erm_row"] = star;
    res.report["erm_error"] = inf_err.str();
    res.report["training_error_relabeled"] = res.training_error.str();
    res.report["training_error"] = err_original.str();
    res.training_error = err_original;
    return res;
}

PipelineResult realizable_oig_pipeline(const LabeledSample& sample, const HypothesisClass& cls,
                                       const PipelineParams& params, const LearnerCaps& caps) {
    if (sample.pairs.empty()) throw std::invalid_argument("empty sample");
    if (!realizing_row(cls, sample))
        throw std::invalid_argument("sample not realizable by the class");
    const Rat& gamma = params.gamma;
    int k = params.k;

    std::map<int, std::pair<Rat, std::int64_t>> base;
    for (const auto& [x, y] : sample.pairs) {
        auto it = base.find(x);
        if (it == base.end())
            base[x] = {y, 1};
        else
            ++it->second.second;
    }
    std::vector<Column> cols;
    for (const auto& [x, info] : base) {
        Column c;
        c.x = x;
        c.ext = x;
        c.y = info.first;
        c.weight = info.second;
        cols.push_back(c);
    }

    int n0;
    if (params.n0_override) {
        n0 = *params.n0_override;
    } else {
        KoigResult kd = koig_dim(cls, gamma, k, std::min(cls.domain_size, 4),
                                 OigThresholdRule::Auto, caps.oig);
        n0 = std::max(kd.dimension, 1);
    }
    std::int64_t l_eff = params.l_override.value_or(static_cast<std::int64_t>(
        std::ceil(6.0 * (k + 1) * std::log(2.0 * static_cast<double>(sample.pairs.size())) *
                  params.constant_scale)));
    l_eff = std::max<std::int64_t>(l_eff, 1);
    Rat target(1, 2 * (k + 1));

    OrientCache cache{gamma, k, caps.oig, {}};
    // weak predictions memoized per (support of base pairs, query point)
    std::map<std::pair<std::vector<std::pair<int, std::int64_t>>, int>, LabelList> memo;
    auto predict = [&](const std::vector<std::pair<int, std::int64_t>>& draws, int query) {
        std::vector<std::pair<int, std::int64_t>> key;
        for (const auto& [ci, mult] : draws) {
            (void)mult;
            key.emplace_back(cols[static_cast<std::size_t>(ci)].x,
                             (cols[static_cast<std::size_t>(ci)].y * Rat(cls.resolution)).num);
        }
        std::sort(key.begin(), key.end());
        key.erase(std::unique(key.begin(), key.end()), key.end());
        auto mk = std::make_pair(key, query);
        auto it = memo.find(mk);
        if (it != memo.end()) return it->second;
        LabeledSample t;
        for (const auto& [x, ynum] : key) t.pairs.emplace_back(x, Rat(ynum, cls.resolution));
        LabelList out = weak_real_core(cls, t, query, gamma, k, caps, &cache);
        return memo.emplace(mk, std::move(out)).first->second;
    };

    auto weights = uniform_column_weights(cols);
    Rng pool_rng = Rng(params.seed).derive("oig-pool");
    std::vector<PoolRow> pool;
    std::vector<std::vector<int>> payoff;
    auto add_row = [&](PoolRow row) {
        std::vector<int> pay(cols.size(), 0);
        for (std::size_t j = 0; j < cols.size(); ++j) {
            LabelList mu = predict(row.draws, cols[j].x);
            pay[j] = gamma_contains(mu, cols[j].y, gamma) ? 0 : 1;
        }
        pool.push_back(std::move(row));
        payoff.push_back(std::move(pay));
    };
    for (int b = 0; b < params.pool_batch; ++b) {
        Rng r = pool_rng.derive(static_cast<std::uint64_t>(b));
        add_row(draw_pool_row(cols, weights, n0, r));
    }

    GameSolution sol;
    bool solved = false;
    for (int round = 0; round <= params.pool_growth_rounds; ++round) {
        sol = solve_game(payoff, target, Rat(1, 1000000), params.game_max_rounds);
        if (sol.value < target) {
            solved = true;
            break;
        }
        if (round == params.pool_growth_rounds) break;
        std::vector<Rat> q = sol.column_mix;
        if (q.empty() || std::all_of(q.begin(), q.end(), [](const Rat& x) { return x.is_zero(); }))
            q = weights;
        for (int b = 0; b < params.pool_batch; ++b) {
            Rng r = pool_rng.derive("grow").derive(static_cast<std::uint64_t>(round * 1000 + b));
            add_row(draw_pool_row(cols, q, n0, r));
        }
    }
    if (!solved)
        throw std::runtime_error("game value stayed at " + sol.value.str() +
                                 " >= 1/(2(k+1)); weak learner pool exhausted");

    int attempts = 0;
    auto verify = [&](const std::vector<int>& rows) {
        for (const auto& col : cols) {
            std::vector<LabelList> lists;
            for (int rowi : rows)
                lists.push_back(predict(pool[static_cast<std::size_t>(rowi)].draws, col.x));
            LabelList agg = quantile_aggregate(lists, k);
            if (!gamma_contains(agg, col.y, gamma)) return false;
        }
        return true;
    };
    std::vector<int> selected = select_subsequences(
        sol.strategy, l_eff, Rng(params.seed).derive("oig-select"), params.retry_cap, verify,
        &attempts);

    PipelineResult res;
    res.record.mode = "oig";
    res.record.gamma = gamma;
    res.record.k = k;
    res.record.resolution = cls.resolution;
    for (int rowi : selected) {
        std::vector<CompressionEntry> entries;
        for (const auto& [ci, mult] : pool[static_cast<std::size_t>(rowi)].draws) {
            CompressionEntry e;
            e.x = cols[static_cast<std::size_t>(ci)].x;
            e.y_num = (cols[static_cast<std::size_t>(ci)].y * Rat(cls.resolution)).num;
            e.tau_index = -1;
            e.multiplicity = mult;
            entries.push_back(e);
        }
        res.record.subsequences.push_back(std::move(entries));
    }
    res.hypothesis = reconstruct_hypothesis(res.record, cls, caps);
    ListPredictor pred = [&](int x) { return res.hypothesis[static_cast<std::size_t>(x)]; };
    res.training_error = empirical_error(pred, sample);

    Json rep;
    rep["mode"] = "oig";
    rep["constants"] = Json{{"gamma", gamma.str()},
                            {"k", k},
                            {"n0", n0},
                            {"n0_overridden", params.n0_override.has_value()},
                            {"l", l_eff},
                            {"l_overridden", params.l_override.has_value()},
                            {"seed", params.seed}};
    rep["game"] = game_report(sol, static_cast<int>(pool.size()));
    rep["selection_attempts"] = attempts;
    rep["compression"] = compression_report(res.record, sample.pairs.size());
    rep["training_error"] = res.training_error.str();
    res.report = std::move(rep);
    return res;
}

LabelList quantile_aggregate(const std::vector<LabelList>& lists, int k) {
    std::vector<Rat> all;
    for (const auto& l : lists) all.insert(all.end(), l.values.begin(), l.values.end());
    if (all.empty()) throw std::invalid_argument("quantile aggregation over empty lists");
    std::sort(all.begin(), all.end());
    std::int64_t n = static_cast<std::int64_t>(all.size());
    std::vector<Rat> picks;
    for (int j = 1; j <= k; ++j) {
        std::int64_t idx = (static_cast<std::int64_t>(j) * n + k) / (k + 1);  // ceil(jN/(k+1))
        idx = std::max<std::int64_t>(1, std::min<std::int64_t>(idx, n));
        picks.push_back(all[static_cast<std::size_t>(idx - 1)]);
    }
    return LabelList(picks);
}

std::vector<LabelList> reconstruct_hypothesis(const CompressionRecord& record,
                                              const HypothesisClass& cls,
                                              const LearnerCaps& caps) {
    std::vector<LabelList> out;
    if (record.mode == "oig") {
        OrientCache cache{record.gamma, record.k, caps.oig, {}};
        std::vector<LabeledSample> subs;
        for (const auto& entries : record.subsequences) {
            LabeledSample t;
            std::set<std::pair<int, std::int64_t>> seen;
            for (const auto& e : entries)
                if (seen.insert({e.x, e.y_num}).second)
                    t.pairs.emplace_back(e.x, Rat(e.y_num, record.resolution));
            subs.push_back(std::move(t));
        }
        for (int x = 0; x < cls.domain_size; ++x) {
            std::vector<LabelList> lists;
            for (const auto& t : subs)
                lists.push_back(weak_real_core(cls, t, x, record.gamma, record.k, caps, &cache));
            out.push_back(quantile_aggregate(lists, record.k));
        }
        return out;
    }

    // threshold pipelines: labels are re-derived from the stored pairs
    ThresholdPipelineState st;
    st.caps = caps;
    st.inst = build_threshold_class(cls, record.gamma, record.k, caps);
    st.cache = OrientCache{Rat(0), record.k, caps.oig, {}};
    const ThresholdSet& ts = st.inst.taus;
    std::vector<int> sup_ids;
    for (const auto& entries : record.subsequences) {
        std::vector<std::pair<int, int>> sup;
        for (const auto& e : entries) {
            Rat y(e.y_num, record.resolution);
            int label = thr_operator(y, ts.tuple_values(static_cast<std::size_t>(e.tau_index)),
                                     record.gamma);
            if (label == kStarLabel)
                throw std::invalid_argument("record entry decodes to a star label");
            sup.emplace_back(st.inst.extended_point(e.x, e.tau_index), label);
        }
        sup_ids.push_back(st.register_support(std::move(sup)));
    }
    for (int x = 0; x < cls.domain_size; ++x) {
        std::vector<std::vector<int>> J;
        J.reserve(ts.count());
        for (std::size_t t = 0; t < ts.count(); ++t) {
            std::vector<std::vector<int>> preds;
            preds.reserve(sup_ids.size());
            for (int sid : sup_ids)
                preds.push_back(st.predict(sid, st.inst.extended_point(x, static_cast<int>(t))));
            J.push_back(topk_aggregate(preds, record.k));
        }
        out.push_back(merge_lists(J, ts, record.radius, MergeMode::Candidate, caps,
                                  2 * record.resolution));
    }
    return out;
}

}  // namespace listreg

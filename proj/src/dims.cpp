#include "listreg/dims.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace listreg {

namespace {

constexpr std::int64_t kSaturated = std::int64_t{4} * 1000 * 1000 * 1000 * 1000 * 1000 * 1000;

struct Candidate {
    std::vector<std::int64_t> anchors;   // lattice numerators, strictly increasing
    std::vector<std::uint32_t> masks;    // bucket mask per distinct value (index-aligned)
};

struct PointInfo {
    int point = 0;
    std::vector<std::int64_t> values;    // sorted distinct lattice values (kStar excluded)
    std::vector<int> value_index;        // per row: index into values, or -1 for star
    std::vector<Candidate> candidates;
};

std::uint32_t full_mask(int k) { return (std::uint32_t{1} << (k + 1)) - 1; }

// Margin bucket mask of a value against k anchors: bucket 0 below the first
// anchor, bucket j between anchors j-1 and j, bucket k above the last, each
// with a one-sided margin of gamma. Adjacent buckets can share a boundary
// point when anchors are spaced at exactly 2 gamma.
std::uint32_t fat_mask(std::int64_t v, const std::vector<std::int64_t>& c, std::int64_t g) {
    int k = static_cast<int>(c.size());
    std::uint32_t m = 0;
    if (v <= c[0] - g) m |= 1u;
    for (int b = 1; b <= k - 1; ++b)
        if (c[b - 1] + g <= v && v <= c[b] - g) m |= (1u << b);
    if (v >= c[k - 1] + g) m |= (1u << k);
    return m;
}

std::uint32_t equality_mask(std::int64_t v, const std::vector<std::int64_t>& c) {
    std::uint32_t m = 0;
    for (std::size_t j = 0; j < c.size(); ++j)
        if (v == c[j]) m |= (1u << j);
    return m;
}

void dedupe_and_prune(std::vector<Candidate>& cands, int k, std::int64_t cap) {
    // drop exact duplicates and candidates whose masks are dominated
    std::sort(cands.begin(), cands.end(),
              [](const Candidate& a, const Candidate& b) { return a.masks < b.masks; });
    cands.erase(std::unique(cands.begin(), cands.end(),
                            [](const Candidate& a, const Candidate& b) {
                                return a.masks == b.masks;
                            }),
                cands.end());
    std::vector<Candidate> kept;
    for (std::size_t i = 0; i < cands.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < cands.size() && !dominated; ++j) {
            if (i == j) continue;
            bool ge_all = true, strict = false;
            for (std::size_t v = 0; v < cands[i].masks.size(); ++v) {
                std::uint32_t a = cands[i].masks[v], b = cands[j].masks[v];
                if ((a & b) != a) { ge_all = false; break; }
                if (b != a) strict = true;
            }
            if (ge_all && (strict || j < i)) dominated = true;  // ties keep lowest index
        }
        if (!dominated) kept.push_back(cands[i]);
        if (static_cast<std::int64_t>(kept.size()) > cap)
            throw std::runtime_error("exceeds desk scale: anchor signature cap");
    }
    // coverage of all buckets is necessary at every shattered point
    std::vector<Candidate> covered;
    for (auto& c : kept) {
        std::uint32_t u = 0;
        for (auto m : c.masks) u |= m;
        if (u == full_mask(k)) covered.push_back(std::move(c));
    }
    cands = std::move(covered);
}

// Anchor vectors for margin shattering, complete over the lattice: the mask
// signature of coordinate j only changes at breakpoints v-gamma+1 and
// v+gamma, so it suffices to enumerate breakpoint representatives and
// realize each tuple greedily under the 2-gamma spacing constraint.
void build_fat_candidates(PointInfo& info, int k, std::int64_t g, std::int64_t lattice_max,
                          std::int64_t cap) {
    std::set<std::int64_t> breakpoints{0};
    for (std::int64_t v : info.values) {
        std::int64_t a = v + g, b = v - g + 1;
        if (a >= 0 && a <= lattice_max) breakpoints.insert(a);
        if (b >= 0 && b <= lattice_max) breakpoints.insert(b);
    }
    std::vector<std::int64_t> reps(breakpoints.begin(), breakpoints.end());
    std::vector<std::int64_t> ends(reps.size());
    for (std::size_t i = 0; i < reps.size(); ++i)
        ends[i] = (i + 1 < reps.size()) ? reps[i + 1] - 1 : lattice_max;

    std::vector<int> idx(static_cast<std::size_t>(k));
    std::vector<std::int64_t> chosen(static_cast<std::size_t>(k));
    auto rec = [&](auto&& self, int j, int start) -> void {
        if (j == k) {
            Candidate c;
            c.anchors = chosen;
            c.masks.reserve(info.values.size());
            for (std::int64_t v : info.values) c.masks.push_back(fat_mask(v, chosen, g));
            info.candidates.push_back(std::move(c));
            if (static_cast<std::int64_t>(info.candidates.size()) > 4 * cap)
                throw std::runtime_error("exceeds desk scale: anchor enumeration cap");
            return;
        }
        for (int i = start; i < static_cast<int>(reps.size()); ++i) {
            std::int64_t lo = reps[i];
            if (j > 0) lo = std::max(lo, chosen[static_cast<std::size_t>(j - 1)] + 2 * g);
            if (lo > ends[static_cast<std::size_t>(i)] || lo > lattice_max) continue;
            chosen[static_cast<std::size_t>(j)] = lo;
            self(self, j + 1, i);  // same interval may host the next anchor
        }
    };
    rec(rec, 0, 0);
    dedupe_and_prune(info.candidates, k, cap);
}

// Equality shattering candidates: (k+1)-subsets of the values present, with
// consecutive spacing >= 2 gamma when require_spacing is set.
void build_equality_candidates(PointInfo& info, int k, std::int64_t g, bool require_spacing,
                               std::int64_t cap) {
    int m = static_cast<int>(info.values.size());
    std::vector<std::int64_t> chosen;
    auto rec = [&](auto&& self, int start) -> void {
        if (static_cast<int>(chosen.size()) == k + 1) {
            Candidate c;
            c.anchors = chosen;
            c.masks.reserve(info.values.size());
            for (std::int64_t v : info.values) c.masks.push_back(equality_mask(v, chosen));
            info.candidates.push_back(std::move(c));
            if (static_cast<std::int64_t>(info.candidates.size()) > 4 * cap)
                throw std::runtime_error("exceeds desk scale: anchor enumeration cap");
            return;
        }
        for (int i = start; i < m; ++i) {
            if (require_spacing && !chosen.empty() && info.values[i] < chosen.back() + 2 * g)
                continue;
            chosen.push_back(info.values[i]);
            self(self, i + 1);
            chosen.pop_back();
        }
    };
    rec(rec, 0);
    dedupe_and_prune(info.candidates, k, cap);
}

struct ShatterEngine {
    int k;
    int num_rows;
    std::vector<PointInfo> points;  // only viable points
    const DimCaps& caps;
    std::int64_t lattice_den;
    std::int64_t nodes = 0;

    ShatterEngine(int k_, int rows, const DimCaps& caps_, std::int64_t den)
        : k(k_), num_rows(rows), caps(caps_), lattice_den(den) {}

    void bump() {
        if (++nodes > caps.max_search_nodes)
            throw std::runtime_error("exceeds desk scale: search node cap");
    }

    // Do the chosen candidates realize every pattern over the prefix?
    bool patterns_ok(const std::vector<int>& pts, const std::vector<int>& cand_idx,
                     int depth, std::vector<int>& rows_in) {
        // depth-first over pattern coordinates with row filtering
        auto rec = [&](auto&& self, int i, const std::vector<int>& rows) -> bool {
            if (i == depth) return true;
            const PointInfo& pi = points[static_cast<std::size_t>(pts[static_cast<std::size_t>(i)])];
            const Candidate& c = pi.candidates[static_cast<std::size_t>(cand_idx[static_cast<std::size_t>(i)])];
            for (int b = 0; b <= k; ++b) {
                bump();
                std::vector<int> sub;
                for (int r : rows) {
                    int vi = pi.value_index[static_cast<std::size_t>(r)];
                    if (vi >= 0 && (c.masks[static_cast<std::size_t>(vi)] >> b) & 1u)
                        sub.push_back(r);
                }
                if (sub.empty()) return false;
                if (!self(self, i + 1, sub)) return false;
            }
            return true;
        };
        return rec(rec, 0, rows_in);
    }

    bool try_points(const std::vector<int>& pts, std::vector<int>& cand_out) {
        int d = static_cast<int>(pts.size());
        std::vector<int> cand_idx(static_cast<std::size_t>(d), 0);
        std::vector<int> all_rows(static_cast<std::size_t>(num_rows));
        for (int r = 0; r < num_rows; ++r) all_rows[static_cast<std::size_t>(r)] = r;
        auto rec = [&](auto&& self, int i) -> bool {
            if (i == d) return true;
            const PointInfo& pi = points[static_cast<std::size_t>(pts[static_cast<std::size_t>(i)])];
            for (int c = 0; c < static_cast<int>(pi.candidates.size()); ++c) {
                cand_idx[static_cast<std::size_t>(i)] = c;
                if (!patterns_ok(pts, cand_idx, i + 1, all_rows)) continue;
                if (self(self, i + 1)) return true;
            }
            return false;
        };
        if (!rec(rec, 0)) return false;
        cand_out = cand_idx;
        return true;
    }

    // Largest shatterable size with a witness; failed subsets are memoized to
    // prune supersets (shattering is monotone under taking subsequences).
    DimResult run(int max_d, const std::function<int(int)>& origin_row) {
        DimResult result;
        int viable = static_cast<int>(points.size());
        std::vector<std::vector<int>> failed;
        for (int d = 1; d <= std::min({max_d, viable, caps.max_sequence}); ++d) {
            bool found = false;
            std::vector<int> comb(static_cast<std::size_t>(d));
            auto iterate = [&](auto&& self, int pos, int start) -> bool {
                if (pos == d) {
                    for (const auto& f : failed) {
                        if (std::includes(comb.begin(), comb.end(), f.begin(), f.end()))
                            return false;  // superset of a failed set, keep scanning
                    }
                    std::vector<int> cand_idx;
                    if (try_points(comb, cand_idx)) {
                        record_witness(comb, cand_idx, result, origin_row);
                        return true;
                    }
                    failed.push_back(comb);
                    return false;
                }
                for (int i = start; i < viable; ++i) {
                    comb[static_cast<std::size_t>(pos)] = i;
                    if (self(self, pos + 1, i + 1)) return true;
                }
                return false;
            };
            found = iterate(iterate, 0, 0);
            if (!found) break;
            result.dimension = d;
        }
        return result;
    }

    void record_witness(const std::vector<int>& pts, const std::vector<int>& cand_idx,
                        DimResult& result, const std::function<int(int)>& origin_row) {
        ShatterWitness w;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const PointInfo& pi = points[static_cast<std::size_t>(pts[i])];
            w.points.push_back(pi.point);
            std::vector<Rat> a;
            for (std::int64_t av : pi.candidates[static_cast<std::size_t>(cand_idx[i])].anchors)
                a.emplace_back(av, lattice_den);
            w.anchors.push_back(std::move(a));
        }
        // record one realizing row per pattern
        int d = static_cast<int>(pts.size());
        std::vector<int> b(static_cast<std::size_t>(d), 0);
        auto rec = [&](auto&& self, int i) -> void {
            if (i == d) {
                for (int r = 0; r < num_rows; ++r) {
                    bool ok = true;
                    for (int j = 0; j < d && ok; ++j) {
                        const PointInfo& pi = points[static_cast<std::size_t>(pts[static_cast<std::size_t>(j)])];
                        const Candidate& c =
                            pi.candidates[static_cast<std::size_t>(cand_idx[static_cast<std::size_t>(j)])];
                        int vi = pi.value_index[static_cast<std::size_t>(r)];
                        ok = vi >= 0 && ((c.masks[static_cast<std::size_t>(vi)] >>
                                          b[static_cast<std::size_t>(j)]) & 1u);
                    }
                    if (ok) {
                        w.assignment[b] = origin_row(r);
                        return;
                    }
                }
                throw std::logic_error("witness pattern lost during recording");
            }
            int hi = k;  // patterns over {0..k} for margins, {0..k} positions for equality
            for (b[static_cast<std::size_t>(i)] = 0; b[static_cast<std::size_t>(i)] <= hi;
                 ++b[static_cast<std::size_t>(i)])
                self(self, i + 1);
        };
        rec(rec, 0);
        result.witness = std::move(w);
    }
};

enum class Mode { Fat, Strong, Natarajan };

DimResult dimension_search(const HypothesisClass& input, const Rat& gamma, int k, Mode mode,
                           const DimCaps& caps) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (input.num_rows() == 0) return {};
    // product shattering scans extended domains (point x threshold pairs), so
    // it gets a wider point budget; the node cap still bounds the search
    int point_cap = mode == Mode::Natarajan ? 16 * caps.max_points : caps.max_points;
    if (input.domain_size > point_cap || input.num_rows() > caps.max_rows)
        throw std::runtime_error("exceeds desk scale: class size cap");
    if (mode != Mode::Natarajan) {
        if (input.kind != ClassKind::Total)
            throw std::invalid_argument("margin dimensions require a total class");
        require_grid_compatible(gamma, input.resolution);
    }

    std::vector<int> all_points(static_cast<std::size_t>(input.domain_size));
    for (int i = 0; i < input.domain_size; ++i) all_points[static_cast<std::size_t>(i)] = i;
    RestrictedClass dedup = restrict(input, all_points);
    const HypothesisClass& cls = dedup.cls;

    std::int64_t lattice = mode == Mode::Natarajan
                               ? cls.resolution
                               : checked_lcm(2 * cls.resolution, gamma.den);
    std::int64_t scale = lattice / cls.resolution;
    std::int64_t g = mode == Mode::Natarajan ? 0 : gamma.num * (lattice / gamma.den);

    ShatterEngine engine(k, cls.num_rows(), caps, lattice);
    for (int x = 0; x < cls.domain_size; ++x) {
        PointInfo info;
        info.point = x;
        std::set<std::int64_t> distinct;
        for (int r = 0; r < cls.num_rows(); ++r)
            if (!cls.is_star(r, x)) distinct.insert(cls.rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(x)] * scale);
        info.values.assign(distinct.begin(), distinct.end());
        info.value_index.resize(static_cast<std::size_t>(cls.num_rows()), -1);
        for (int r = 0; r < cls.num_rows(); ++r) {
            if (cls.is_star(r, x)) continue;
            std::int64_t v = cls.rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(x)] * scale;
            info.value_index[static_cast<std::size_t>(r)] = static_cast<int>(
                std::lower_bound(info.values.begin(), info.values.end(), v) - info.values.begin());
        }
        if (static_cast<int>(info.values.size()) >= (mode == Mode::Fat ? 1 : k + 1)) {
            switch (mode) {
                case Mode::Fat:
                    build_fat_candidates(info, k, g, lattice, caps.max_anchor_signatures);
                    break;
                case Mode::Strong:
                    build_equality_candidates(info, k, g, true, caps.max_anchor_signatures);
                    break;
                case Mode::Natarajan:
                    build_equality_candidates(info, k, 0, false, caps.max_anchor_signatures);
                    break;
            }
        }
        if (!info.candidates.empty()) engine.points.push_back(std::move(info));
    }
    auto origin = [&](int r) { return dedup.origin_row[static_cast<std::size_t>(r)]; };
    return engine.run(cls.domain_size, origin);
}

}  // namespace

DimResult fat_dim(const HypothesisClass& cls, const Rat& gamma, int k, const DimCaps& caps) {
    return dimension_search(cls, gamma, k, Mode::Fat, caps);
}

DimResult strong_fat_dim(const HypothesisClass& cls, const Rat& gamma, int k,
                         const DimCaps& caps) {
    return dimension_search(cls, gamma, k, Mode::Strong, caps);
}

DimResult k_natarajan_dim(const HypothesisClass& cls, int k, const DimCaps& caps) {
    return dimension_search(cls, Rat(1, 2), k, Mode::Natarajan, caps);
}

namespace {

bool verify_margin(const HypothesisClass& cls, const Rat& gamma, int k, const ShatterWitness& w,
                   bool strong) {
    int d = static_cast<int>(w.points.size());
    if (d == 0) return true;
    int anchors_per_point = strong ? k + 1 : k;
    for (const auto& a : w.anchors) {
        if (static_cast<int>(a.size()) != anchors_per_point) return false;
        for (std::size_t j = 0; j + 1 < a.size(); ++j)
            if (a[j + 1] < a[j] + gamma * Rat(2)) return false;
    }
    // every pattern must appear with a row satisfying the per-point condition
    std::vector<int> b(static_cast<std::size_t>(d), 0);
    std::int64_t total = 1;
    for (int i = 0; i < d; ++i) total *= (k + 1);
    std::int64_t seen = 0;
    auto rec = [&](auto&& self, int i) -> bool {
        if (i == d) {
            auto it = w.assignment.find(b);
            if (it == w.assignment.end()) return false;
            int r = it->second;
            if (r < 0 || r >= cls.num_rows()) return false;
            for (int j = 0; j < d; ++j) {
                int x = w.points[static_cast<std::size_t>(j)];
                if (cls.is_star(r, x)) return false;
                Rat v = cls.value(r, x);
                const auto& c = w.anchors[static_cast<std::size_t>(j)];
                int bj = b[static_cast<std::size_t>(j)];
                if (strong) {
                    if (v != c[static_cast<std::size_t>(bj)]) return false;
                } else {
                    if (bj == 0) {
                        if (!(v <= c[0] - gamma)) return false;
                    } else if (bj == k) {
                        if (!(v >= c[static_cast<std::size_t>(k - 1)] + gamma)) return false;
                    } else {
                        if (!(c[static_cast<std::size_t>(bj - 1)] + gamma <= v &&
                              v <= c[static_cast<std::size_t>(bj)] - gamma))
                            return false;
                    }
                }
            }
            ++seen;
            return true;
        }
        for (b[static_cast<std::size_t>(i)] = 0; b[static_cast<std::size_t>(i)] <= k;
             ++b[static_cast<std::size_t>(i)])
            if (!self(self, i + 1)) return false;
        return true;
    };
    return rec(rec, 0) && seen == total;
}

}  // namespace

bool verify_fat_witness(const HypothesisClass& cls, const Rat& gamma, int k,
                        const ShatterWitness& w) {
    return verify_margin(cls, gamma, k, w, false);
}

bool verify_strong_fat_witness(const HypothesisClass& cls, const Rat& gamma, int k,
                               const ShatterWitness& w) {
    return verify_margin(cls, gamma, k, w, true);
}

bool verify_natarajan_witness(const HypothesisClass& cls, int k, const ShatterWitness& w) {
    int d = static_cast<int>(w.points.size());
    if (d == 0) return true;
    for (const auto& a : w.anchors) {
        if (static_cast<int>(a.size()) != k + 1) return false;
        for (std::size_t j = 0; j + 1 < a.size(); ++j)
            if (!(a[j] < a[j + 1])) return false;
    }
    std::vector<int> b(static_cast<std::size_t>(d), 0);
    auto rec = [&](auto&& self, int i) -> bool {
        if (i == d) {
            auto it = w.assignment.find(b);
            if (it == w.assignment.end()) return false;
            int r = it->second;
            for (int j = 0; j < d; ++j) {
                int x = w.points[static_cast<std::size_t>(j)];
                if (cls.is_star(r, x)) return false;
                if (cls.value(r, x) != w.anchors[static_cast<std::size_t>(j)]
                                                [static_cast<std::size_t>(b[static_cast<std::size_t>(j)])])
                    return false;
            }
            return true;
        }
        for (b[static_cast<std::size_t>(i)] = 0; b[static_cast<std::size_t>(i)] <= k;
             ++b[static_cast<std::size_t>(i)])
            if (!self(self, i + 1)) return false;
        return true;
    };
    return rec(rec, 0);
}

namespace {

// bitmask of points where the two rows differ by at least 2 gamma
std::uint32_t pair_separation_mask(const HypothesisClass& cls, int r1, int r2, const Rat& gamma) {
    std::uint32_t m = 0;
    for (int x = 0; x < cls.domain_size; ++x) {
        Rat diff = (cls.value(r1, x) - cls.value(r2, x)).abs();
        if (diff >= gamma * Rat(2)) m |= (std::uint32_t{1} << x);
    }
    return m;
}

struct PackingSearch {
    int k;
    int rows;
    const std::vector<std::vector<std::uint32_t>>& pair_mask;
    std::vector<int> best;
    std::int64_t nodes = 0;
    std::int64_t node_cap;

    // common witness point for the tuple formed by `chosen`+r restricted to
    // every k-subset of chosen
    bool feasible(const std::vector<int>& chosen, int r) const {
        int c = static_cast<int>(chosen.size());
        if (c < k) return true;  // tuples smaller than k+1 impose nothing
        std::vector<int> pick(static_cast<std::size_t>(k));
        auto rec = [&](auto&& self, int pos, int start) -> bool {
            if (pos == k) {
                std::uint32_t common = ~std::uint32_t{0};
                for (int i = 0; i < k; ++i) {
                    common &= pair_mask[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])]
                                       [static_cast<std::size_t>(r)];
                    for (int j = i + 1; j < k; ++j)
                        common &= pair_mask[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])]
                                           [static_cast<std::size_t>(pick[static_cast<std::size_t>(j)])];
                }
                return common != 0;
            }
            for (int i = start; i < c; ++i) {
                pick[static_cast<std::size_t>(pos)] = chosen[static_cast<std::size_t>(i)];
                if (!self(self, pos + 1, i + 1)) return false;
            }
            return true;
        };
        return rec(rec, 0, 0);
    }

    void dfs(int idx, std::vector<int>& chosen) {
        if (++nodes > node_cap) throw std::runtime_error("exceeds desk scale: packing node cap");
        if (static_cast<int>(chosen.size()) > static_cast<int>(best.size())) best = chosen;
        if (idx >= rows) return;
        if (static_cast<int>(chosen.size()) + (rows - idx) <= static_cast<int>(best.size()))
            return;
        if (feasible(chosen, idx)) {
            chosen.push_back(idx);
            dfs(idx + 1, chosen);
            chosen.pop_back();
        }
        dfs(idx + 1, chosen);
    }
};

}  // namespace

PackingResult k_ary_packing(const HypothesisClass& cls, const Rat& gamma, int k,
                            const DimCaps& caps) {
    if (cls.kind != ClassKind::Total) throw std::invalid_argument("packing requires a total class");
    if (k < 1 || k > 3) throw std::runtime_error("exceeds desk scale: packing k cap");
    if (cls.domain_size > 32) throw std::runtime_error("exceeds desk scale: packing point cap");
    std::vector<int> all(static_cast<std::size_t>(cls.domain_size));
    for (int i = 0; i < cls.domain_size; ++i) all[static_cast<std::size_t>(i)] = i;
    RestrictedClass dedup = restrict(cls, all);
    int rows = dedup.cls.num_rows();

    PackingResult result;
    if (rows <= k) {
        for (int r = 0; r < rows; ++r)
            result.witness.rows.push_back(dedup.origin_row[static_cast<std::size_t>(r)]);
        result.number = rows;
        return result;
    }

    std::vector<std::vector<std::uint32_t>> pm(static_cast<std::size_t>(rows),
                                               std::vector<std::uint32_t>(static_cast<std::size_t>(rows), 0));
    for (int a = 0; a < rows; ++a)
        for (int b = a + 1; b < rows; ++b)
            pm[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                pm[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] =
                    pair_separation_mask(dedup.cls, a, b, gamma);

    PackingSearch search{k, rows, pm, {}, 0, caps.max_search_nodes};
    // greedy seed gives the branch-and-bound a useful incumbent
    std::vector<int> seed;
    for (int r = 0; r < rows; ++r)
        if (search.feasible(seed, r)) seed.push_back(r);
    search.best = seed;
    std::vector<int> chosen;
    search.dfs(0, chosen);

    result.number = static_cast<int>(search.best.size());
    for (int r : search.best)
        result.witness.rows.push_back(dedup.origin_row[static_cast<std::size_t>(r)]);
    // record a separating point per (k+1)-subset
    if (result.number >= k + 1) {
        std::vector<int> pick(static_cast<std::size_t>(k + 1));
        auto rec = [&](auto&& self, int pos, int start) -> void {
            if (pos == k + 1) {
                std::uint32_t common = ~std::uint32_t{0};
                for (int i = 0; i <= k; ++i)
                    for (int j = i + 1; j <= k; ++j)
                        common &= pm[static_cast<std::size_t>(search.best[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])])]
                                    [static_cast<std::size_t>(search.best[static_cast<std::size_t>(pick[static_cast<std::size_t>(j)])])];
                std::vector<int> key;
                for (int i = 0; i <= k; ++i)
                    key.push_back(result.witness.rows[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])]);
                result.witness.separating_point[key] =
                    common == 0 ? -1 : __builtin_ctz(common);
                return;
            }
            for (int i = start; i < result.number; ++i) {
                pick[static_cast<std::size_t>(pos)] = i;
                self(self, pos + 1, i + 1);
            }
        };
        rec(rec, 0, 0);
    }
    return result;
}

bool verify_packing_witness(const HypothesisClass& cls, const Rat& gamma, int k,
                            const PackingWitness& w) {
    std::set<int> uniq(w.rows.begin(), w.rows.end());
    if (uniq.size() != w.rows.size()) return false;
    if (static_cast<int>(w.rows.size()) <= k) return true;
    std::vector<int> pick(static_cast<std::size_t>(k + 1));
    int m = static_cast<int>(w.rows.size());
    auto rec = [&](auto&& self, int pos, int start) -> bool {
        if (pos == k + 1) {
            std::vector<int> key;
            for (int i = 0; i <= k; ++i) key.push_back(w.rows[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])]);
            auto it = w.separating_point.find(key);
            if (it == w.separating_point.end() || it->second < 0 ||
                it->second >= cls.domain_size)
                return false;
            int x = it->second;
            for (int i = 0; i <= k; ++i)
                for (int j = i + 1; j <= k; ++j) {
                    Rat diff = (cls.value(key[static_cast<std::size_t>(i)], x) -
                                cls.value(key[static_cast<std::size_t>(j)], x))
                                   .abs();
                    if (diff < gamma * Rat(2)) return false;
                }
            return true;
        }
        for (int i = start; i < m; ++i) {
            pick[static_cast<std::size_t>(pos)] = i;
            if (!self(self, pos + 1, i + 1)) return false;
        }
        return true;
    };
    return rec(rec, 0, 0);
}

namespace {

std::int64_t sat_mul(std::int64_t a, std::int64_t b) {
    __int128 p = static_cast<__int128>(a) * b;
    return p > kSaturated ? kSaturated : static_cast<std::int64_t>(p);
}

std::int64_t binom(int n, int r) {
    if (r < 0 || r > n) return 0;
    __int128 v = 1;
    for (int i = 0; i < r; ++i) {
        v = v * (n - i) / (i + 1);
        if (v > kSaturated) return kSaturated;
    }
    return static_cast<std::int64_t>(v);
}

}  // namespace

SandwichReport packing_sandwich_check(const HypothesisClass& cls, const Rat& gamma, int k,
                                      const DimCaps& caps) {
    SandwichReport rep;
    rep.packing = k_ary_packing(cls, gamma, k, caps).number;
    rep.strong_dim = strong_fat_dim(cls, gamma, k, caps).dimension;
    rep.fat_dim = fat_dim(cls, gamma, k, caps).dimension;

    std::set<std::int64_t> labels;
    for (const auto& row : cls.rows)
        for (std::int64_t e : row)
            if (e != kStar) labels.insert(e);
    std::int64_t B = static_cast<std::int64_t>(labels.size());
    std::int64_t n = cls.domain_size;

    // y = sum_{i=1}^{d_strong} C(n,i) C(B,k+1)^i
    std::int64_t y = 0;
    for (int i = 1; i <= rep.strong_dim; ++i) {
        std::int64_t term = binom(static_cast<int>(n), i);
        std::int64_t cb = binom(static_cast<int>(B), k + 1);
        for (int j = 0; j < i; ++j) term = sat_mul(term, cb);
        y += term;
        if (y > kSaturated) y = kSaturated;
    }

    // exponent = smallest r with ((k+1)/k)^r >= y, computed exactly
    int exponent = 0;
    if (y > 1) {
        __int128 num = 1, den = 1;
        while (true) {
            ++exponent;
            num *= (k + 1);
            den *= k;
            if (num >= static_cast<__int128>(y) * den) break;
            if (exponent > 500) break;  // saturated y; bound is astronomically large
        }
    }
    std::int64_t base = sat_mul(sat_mul(k + 1, n), [&] {
        std::int64_t p = 1;
        for (int i = 0; i <= k; ++i) p = sat_mul(p, B);
        return p;
    }());
    std::int64_t upper = k + 1;
    for (int i = 0; i < exponent; ++i) upper = sat_mul(upper, base);
    rep.upper_bound = upper >= kSaturated ? std::string("saturated(>=4e18)") : std::to_string(upper);
    rep.upper_holds = static_cast<std::int64_t>(rep.packing) < upper;

    // floor(((k+1)/3) exp(d_fat (k+1)!/(k+1)^{k+2})); desk-scale arguments are
    // tiny so long double headroom is ample
    long double fact = 1.0L;
    for (int i = 2; i <= k + 1; ++i) fact *= i;
    long double powkk = powl(static_cast<long double>(k + 1), static_cast<long double>(k + 2));
    long double x = static_cast<long double>(rep.fat_dim) * fact / powkk;
    long double v = (static_cast<long double>(k + 1) / 3.0L) * expl(x);
    std::int64_t lower = static_cast<std::int64_t>(floorl(v));
    rep.lower_bound = std::to_string(lower);
    rep.lower_holds = static_cast<std::int64_t>(rep.packing) >= lower;

    rep.pass = rep.upper_holds && rep.lower_holds;
    return rep;
}

}  // namespace listreg

#include "listreg/oig.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace listreg {

namespace {

bool covered(std::int64_t a, std::int64_t b, std::int64_t den, const Rat& gamma) {
    // |a-b|/den <= gamma, exactly
    std::int64_t d = a > b ? a - b : b - a;
    return static_cast<__int128>(d) * gamma.den <= static_cast<__int128>(gamma.num) * den;
}

}  // namespace

OneInclusionGraph build_oig(const HypothesisClass& restricted) {
    if (restricted.kind != ClassKind::Partial && restricted.num_rows() == 0)
        throw std::invalid_argument("empty class has no one-inclusion graph");
    if (restricted.kind == ClassKind::Partial)
        throw std::invalid_argument("one-inclusion graph requires a total class");
    std::vector<int> all(static_cast<std::size_t>(restricted.domain_size));
    for (int i = 0; i < restricted.domain_size; ++i) all[static_cast<std::size_t>(i)] = i;
    RestrictedClass dedup = restrict(restricted, all);

    OneInclusionGraph g;
    g.directions = restricted.domain_size;
    g.den = restricted.resolution;
    g.vertices = dedup.cls.rows;
    int nv = static_cast<int>(g.vertices.size());
    g.edge_of.assign(static_cast<std::size_t>(nv),
                     std::vector<int>(static_cast<std::size_t>(g.directions), -1));
    for (int dir = 0; dir < g.directions; ++dir) {
        std::map<std::vector<std::int64_t>, std::vector<int>> groups;
        for (int v = 0; v < nv; ++v) {
            std::vector<std::int64_t> pattern;
            pattern.reserve(static_cast<std::size_t>(g.directions - 1));
            for (int j = 0; j < g.directions; ++j)
                if (j != dir) pattern.push_back(g.vertices[static_cast<std::size_t>(v)][static_cast<std::size_t>(j)]);
            groups[pattern].push_back(v);
        }
        for (auto& [pattern, members] : groups) {
            OneInclusionGraph::Edge e;
            e.direction = dir;
            e.members = members;  // map iteration gives deterministic pattern order
            int id = static_cast<int>(g.edges.size());
            for (int v : members) g.edge_of[static_cast<std::size_t>(v)][static_cast<std::size_t>(dir)] = id;
            g.edges.push_back(std::move(e));
        }
    }
    return g;
}

OneInclusionGraph induced_subgraph(const OneInclusionGraph& g, const std::vector<int>& keep) {
    OneInclusionGraph s;
    s.directions = g.directions;
    s.den = g.den;
    std::vector<int> remap(g.vertices.size(), -1);
    for (std::size_t i = 0; i < keep.size(); ++i) {
        remap[static_cast<std::size_t>(keep[i])] = static_cast<int>(i);
        s.vertices.push_back(g.vertices[static_cast<std::size_t>(keep[i])]);
    }
    s.edge_of.assign(keep.size(), std::vector<int>(static_cast<std::size_t>(s.directions), -1));
    for (const auto& e : g.edges) {
        OneInclusionGraph::Edge sub;
        sub.direction = e.direction;
        for (int v : e.members)
            if (remap[static_cast<std::size_t>(v)] >= 0)
                sub.members.push_back(remap[static_cast<std::size_t>(v)]);
        if (sub.members.empty()) continue;
        int id = static_cast<int>(s.edges.size());
        for (int v : sub.members)
            s.edge_of[static_cast<std::size_t>(v)][static_cast<std::size_t>(sub.direction)] = id;
        s.edges.push_back(std::move(sub));
    }
    return s;
}

int k_outdeg(const OneInclusionGraph& g, int vertex, const KListOrientation& sigma,
             const Rat& gamma) {
    if (sigma.size() != g.edges.size())
        throw std::invalid_argument("orientation does not cover all edges");
    int count = 0;
    for (int dir = 0; dir < g.directions; ++dir) {
        int e = g.edge_of[static_cast<std::size_t>(vertex)][static_cast<std::size_t>(dir)];
        if (e < 0) throw std::logic_error("vertex missing an edge in some direction");
        const auto& list = sigma[static_cast<std::size_t>(e)];
        if (list.empty()) throw std::invalid_argument("edge left unoriented");
        std::int64_t mine = g.vertices[static_cast<std::size_t>(vertex)][static_cast<std::size_t>(dir)];
        bool ok = false;
        for (int u : list) {
            if (covered(g.vertices[static_cast<std::size_t>(u)][static_cast<std::size_t>(dir)], mine, g.den, gamma)) {
                ok = true;
                break;
            }
        }
        if (!ok) ++count;
    }
    return count;
}

namespace {

struct EdgeCandidates {
    // distinct direction-values of the edge, ascending
    std::vector<std::int64_t> values;
    std::vector<int> value_of_member;  // per member: index into values
    struct Cand {
        std::vector<int> vertices;       // oriented list (lowest member per chosen value)
        std::vector<bool> value_covered; // per distinct value
        int uncovered_members = 0;
    };
    std::vector<Cand> cands;
    int min_uncovered = 0;
};

EdgeCandidates build_candidates(const OneInclusionGraph& g, const OneInclusionGraph::Edge& e,
                                const Rat& gamma, int k, const OigCaps& caps) {
    EdgeCandidates ec;
    std::set<std::int64_t> vals;
    for (int v : e.members)
        vals.insert(g.vertices[static_cast<std::size_t>(v)][static_cast<std::size_t>(e.direction)]);
    ec.values.assign(vals.begin(), vals.end());
    ec.value_of_member.reserve(e.members.size());
    std::vector<int> member_count(ec.values.size(), 0);
    std::vector<int> first_member(ec.values.size(), -1);
    for (int v : e.members) {
        std::int64_t x = g.vertices[static_cast<std::size_t>(v)][static_cast<std::size_t>(e.direction)];
        int idx = static_cast<int>(std::lower_bound(ec.values.begin(), ec.values.end(), x) -
                                   ec.values.begin());
        ec.value_of_member.push_back(idx);
        ++member_count[static_cast<std::size_t>(idx)];
        if (first_member[static_cast<std::size_t>(idx)] < 0) first_member[static_cast<std::size_t>(idx)] = v;
    }
    int m = static_cast<int>(ec.values.size());
    int pick = std::min(k, m);

    // enumerate value subsets of size pick; keep maximal coverages only
    std::vector<int> subset(static_cast<std::size_t>(pick));
    std::vector<std::vector<bool>> seen_cov;
    auto rec = [&](auto&& self, int pos, int start) -> void {
        if (pos == pick) {
            EdgeCandidates::Cand c;
            c.value_covered.assign(static_cast<std::size_t>(m), false);
            for (int i = 0; i < pick; ++i) {
                c.vertices.push_back(first_member[static_cast<std::size_t>(subset[static_cast<std::size_t>(i)])]);
                for (int vIdx = 0; vIdx < m; ++vIdx)
                    if (covered(ec.values[static_cast<std::size_t>(vIdx)],
                                ec.values[static_cast<std::size_t>(subset[static_cast<std::size_t>(i)])],
                                g.den, gamma))
                        c.value_covered[static_cast<std::size_t>(vIdx)] = true;
            }
            for (int vIdx = 0; vIdx < m; ++vIdx)
                if (!c.value_covered[static_cast<std::size_t>(vIdx)])
                    c.uncovered_members += member_count[static_cast<std::size_t>(vIdx)];
            ec.cands.push_back(std::move(c));
            if (static_cast<std::int64_t>(ec.cands.size()) > caps.max_edge_candidates)
                throw std::runtime_error("exceeds desk scale: edge candidate cap (try greedy mode)");
            return;
        }
        for (int i = start; i < m; ++i) {
            subset[static_cast<std::size_t>(pos)] = i;
            self(self, pos + 1, i + 1);
        }
    };
    rec(rec, 0, 0);

    // drop dominated coverages; order candidates by vertex list for stable ties
    std::vector<EdgeCandidates::Cand> kept;
    for (std::size_t i = 0; i < ec.cands.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < ec.cands.size() && !dominated; ++j) {
            if (i == j) continue;
            bool sub = true, strict = false;
            for (int v = 0; v < m; ++v) {
                bool a = ec.cands[i].value_covered[static_cast<std::size_t>(v)];
                bool b = ec.cands[j].value_covered[static_cast<std::size_t>(v)];
                if (a && !b) { sub = false; break; }
                if (b && !a) strict = true;
            }
            if (sub && (strict || j < i)) dominated = true;
        }
        if (!dominated) kept.push_back(ec.cands[i]);
    }
    std::sort(kept.begin(), kept.end(),
              [](const EdgeCandidates::Cand& a, const EdgeCandidates::Cand& b) {
                  return a.vertices < b.vertices;
              });
    ec.cands = std::move(kept);
    ec.min_uncovered = ec.cands.front().uncovered_members;
    for (const auto& c : ec.cands) ec.min_uncovered = std::min(ec.min_uncovered, c.uncovered_members);
    return ec;
}

struct OrientSolver {
    const OneInclusionGraph& g;
    const Rat& gamma;
    int k;
    const OigCaps& caps;
    std::vector<EdgeCandidates> cand;
    std::vector<std::int64_t> suffix_min;  // over edges i.., sum of min uncovered members
    std::int64_t nodes = 0;

    OrientSolver(const OneInclusionGraph& g_, const Rat& gamma_, int k_, const OigCaps& caps_)
        : g(g_), gamma(gamma_), k(k_), caps(caps_) {
        if (static_cast<int>(g.vertices.size()) > caps.max_vertices)
            throw std::runtime_error("exceeds desk scale: vertex cap (try greedy mode)");
        if (g.directions > caps.max_directions)
            throw std::runtime_error("exceeds desk scale: direction cap");
        if (static_cast<std::int64_t>(g.vertices.size()) * g.directions > caps.max_cells)
            throw std::runtime_error("exceeds desk scale: graph cell cap (try greedy mode)");
        cand.reserve(g.edges.size());
        for (const auto& e : g.edges) cand.push_back(build_candidates(g, e, gamma, k, caps));
        suffix_min.assign(g.edges.size() + 1, 0);
        for (int i = static_cast<int>(g.edges.size()) - 1; i >= 0; --i)
            suffix_min[static_cast<std::size_t>(i)] =
                suffix_min[static_cast<std::size_t>(i + 1)] + cand[static_cast<std::size_t>(i)].min_uncovered;
    }

    void bump() {
        if (++nodes > caps.max_search_nodes)
            throw std::runtime_error("exceeds desk scale: orientation node cap (try greedy mode)");
    }

    void apply(int edge, int c, std::vector<int>& unsat, int sign) {
        const auto& e = g.edges[static_cast<std::size_t>(edge)];
        const auto& cc = cand[static_cast<std::size_t>(edge)].cands[static_cast<std::size_t>(c)];
        for (std::size_t mi = 0; mi < e.members.size(); ++mi) {
            int vIdx = cand[static_cast<std::size_t>(edge)].value_of_member[mi];
            if (!cc.value_covered[static_cast<std::size_t>(vIdx)])
                unsat[static_cast<std::size_t>(e.members[mi])] += sign;
        }
    }

    bool candidate_feasible(int edge, int c, const std::vector<int>& unsat, int bound) const {
        const auto& e = g.edges[static_cast<std::size_t>(edge)];
        const auto& cc = cand[static_cast<std::size_t>(edge)].cands[static_cast<std::size_t>(c)];
        for (std::size_t mi = 0; mi < e.members.size(); ++mi) {
            int vIdx = cand[static_cast<std::size_t>(edge)].value_of_member[mi];
            if (!cc.value_covered[static_cast<std::size_t>(vIdx)] &&
                unsat[static_cast<std::size_t>(e.members[mi])] + 1 > bound)
                return false;
        }
        return true;
    }

    // depth-first with unit propagation and fail-first branching: exists an
    // extension of `choice` with every final unsat count <= bound?
    bool extend(int bound, std::vector<int>& choice, std::vector<int>& unsat,
                std::int64_t total) {
        bump();
        // propagate: edges with a unique feasible candidate are forced
        std::vector<std::pair<int, int>> trail;  // (edge, candidate)
        bool progress = true;
        bool conflict = false;
        int branch_edge = -1;
        int branch_count = 0;
        while (progress && !conflict) {
            progress = false;
            branch_edge = -1;
            std::int64_t remaining_min = 0;
            for (int ei = 0; ei < static_cast<int>(g.edges.size()); ++ei) {
                if (choice[static_cast<std::size_t>(ei)] >= 0) continue;
                int count = 0, last = -1;
                std::int64_t mmin = INT64_MAX;
                for (int c = 0; c < static_cast<int>(cand[static_cast<std::size_t>(ei)].cands.size()); ++c) {
                    if (!candidate_feasible(ei, c, unsat, bound)) continue;
                    ++count;
                    last = c;
                    mmin = std::min<std::int64_t>(
                        mmin, cand[static_cast<std::size_t>(ei)].cands[static_cast<std::size_t>(c)].uncovered_members);
                }
                if (count == 0) { conflict = true; break; }
                if (count == 1) {
                    choice[static_cast<std::size_t>(ei)] = last;
                    apply(ei, last, unsat, +1);
                    total += cand[static_cast<std::size_t>(ei)].cands[static_cast<std::size_t>(last)].uncovered_members;
                    trail.emplace_back(ei, last);
                    progress = true;
                } else {
                    remaining_min += mmin;
                    if (branch_edge < 0 || count < branch_count) {
                        branch_edge = ei;
                        branch_count = count;
                    }
                }
            }
            if (!conflict && !progress &&
                total + remaining_min >
                    static_cast<std::int64_t>(bound) * static_cast<std::int64_t>(g.vertices.size()))
                conflict = true;
        }
        bool ok = false;
        if (!conflict) {
            if (branch_edge < 0) {
                ok = true;  // everything decided
            } else {
                const auto& ec = cand[static_cast<std::size_t>(branch_edge)];
                std::vector<int> order;
                for (int c = 0; c < static_cast<int>(ec.cands.size()); ++c)
                    if (candidate_feasible(branch_edge, c, unsat, bound)) order.push_back(c);
                std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                    return ec.cands[static_cast<std::size_t>(a)].uncovered_members <
                           ec.cands[static_cast<std::size_t>(b)].uncovered_members;
                });
                for (int c : order) {
                    choice[static_cast<std::size_t>(branch_edge)] = c;
                    apply(branch_edge, c, unsat, +1);
                    if (extend(bound, choice, unsat,
                               total + ec.cands[static_cast<std::size_t>(c)].uncovered_members)) {
                        ok = true;
                        break;
                    }
                    apply(branch_edge, c, unsat, -1);
                    choice[static_cast<std::size_t>(branch_edge)] = -1;
                }
            }
        }
        if (!ok) {
            for (auto it = trail.rbegin(); it != trail.rend(); ++it) {
                apply(it->first, it->second, unsat, -1);
                choice[static_cast<std::size_t>(it->first)] = -1;
            }
        }
        return ok;
    }

    std::optional<std::vector<int>> decide(int bound,
                                           const std::vector<int>& fixed_prefix = {}) {
        std::vector<int> unsat(g.vertices.size(), 0);
        std::vector<int> choice(g.edges.size(), -1);
        std::int64_t total = 0;
        for (std::size_t ei = 0; ei < fixed_prefix.size(); ++ei) {
            int c = fixed_prefix[ei];
            if (c < 0) continue;
            choice[ei] = c;
            apply(static_cast<int>(ei), c, unsat, +1);
            total += cand[ei].cands[static_cast<std::size_t>(c)].uncovered_members;
        }
        for (std::size_t v = 0; v < unsat.size(); ++v)
            if (unsat[v] > bound) return std::nullopt;
        if (extend(bound, choice, unsat, total)) return choice;
        return std::nullopt;
    }

    // lexicographically first orientation achieving the bound: fix edges in
    // build order, always taking the smallest candidate that still extends
    std::vector<int> lexicographic_complete(int bound) {
        std::vector<int> fixed(g.edges.size(), -1);
        auto full = decide(bound);
        if (!full) throw std::logic_error("lexicographic completion at infeasible bound");
        for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
            if ((*full)[ei] == 0) {
                fixed[ei] = 0;  // already minimal for this edge
                continue;
            }
            int upto = (*full)[ei];
            for (int c = 0; c < upto; ++c) {
                fixed[ei] = c;
                auto attempt = decide(bound, fixed);
                if (attempt) {
                    full = attempt;
                    break;
                }
                fixed[ei] = -1;
            }
            if (fixed[ei] < 0) fixed[ei] = upto;
        }
        return fixed;
    }

    int root_lower_bound() const {
        std::int64_t total = suffix_min[0];
        std::int64_t nv = static_cast<std::int64_t>(g.vertices.size());
        std::int64_t avg = (total + nv - 1) / nv;
        // per-vertex forced misses
        std::vector<std::int64_t> forced(g.vertices.size(), 0);
        for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
            const auto& e = g.edges[ei];
            for (std::size_t mi = 0; mi < e.members.size(); ++mi) {
                int vIdx = cand[ei].value_of_member[mi];
                bool always_missed = true;
                for (const auto& c : cand[ei].cands)
                    if (c.value_covered[static_cast<std::size_t>(vIdx)]) { always_missed = false; break; }
                if (always_missed) ++forced[static_cast<std::size_t>(e.members[mi])];
            }
        }
        std::int64_t fmax = 0;
        for (auto f : forced) fmax = std::max(fmax, f);
        return static_cast<int>(std::max(avg, fmax));
    }

    std::vector<int> greedy() const {
        std::vector<int> choice(g.edges.size(), 0);
        for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
            int best = 0;
            for (int c = 1; c < static_cast<int>(cand[ei].cands.size()); ++c)
                if (cand[ei].cands[static_cast<std::size_t>(c)].uncovered_members <
                    cand[ei].cands[static_cast<std::size_t>(best)].uncovered_members)
                    best = c;
            choice[ei] = best;
        }
        return choice;
    }

    KListOrientation to_orientation(const std::vector<int>& choice) const {
        KListOrientation sigma(g.edges.size());
        for (std::size_t ei = 0; ei < g.edges.size(); ++ei)
            sigma[ei] = cand[ei].cands[static_cast<std::size_t>(choice[ei])].vertices;
        return sigma;
    }

    int measure(const KListOrientation& sigma) const {
        int worst = 0;
        for (int v = 0; v < static_cast<int>(g.vertices.size()); ++v)
            worst = std::max(worst, k_outdeg(g, v, sigma, gamma));
        return worst;
    }
};

}  // namespace

OrientationResult min_max_k_outdeg(const OneInclusionGraph& g, const Rat& gamma, int k,
                                   OrientMode mode, const OigCaps& caps) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (g.edges.empty()) return {KListOrientation{}, 0, true};
    OrientSolver solver(g, gamma, k, caps);

    OrientationResult res;
    auto greedy_choice = solver.greedy();
    res.sigma = solver.to_orientation(greedy_choice);
    res.max_outdeg = solver.measure(res.sigma);
    if (mode == OrientMode::Greedy) {
        res.optimal = false;
        return res;
    }

    int lb = solver.root_lower_bound();
    int ub = res.max_outdeg;
    std::vector<int> best_choice = greedy_choice;
    while (lb < ub) {
        int mid = lb + (ub - lb) / 2;
        auto sol = solver.decide(mid);
        if (sol) {
            best_choice = *sol;
            ub = mid;
        } else {
            lb = mid + 1;
        }
    }
    // ties among optimal orientations break lexicographically
    best_choice = solver.lexicographic_complete(ub);
    res.sigma = solver.to_orientation(best_choice);
    res.max_outdeg = solver.measure(res.sigma);
    res.optimal = true;
    return res;
}

bool orientation_decision(const OneInclusionGraph& g, const Rat& gamma, int k, int bound,
                          const OigCaps& caps) {
    if (g.edges.empty()) return true;
    OrientSolver solver(g, gamma, k, caps);
    if (solver.root_lower_bound() > bound) return false;
    auto greedy_choice = solver.greedy();
    if (solver.measure(solver.to_orientation(greedy_choice)) <= bound) return true;
    return solver.decide(bound).has_value();
}

namespace {

int required_outdeg(int n, int k, OigThresholdRule rule) {
    bool strict_third = rule == OigThresholdRule::StrictThird ||
                    (rule == OigThresholdRule::Auto && k == 1);
    if (strict_third) return n / 3 + 1;                  // strictly above n/3
    return static_cast<int>((n + 2 * (k + 1) - 1) / (2 * (k + 1)));  // at least n/(2(k+1))
}

// every edge fully coverable by a k-list means every subgraph admits a
// zero-outdegree orientation, so the projection cannot witness any n >= 1
bool all_edges_coverable(const OneInclusionGraph& g, const Rat& gamma, int k,
                         const OigCaps& caps) {
    for (const auto& e : g.edges) {
        EdgeCandidates ec = build_candidates(g, e, gamma, k, caps);
        if (ec.min_uncovered > 0) return false;
    }
    return true;
}

}  // namespace

KoigResult koig_dim(const HypothesisClass& cls, const Rat& gamma, int k, int n_max,
                    OigThresholdRule rule, const OigCaps& caps) {
    if (cls.kind != ClassKind::Total)
        throw std::invalid_argument("oig dimension requires a total class");
    KoigResult out;
    n_max = std::min(n_max, cls.domain_size);
    for (int n = n_max; n >= 1; --n) {
        int need = required_outdeg(n, k, rule);
        std::vector<int> comb(static_cast<std::size_t>(n));
        bool truncated = false;
        auto scan = [&](auto&& self, int pos, int start) -> bool {
            if (pos == n) {
                RestrictedClass proj = restrict(cls, comb);
                OneInclusionGraph g = build_oig(proj.cls);
                if (all_edges_coverable(g, gamma, k, caps)) return false;
                if (!orientation_decision(g, gamma, k, need - 1, caps)) {
                    out.dimension = n;
                    out.witness_points = comb;
                    out.witness_vertices.resize(g.vertices.size());
                    for (std::size_t i = 0; i < g.vertices.size(); ++i)
                        out.witness_vertices[i] = static_cast<int>(i);
                    return true;
                }
                // the full projection orients below threshold; sweep induced
                // subgraphs when the graph is small enough to enumerate
                if (static_cast<int>(g.vertices.size()) <= caps.subgraph_enum_vertices) {
                    int nv = static_cast<int>(g.vertices.size());
                    for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << nv); ++mask) {
                        if (static_cast<int>(__builtin_popcount(mask)) <= k) continue;
                        std::vector<int> keep;
                        for (int v = 0; v < nv; ++v)
                            if ((mask >> v) & 1u) keep.push_back(v);
                        OneInclusionGraph sub = induced_subgraph(g, keep);
                        if (all_edges_coverable(sub, gamma, k, caps)) continue;
                        if (!orientation_decision(sub, gamma, k, need - 1, caps)) {
                            out.dimension = n;
                            out.witness_points = comb;
                            out.witness_vertices = keep;
                            return true;
                        }
                    }
                } else {
                    truncated = true;
                }
                return false;
            }
            for (int i = start; i < cls.domain_size; ++i) {
                comb[static_cast<std::size_t>(pos)] = i;
                if (self(self, pos + 1, i + 1)) return true;
            }
            return false;
        };
        if (scan(scan, 0, 0)) {
            if (truncated) {
                out.exact_up_to_n_max = false;
                out.note = "witness found; some larger projections skipped induced-subgraph sweep";
            }
            return out;
        }
        if (truncated) {
            out.exact_up_to_n_max = false;
            out.note = "induced-subgraph sweep truncated by vertex cap; result is a lower bound";
        }
    }
    return out;
}

}  // namespace listreg

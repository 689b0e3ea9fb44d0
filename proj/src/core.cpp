#include "listreg/core.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace listreg {

void HypothesisClass::validate() const {
    if (domain_size < 0) throw std::invalid_argument("negative domain size");
    if (resolution <= 0) throw std::invalid_argument("resolution must be positive");
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != domain_size)
            throw std::invalid_argument("row length does not match domain size");
        for (std::int64_t e : row) {
            if (e == kStar) {
                if (kind == ClassKind::Total)
                    throw std::invalid_argument("total class contains a star entry");
                continue;
            }
            if (e < 0 || e > resolution)
                throw std::invalid_argument("entry outside [0, Q]");
        }
    }
}

LabelList::LabelList(std::vector<Rat> vs) : values(std::move(vs)) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
}

bool LabelList::contains(const Rat& y) const {
    return std::binary_search(values.begin(), values.end(), y);
}

std::string LabelList::str() const {
    std::string s = "{";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) s += ",";
        s += values[i].str();
    }
    return s + "}";
}

Rat abs_list_loss(const LabelList& mu, const Rat& y) {
    if (mu.empty()) throw std::invalid_argument("empty prediction");
    Rat best = (mu.values[0] - y).abs();
    for (std::size_t j = 1; j < mu.values.size(); ++j)
        best = rat_min(best, (mu.values[j] - y).abs());
    return best;
}

bool gamma_contains(const LabelList& mu, const Rat& y, const Rat& gamma) {
    return abs_list_loss(mu, y) <= gamma;
}

Rat empirical_error(const ListPredictor& predictor, const LabeledSample& sample) {
    if (sample.pairs.empty()) throw std::invalid_argument("empty sample");
    Rat total(0);
    for (const auto& [x, y] : sample.pairs) {
        LabelList mu = predictor(x);
        if (mu.empty()) throw std::invalid_argument("predictor undefined at point");
        total += abs_list_loss(mu, y);
    }
    return total / Rat(static_cast<std::int64_t>(sample.pairs.size()));
}

Rat population_error(const ListPredictor& predictor, const FiniteDistribution& dist) {
    Rat total(0);
    for (const auto& atom : dist.support) {
        LabelList mu = predictor(atom.x);
        if (mu.empty()) throw std::invalid_argument("predictor undefined at point");
        total += atom.mass * abs_list_loss(mu, atom.y);
    }
    return total;
}

void FiniteDistribution::validate() const {
    Rat total(0);
    for (const auto& atom : support) {
        if (atom.mass < Rat(0)) throw std::invalid_argument("negative mass");
        total += atom.mass;
    }
    if (total != Rat(1)) throw std::invalid_argument("masses do not sum to 1");
}

std::pair<int, Rat> FiniteDistribution::sample(Rng& rng) const {
    std::int64_t common = 1;
    for (const auto& atom : support) common = checked_lcm(common, atom.mass.den);
    std::int64_t r = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(common)));
    std::int64_t acc = 0;
    for (const auto& atom : support) {
        acc += atom.mass.num * (common / atom.mass.den);
        if (r < acc) return {atom.x, atom.y};
    }
    return {support.back().x, support.back().y};
}

LabeledSample FiniteDistribution::draw(int n, Rng& rng) const {
    LabeledSample s;
    s.pairs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) s.pairs.push_back(sample(rng));
    return s;
}

HypothesisClass discretize_class(const HypothesisClass& cls, const Rat& alpha) {
    if (alpha.num <= 0) throw std::invalid_argument("alpha must be positive");
    // alpha*floor(v/alpha) for v = e/Q lands back on a grid of denominator
    // lcm(Q, den(alpha)); refine the resolution so entries stay integral.
    std::int64_t q = checked_lcm(cls.resolution, alpha.den);
    HypothesisClass out = cls;
    out.resolution = q;
    for (auto& row : out.rows) {
        for (auto& e : row) {
            if (e == kStar) continue;
            Rat v(e, cls.resolution);
            Rat snapped = alpha * Rat((v / alpha).floor());
            e = snapped.num * (q / snapped.den);
        }
    }
    out.validate();
    return out;
}

RestrictedClass restrict(const HypothesisClass& cls, const std::vector<int>& points) {
    for (int x : points)
        if (x < 0 || x >= cls.domain_size) throw std::out_of_range("restriction point out of range");
    RestrictedClass out;
    out.cls.domain_size = static_cast<int>(points.size());
    out.cls.resolution = cls.resolution;
    out.cls.kind = cls.kind;
    std::map<std::vector<std::int64_t>, int> seen;
    for (int r = 0; r < cls.num_rows(); ++r) {
        std::vector<std::int64_t> proj;
        proj.reserve(points.size());
        for (int x : points) proj.push_back(cls.rows[r][x]);
        if (seen.emplace(proj, r).second) {
            out.cls.rows.push_back(std::move(proj));
            out.origin_row.push_back(r);
        }
    }
    return out;
}

std::optional<int> realizing_row(const HypothesisClass& cls, const LabeledSample& sample) {
    for (int r = 0; r < cls.num_rows(); ++r) {
        bool ok = true;
        for (const auto& [x, y] : sample.pairs) {
            if (cls.is_star(r, x) || cls.value(r, x) != y) {
                ok = false;
                break;
            }
        }
        if (ok) return r;
    }
    return std::nullopt;
}

int erm_row(const HypothesisClass& cls, const LabeledSample& sample) {
    if (cls.num_rows() == 0) throw std::invalid_argument("empty class");
    int best = 0;
    Rat best_err;
    for (int r = 0; r < cls.num_rows(); ++r) {
        Rat total(0);
        for (const auto& [x, y] : sample.pairs) total += (cls.value(r, x) - y).abs();
        if (r == 0 || total < best_err) {
            best = r;
            best_err = total;
        }
    }
    return best;
}

bool union_intersection_check(const std::vector<std::vector<int>>& sets, std::int64_t m) {
    if (sets.size() < 2) throw std::invalid_argument("need k+1 >= 2 sets");
    std::int64_t k = static_cast<std::int64_t>(sets.size()) - 1;
    std::set<int> uni;
    for (const auto& s : sets) {
        if (static_cast<std::int64_t>(s.size()) < m)
            throw std::invalid_argument("set smaller than m");
        uni.insert(s.begin(), s.end());
    }
    std::set<int> inter(sets[0].begin(), sets[0].end());
    for (std::size_t i = 1; i < sets.size(); ++i) {
        std::set<int> cur(sets[i].begin(), sets[i].end());
        std::set<int> next;
        for (int v : inter)
            if (cur.count(v)) next.insert(v);
        inter = std::move(next);
    }
    std::int64_t lhs = static_cast<std::int64_t>(uni.size() + inter.size());
    return k * lhs >= (k + 1) * m;
}

bool union_intersection_prob_check(const std::vector<std::vector<int>>& events,
                                   const std::vector<Rat>& atom_masses, const Rat& c) {
    if (events.size() < 2) throw std::invalid_argument("need k+1 >= 2 events");
    std::int64_t k = static_cast<std::int64_t>(events.size()) - 1;
    auto mass_of = [&](const std::set<int>& s) {
        Rat total(0);
        for (int a : s) {
            if (a < 0 || a >= static_cast<int>(atom_masses.size()))
                throw std::out_of_range("event atom out of range");
            total += atom_masses[a];
        }
        return total;
    };
    std::set<int> uni;
    std::set<int> inter(events[0].begin(), events[0].end());
    for (const auto& ev : events) {
        std::set<int> cur(ev.begin(), ev.end());
        if (mass_of(cur) <= c) throw std::invalid_argument("event mass not above c");
        uni.insert(cur.begin(), cur.end());
        std::set<int> next;
        for (int v : inter)
            if (cur.count(v)) next.insert(v);
        inter = std::move(next);
    }
    Rat lhs = mass_of(uni) + mass_of(inter);
    return Rat(k) * lhs > Rat(k + 1) * c;
}

void require_grid_compatible(const Rat& scale, std::int64_t resolution) {
    if (scale.num <= 0 || scale >= Rat(1))
        throw std::invalid_argument("scale must lie in (0,1)");
    // lcm of the scale lattice and the class grid must stay representable
    std::int64_t l = checked_lcm(2 * resolution, scale.den);
    if (l > (std::int64_t{1} << 40))
        throw std::invalid_argument("scale/grid lattice exceeds desk scale");
}

}  // namespace listreg

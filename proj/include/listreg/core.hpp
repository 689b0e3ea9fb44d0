#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "listreg/rat.hpp"
#include "listreg/rng.hpp"

namespace listreg {

// Sentinel for an undefined entry in a partial hypothesis class.
constexpr std::int64_t kStar = -1;

enum class ClassKind { Total, Partial };

// Finite hypothesis class over domain points 0..n-1. Every defined label is
// an exact grid value entry/Q in [0,1]; partial classes may hold the star
// sentinel. All predicates downstream compare these values exactly.
struct HypothesisClass {
    int domain_size = 0;
    std::int64_t resolution = 1;  // shared denominator Q
    ClassKind kind = ClassKind::Total;
    std::vector<std::vector<std::int64_t>> rows;  // numerators over Q, or kStar

    int num_rows() const { return static_cast<int>(rows.size()); }
    bool is_star(int r, int x) const { return rows[r][x] == kStar; }
    Rat value(int r, int x) const { return Rat(rows[r][x], resolution); }

    void validate() const;
};

// Sorted duplicate-free list of at most k candidate labels.
struct LabelList {
    std::vector<Rat> values;

    LabelList() = default;
    explicit LabelList(std::vector<Rat> vs);

    bool empty() const { return values.empty(); }
    std::size_t size() const { return values.size(); }
    bool contains(const Rat& y) const;
    std::string str() const;
};

struct LabeledSample {
    // (domain index, label) pairs; labels exact rationals
    std::vector<std::pair<int, Rat>> pairs;

    std::size_t size() const { return pairs.size(); }
};

// Finite-support distribution over (domain point, label) with exact masses.
struct FiniteDistribution {
    struct Atom {
        int x;
        Rat y;
        Rat mass;
    };
    std::vector<Atom> support;

    void validate() const;  // masses >= 0 and sum exactly 1
    // Exact inverse-CDF draw on the common-denominator integer lattice.
    std::pair<int, Rat> sample(Rng& rng) const;
    LabeledSample draw(int n, Rng& rng) const;
};

// min_j |mu_j - y|, exactly.
Rat abs_list_loss(const LabelList& mu, const Rat& y);

// whether the list gamma-contains y: abs_list_loss(mu, y) <= gamma.
bool gamma_contains(const LabelList& mu, const Rat& y, const Rat& gamma);

using ListPredictor = std::function<LabelList(int)>;

Rat empirical_error(const ListPredictor& predictor, const LabeledSample& sample);
Rat population_error(const ListPredictor& predictor, const FiniteDistribution& dist);

// Replaces every entry by alpha*floor(entry/alpha). alpha must be a positive
// grid-compatible rational; the output stays on the same resolution grid.
HypothesisClass discretize_class(const HypothesisClass& cls, const Rat& alpha);

struct RestrictedClass {
    HypothesisClass cls;               // deduplicated projection
    std::vector<int> origin_row;       // lowest original row index per projected row
};

RestrictedClass restrict(const HypothesisClass& cls, const std::vector<int>& points);

// True iff some row matches every labeled pair exactly; returns the first
// such row index.
std::optional<int> realizing_row(const HypothesisClass& cls, const LabeledSample& sample);

// Exact empirical risk minimizer over a finite total class, ties broken by
// lowest row index.
int erm_row(const HypothesisClass& cls, const LabeledSample& sample);

// |union S_i| + |intersection S_i| >= ((k+1)/k) * m for k+1 sets of size >= m
// (sets as sorted unique int vectors, k = sets.size()-1). Precondition
// violations throw rather than returning false.
bool union_intersection_check(const std::vector<std::vector<int>>& sets, std::int64_t m);

// Probability-space variant: events as index sets into the atom masses.
// Requires Pr[A_i] > c for all i; checks Pr[union] + Pr[intersection] > ((k+1)/k) c.
bool union_intersection_prob_check(const std::vector<std::vector<int>>& events,
                                   const std::vector<Rat>& atom_masses, const Rat& c);

// gamma (or alpha) must be a positive rational < 1 whose combined lattice with
// the class grid stays within desk-scale bounds; throws otherwise.
void require_grid_compatible(const Rat& scale, std::int64_t resolution);

}  // namespace listreg

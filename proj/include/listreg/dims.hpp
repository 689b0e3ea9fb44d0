#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "listreg/core.hpp"

namespace listreg {

// Hard instance-size guards for the exhaustive searches; breaching any of
// them raises an "exceeds desk scale" error instead of running forever.
struct DimCaps {
    int max_points = 16;
    int max_rows = 5000;
    int max_sequence = 8;
    std::int64_t max_anchor_signatures = 200000;
    std::int64_t max_search_nodes = 50'000'000;
};

struct ShatterWitness {
    std::vector<int> points;                      // shattered domain indices
    std::vector<std::vector<Rat>> anchors;        // per point, k (or k+1) anchor values
    std::map<std::vector<int>, int> assignment;   // pattern b -> realizing row
};

struct DimResult {
    int dimension = 0;
    ShatterWitness witness;
};

// Largest sequence admitting margin-pattern shattering with k anchors per
// point, anchors drawn from the lattice generated by the class grid and
// gamma. For k=1 this coincides with the classical scale-sensitive notion.
DimResult fat_dim(const HypothesisClass& cls, const Rat& gamma, int k,
                  const DimCaps& caps = {});

// Equality variant: k+1 anchors per point, each pattern realized by a row
// agreeing with the chosen anchor exactly. Anchors range over label values
// present in the class.
DimResult strong_fat_dim(const HypothesisClass& cls, const Rat& gamma, int k,
                         const DimCaps& caps = {});

// Product shattering of a partial multiclass class: per point a (k+1)-subset
// of its defined labels such that every pattern is realized exactly.
DimResult k_natarajan_dim(const HypothesisClass& cls, int k, const DimCaps& caps = {});

// Independent replay of the definitions against a reported witness.
bool verify_fat_witness(const HypothesisClass& cls, const Rat& gamma, int k,
                        const ShatterWitness& w);
bool verify_strong_fat_witness(const HypothesisClass& cls, const Rat& gamma, int k,
                               const ShatterWitness& w);
bool verify_natarajan_witness(const HypothesisClass& cls, int k, const ShatterWitness& w);

struct PackingWitness {
    std::vector<int> rows;  // indices into the (deduplicated) class
    // for each (k+1)-subset of `rows` (by position), a point where all
    // pairwise gaps are >= 2 gamma
    std::map<std::vector<int>, int> separating_point;
};

struct PackingResult {
    int number = 0;
    PackingWitness witness;
};

// Exact k-ary packing number via branch and bound over row subsets.
PackingResult k_ary_packing(const HypothesisClass& cls, const Rat& gamma, int k,
                            const DimCaps& caps = {});

bool verify_packing_witness(const HypothesisClass& cls, const Rat& gamma, int k,
                            const PackingWitness& w);

struct SandwichReport {
    int packing = 0;
    int strong_dim = 0;
    int fat_dim = 0;
    std::string upper_bound;  // decimal rendering, possibly saturated
    std::string lower_bound;
    bool upper_holds = false;
    bool lower_holds = false;
    bool pass = false;
};

// Checks packing < (k+1) * [(k+1) B^{k+1} n]^{ceil(log_{(k+1)/k} y)} with
// y = sum_{i<=d_strong} C(n,i) C(B,k+1)^i, and
// packing >= floor(((k+1)/3) exp(d_fat (k+1)!/(k+1)^{k+2})).
SandwichReport packing_sandwich_check(const HypothesisClass& cls, const Rat& gamma, int k,
                                      const DimCaps& caps = {});

}  // namespace listreg

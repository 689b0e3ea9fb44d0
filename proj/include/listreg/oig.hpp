#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "listreg/core.hpp"

namespace listreg {

struct OigCaps {
    int max_vertices = 6000;
    int max_directions = 2048;
    std::int64_t max_cells = 2'000'000;  // vertices x directions
    std::int64_t max_edge_candidates = 4000;
    std::int64_t max_search_nodes = 30'000'000;
    int subgraph_enum_vertices = 14;  // induced-subgraph sweep limit in koig_dim
};

// One-inclusion hypergraph of a finite total class: vertices are the distinct
// rows, and the edge in direction i through v collects every row agreeing
// with v outside i. Values are integer numerators over `den`.
struct OneInclusionGraph {
    int directions = 0;
    std::int64_t den = 1;
    std::vector<std::vector<std::int64_t>> vertices;
    struct Edge {
        int direction = 0;
        std::vector<int> members;  // vertex ids, ascending
    };
    std::vector<Edge> edges;                  // sorted by (direction, off-pattern)
    std::vector<std::vector<int>> edge_of;    // [vertex][direction] -> edge id
};

OneInclusionGraph build_oig(const HypothesisClass& restricted);

// edge id -> oriented vertex ids (at most k, each a member of the edge)
using KListOrientation = std::vector<std::vector<int>>;

// Number of directions whose oriented list misses v's value by more than gamma.
int k_outdeg(const OneInclusionGraph& g, int vertex, const KListOrientation& sigma,
             const Rat& gamma);

struct OrientationResult {
    KListOrientation sigma;
    int max_outdeg = 0;
    bool optimal = false;  // greedy mode reports its certified value only
};

enum class OrientMode { Exact, Greedy };

// Minimum achievable maximum scaled k-outdegree. Exact mode proves
// optimality by branch and bound over per-edge candidate lists (restricted to
// maximal gamma-coverage value subsets) and breaks ties among optimal
// orientations lexicographically by edge order then vertex ids.
OrientationResult min_max_k_outdeg(const OneInclusionGraph& g, const Rat& gamma, int k,
                                   OrientMode mode, const OigCaps& caps = {});

// Decision form: is there an orientation with max k-outdegree <= bound?
bool orientation_decision(const OneInclusionGraph& g, const Rat& gamma, int k, int bound,
                          const OigCaps& caps = {});

enum class OigThresholdRule { Auto, StrictThird, General };

struct KoigResult {
    int dimension = 0;
    std::vector<int> witness_points;
    std::vector<int> witness_vertices;  // vertex subset of the witnessing subgraph
    bool exact_up_to_n_max = true;      // false when a size cap truncated the search
    std::string note;
};

// Largest n <= n_max admitting a projection and a vertex-induced subgraph on
// which every k-list orientation leaves a vertex with k-outdegree over the
// threshold (strictly above n/3 for k=1, at least n/(2(k+1)) otherwise).
KoigResult koig_dim(const HypothesisClass& cls, const Rat& gamma, int k, int n_max,
                    OigThresholdRule rule = OigThresholdRule::Auto, const OigCaps& caps = {});

// Vertex-induced subgraph (edges restricted to the kept vertices).
OneInclusionGraph induced_subgraph(const OneInclusionGraph& g, const std::vector<int>& keep);

}  // namespace listreg

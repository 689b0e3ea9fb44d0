#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "listreg/core.hpp"
#include "listreg/json_io.hpp"
#include "listreg/oig.hpp"
#include "listreg/rng.hpp"

namespace listreg {

constexpr int kStarLabel = -1;

struct LearnerCaps {
    std::int64_t max_thresholds = 100000;
    std::int64_t max_extended_points = 2'000'000;
    std::int64_t max_indexing_functions = 2'000'000;
    std::int64_t max_candidates = 200000;
    OigCaps oig;
};

// Threshold grid D_gamma = {0, gamma, ..., gamma*floor(1/gamma)} and the set
// of strictly increasing k-tuples over it.
struct ThresholdSet {
    Rat gamma;
    int k = 1;
    std::vector<Rat> grid;
    std::vector<std::vector<int>> tuples;  // ascending index tuples into grid

    static ThresholdSet build(const Rat& gamma, int k, const LearnerCaps& caps = {});
    std::size_t count() const { return tuples.size(); }
    Rat component(std::size_t t, int j) const {
        return grid[static_cast<std::size_t>(tuples[t][static_cast<std::size_t>(j)])];
    }
    std::vector<Rat> tuple_values(std::size_t t) const;
    // C(floor(1/gamma), k-1), the scaled-sum normalizer
    std::int64_t scale_binom() const;
};

// Piecewise threshold label of y against tau: 0 below the first component,
// i between components i and i+1, k above the last, star inside the open
// gamma/2 band around any component. Boundaries are inclusive.
int thr_operator(const Rat& y, const std::vector<Rat>& tau, const Rat& gamma);

// |{i : a > tau_i}|
int classifier_count(const Rat& a, const std::vector<Rat>& tau);

// min(1, gamma * C(floor(1/gamma), k-1)^{-1} * sum of values over all tuples)
Rat scaled_sum(const std::vector<int>& value_per_tuple, const ThresholdSet& ts);

// tuple indices whose components all sit at least gamma/2 away from a
std::vector<int> separated_set(const Rat& a, const ThresholdSet& ts);

struct ThresholdClassInstance {
    HypothesisClass base;
    Rat gamma;
    int k = 1;
    ThresholdSet taus;
    HypothesisClass partial;  // rows over extended domain, labels 0..k or star

    int extended_point(int x, int t) const { return x * static_cast<int>(taus.count()) + t; }
    std::pair<int, int> decode(int e) const {
        int c = static_cast<int>(taus.count());
        return {e / c, e % c};
    }
};

ThresholdClassInstance build_threshold_class(const HypothesisClass& cls, const Rat& gamma, int k,
                                             const LearnerCaps& caps = {});

// k most frequent labels among the lists, ties favoring the smaller label;
// result sorted ascending.
std::vector<int> topk_aggregate(const std::vector<std::vector<int>>& lists, int k);

enum class MergeMode { Exhaustive, Candidate };

// The list-merging procedure: admit every scaled sum that some indexing
// function and nearby consistent center certify, then return at most k
// admitted points covering all of them within radius r.
LabelList merge_lists(const std::vector<std::vector<int>>& J, const ThresholdSet& ts,
                      const Rat& r, MergeMode mode, const LearnerCaps& caps = {},
                      std::int64_t extra_lattice_den = 1);

// ----- minimax game over {0,1} payoffs (rows minimize, columns maximize) ---

struct GameSolution {
    std::vector<Rat> strategy;  // row mixed strategy, exact masses summing to 1
    Rat value;                  // certified: exact max over columns of strategy^T M
    Rat lower_bound;            // exact min over rows against the dual column mix
    std::vector<Rat> column_mix;
    int rounds = 0;
    bool meets_target = false;
};

// Multiplicative-weights self-play with an exact certificate recomputed from
// the matrix each round; stops once the certified value beats the target (or
// the duality gap closes within tol for tight solves).
GameSolution solve_game(const std::vector<std::vector<int>>& payoff, const Rat& target,
                        const Rat& tol = Rat(1, 1000000), int max_rounds = 200000);

// Support-enumeration oracle: exact value of small games.
Rat exact_game_value(const std::vector<std::vector<int>>& payoff);

// Draws l i.i.d. row indices from a certified mixed strategy and verifies the
// simultaneous containment condition through the supplied callback, retrying
// with derived seeds up to the cap. Throws with diagnostics on exhaustion.
std::vector<int> select_subsequences(const std::vector<Rat>& strategy, std::int64_t l,
                                     const Rng& seed_root, int retry_cap,
                                     const std::function<bool(const std::vector<int>&)>& verify,
                                     int* attempts_out = nullptr);

// ----- weak learners -------------------------------------------------------

// Labels predicted for `query` by orienting the one-inclusion graph of the
// total completions of the partial class on the sample's points. Falls back
// to {0..k-1} when no completion exists.
std::vector<int> weak_learner_partial(const ThresholdClassInstance& inst,
                                      const std::vector<std::pair<int, int>>& sample,
                                      int query, const LearnerCaps& caps = {});

// Real-valued variant: projects the class onto the sample points plus the
// query and orients at scale gamma.
LabelList weak_learner_real(const HypothesisClass& cls, const LabeledSample& sample, int query,
                            const Rat& gamma, int k, const LearnerCaps& caps = {});

// ----- pipelines ------------------------------------------------------------

struct PipelineParams {
    Rat gamma{1, 4};
    int k = 1;
    std::uint64_t seed = 1;
    std::optional<std::int64_t> m_override;
    std::optional<std::int64_t> l_override;
    std::optional<Rat> r_override;
    std::optional<int> n0_override;  // oig pipeline subsequence size
    double constant_scale = 1.0;     // multiplier applied to the default m and l
    int retry_cap = 64;
    int pool_growth_rounds = 16;
    int pool_batch = 8;
    int game_max_rounds = 60000;
};

struct CompressionEntry {
    int x = 0;                 // domain point of the stored example
    std::int64_t y_num = 0;    // label numerator over the class resolution
    int tau_index = -1;        // threshold tuple, -1 for the oig pipeline
    std::int64_t multiplicity = 1;
};

struct CompressionRecord {
    std::string mode;  // "realizable" | "agnostic" | "oig"
    Rat gamma;
    int k = 1;
    Rat radius{0};
    std::int64_t resolution = 1;
    std::vector<std::vector<CompressionEntry>> subsequences;

    std::int64_t example_count() const;  // with multiplicity
    std::int64_t side_bits() const;
    std::int64_t size() const { return example_count() + side_bits(); }
};

struct PipelineResult {
    std::vector<LabelList> hypothesis;  // per domain point
    Rat training_error{0};
    CompressionRecord record;
    Json report;
};

PipelineResult reg_realizable(const LabeledSample& sample, const HypothesisClass& cls,
                              const PipelineParams& params, const LearnerCaps& caps = {});

PipelineResult reg_agnostic(const LabeledSample& sample, const HypothesisClass& cls,
                            const PipelineParams& params, const LearnerCaps& caps = {});

PipelineResult realizable_oig_pipeline(const LabeledSample& sample, const HypothesisClass& cls,
                                       const PipelineParams& params,
                                       const LearnerCaps& caps = {});

// Pure reconstruction from a compression record (plus the class, gamma and k
// known to the decoder); reproduces the pipeline hypothesis exactly.
std::vector<LabelList> reconstruct_hypothesis(const CompressionRecord& record,
                                              const HypothesisClass& cls,
                                              const LearnerCaps& caps = {});

// quantile aggregation used by the oig pipeline: indices ceil(jN/(k+1))
LabelList quantile_aggregate(const std::vector<LabelList>& lists, int k);

}  // namespace listreg

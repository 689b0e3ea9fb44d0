#pragma once

#include <string>
#include <vector>

#include "listreg/compression.hpp"
#include "listreg/core.hpp"
#include "listreg/dims.hpp"
#include "listreg/json_io.hpp"
#include "listreg/learner.hpp"

namespace listreg {

// First three points range over {0.1,0.2,0.3}, later points over {0.1,0.2};
// the full product class on resolution 10.
HypothesisClass build_example1(int n);

// All (b,c) in {0,1}^n x {0,1}^n with value c_i/2 + 3 b_i/8 + (1/16) sum_{j<=n} 2^{-j} b_j
// on resolution 2^{n+4}.
HypothesisClass build_example2(int n);

// Uniform distribution over a strongly shattered sequence labeled by the
// pattern's realizing hypothesis.
FiniteDistribution build_db_distribution(const HypothesisClass& cls, const ShatterWitness& witness,
                                         const std::vector<int>& pattern);

// Mass 1 - 24(k+1)sqrt(eps) on (x_0, v_0), remainder uniform on the other
// points; eps must be an exact rational square.
FiniteDistribution build_pv_distribution(const std::vector<Rat>& vertex_labels, const Rat& eps,
                                         int k);

// Average distance from mu to k+1 pairwise 2gamma-separated labels is at
// least 2gamma/(k+1); violated separation throws.
bool pigeonhole_error_check(const LabelList& mu, const std::vector<Rat>& labels, const Rat& gamma);

// Random total class on at most `max_labels` distinct grid values.
HypothesisClass random_grid_class(Rng& rng, int n, int rows, int max_labels, std::int64_t q);

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Property suite mirroring the per-module invariants at desk scale; the
// filter keeps checks whose name contains it.
std::vector<CheckResult> verify_suite(const std::string& filter = "");

struct ExperimentConfig {
    Json raw;  // echoed into the report

    std::string builder = "example1";
    int builder_n = 4;
    std::string class_file;  // overrides builder when nonempty
    std::string mode = "realizable";
    Rat gamma{1, 20};
    int k = 2;
    std::vector<int> sizes{20};
    int trials = 1;
    std::uint64_t seed = 1;
    std::vector<Rat> marginal;  // per-point masses; empty = uniform
    PipelineParams params;

    static ExperimentConfig from_json(const Json& j);
};

struct ExperimentReport {
    Json json;
    std::string csv;  // n,trial,train_error,test_error
};

// Seeded end-to-end runs: per trial draw a target hypothesis and a sample,
// train, and measure exact train/test errors. Deterministic in (config, seed).
ExperimentReport run_experiment(const ExperimentConfig& config);

}  // namespace listreg

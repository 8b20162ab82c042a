#pragma once

// Experiment harness over synthetic worlds: assigns reporting strategies to
// raters, scores the resulting ratings under a chosen mechanism, and
// aggregates per-strategy means with standard errors across replications.

#include <cstdint>
#include <string>
#include <vector>

#include "peertruth/forest.hpp"
#include "peertruth/ledger.hpp"
#include "peertruth/mechanism.hpp"
#include "peertruth/rng.hpp"
#include "peertruth/world.hpp"

namespace peertruth {

struct StrategySpec {
    enum class Kind { truthful, constant, descriptor_map, noisy };

    Kind kind = Kind::truthful;
    std::string constant_label;        // constant / descriptor_map(constant)
    double gamma = 0.0;                // noisy: probability of a uniform label
    std::string map_rule = "feature";  // descriptor_map: feature | sum | constant
    int map_feature = 0;

    std::string name() const;

    static StrategySpec truthful();
    static StrategySpec constant(std::string label);
    static StrategySpec noisy(double gamma);
    static StrategySpec descriptor_keyed(int feature);
    static StrategySpec descriptor_sum();
};

// Label reported by a strategy holder who observed `signal` on an item with
// the given descriptors. Returns a label index.
int apply_strategy_label(const StrategySpec& spec, int signal, const DescriptorVector& d,
                         const LabelSet& labels, Rng& rng);

// Probability reported under the quadratic mechanism.
double apply_strategy_probability(const StrategySpec& spec, const WorldConfig& world,
                                  int signal, const DescriptorVector& d);

struct StrategyAssignment {
    std::vector<StrategySpec> specs;  // rater r plays specs[r % specs.size()]

    const StrategySpec& of(int rater) const { return specs[rater % specs.size()]; }
    static StrategyAssignment all(StrategySpec spec) { return {{std::move(spec)}}; }
};

struct StrategyStat {
    MechanismKind mechanism = MechanismKind::original;
    std::string strategy;
    long corpus_size = 0;  // ratings per replication
    double mean = 0.0;
    double stderr_ = 0.0;  // across replication means
    int reps = 0;
    long samples = 0;  // scored ratings aggregated
};

struct CurvePoint {
    long corpus_size = 0;
    double mean_score = 0.0;
    double mean_abs_score = 0.0;
    double stderr_abs = 0.0;
    int reps = 0;
};

struct CorrelationResult {
    double value = 0.0;
    bool degenerate = false;  // zero variance on either side
};

struct ExperimentParams {
    ScoreParams score;
    double epsilon = 0.05;
    ForestConfig forest;
    Weights weights = Weights::defaults();
    int replications = 50;
    int threads = 0;
};

struct ExperimentResult {
    std::vector<StrategyStat> rows;
    std::vector<CurvePoint> curve;
    CorrelationResult correlation;
};

// Simulates rating submission under the assignment, scores with the chosen
// mechanism and aggregates per strategy. Worlds hosting truthful or noisy
// strategies must pass check_self_predicting. Deterministic in
// (world.seed, assignment, params).
ExperimentResult run_experiment(const WorldConfig& world, const StrategyAssignment& assignment,
                                MechanismKind mechanism, const ExperimentParams& params);

// Mean |score| of one strategy adopted by all raters at increasing corpus
// sizes, retraining the benchmark forest at every size.
ExperimentResult convergence_curve(const WorldConfig& world, const StrategySpec& strategy,
                                   MechanismKind mechanism, const std::vector<long>& schedule,
                                   const ExperimentParams& params);

// Spearman rank correlation with average ranks on ties.
CorrelationResult spearman_rank_correlation(const std::vector<double>& x,
                                            const std::vector<double>& y);

}  // namespace peertruth

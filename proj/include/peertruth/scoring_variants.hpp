#pragma once

// Two alternatives to frequency-based accuracy scoring:
//   - the augmented score replaces sampled frequencies with a regularized
//     model estimate Q~(x, D), so descriptor-keyed strategies stop paying;
//   - the quadratic rule scores probabilistic forecasts of a verifiable
//     binary success event against a benchmark forecast.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "peertruth/errors.hpp"
#include "peertruth/forest.hpp"
#include "peertruth/labels.hpp"
#include "peertruth/mechanism.hpp"
#include "peertruth/rating_log.hpp"

namespace peertruth {

struct ProbabilisticRating {
    std::string rater;
    std::string item;
    double p = 0.5;  // reported probability of the item's success event
};

struct SuccessEvent {
    std::string item;
    std::string id;
    std::string description;       // verifiable binary predicate
    std::optional<int> outcome;    // {0,1}; immutable once set
    std::int64_t resolution_time = 0;
};

enum class BenchmarkMode { community_average, algorithmic, constant };

struct BenchmarkPrediction {
    double p_b = 0.5;
    BenchmarkMode source = BenchmarkMode::constant;
};

// Match pays alpha * (1/Q~(r_w) - 1); mismatch pays -alpha; absent peer
// scores 0. q_tilde must come from regularize() and be indexed by labels.
double augmented_score(const std::string& r_w, const std::optional<std::string>& r_p,
                       const std::vector<double>& q_tilde, const LabelSet& labels,
                       double alpha);

// Same per-channel iteration as score_item_ratings, with Q~ in place of the
// sampled frequency. q_tilde is the clamped label distribution predicted for
// the scored item's descriptors.
std::map<std::string, AccuracyScore> score_item_ratings_augmented(
    const RatingLog& log, const std::string& item_k, const std::string& question,
    const std::vector<double>& q_tilde, const LabelSet& labels, const ScoreParams& params,
    std::uint64_t seed);

// 1 - 2*(o - p)^2, in [-1, 1].
double quadratic_score(double p, int outcome);

// S(p_i, o) - S(p_b, o). Throws UnresolvedEvent when the outcome is unset.
double quadratic_accuracy(double p_i, double p_b, std::optional<int> outcome);

// Arithmetic mean of the other raters' probability reports. Throws
// NoBenchmarkData when nobody else reported.
BenchmarkPrediction community_benchmark(const std::vector<ProbabilisticRating>& community,
                                        const std::string& exclude_rater);

// Forest-predicted success probability from public descriptors. The forest
// must be a two-label model over {failure, success}.
BenchmarkPrediction algorithmic_benchmark(const Forest& outcome_model,
                                          const DescriptorVector& d);

// Constant 0.5: the flat prediction used when no other signal exists.
BenchmarkPrediction constant_benchmark();

}  // namespace peertruth

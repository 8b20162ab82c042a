#pragma once

// Synthetic rating environment: items carry a latent quality state drawn from
// a prior, emit categorical descriptors conditioned on that state, and each
// assigned rater observes a private signal through a confusion matrix.

#include <cstdint>
#include <string>
#include <vector>

#include "peertruth/descriptors.hpp"
#include "peertruth/errors.hpp"
#include "peertruth/labels.hpp"

namespace peertruth {

struct WorldConfig {
    LabelSet labels = LabelSet::use();
    std::vector<double> prior;  // over latent states; strictly positive, sums to 1
    // confusion[t][s] = P(signal s | state t); rows strictly positive, sum to 1
    std::vector<std::vector<double>> confusion;
    // descriptor_emissions[f][t][v] = P(feature f takes value v | state t)
    std::vector<std::vector<std::vector<double>>> descriptor_emissions;
    // P(success event | state t); used by the quadratic mechanism
    std::vector<double> success_prob_by_state;
    int item_count = 500;
    int rater_count = 25;
    int ratings_per_item = 5;
    std::uint64_t seed = 0;

    std::size_t state_count() const { return prior.size(); }
    DescriptorSchema schema() const;
    void validate() const;

    // m=3 labels, 3 latent states, uniform prior, confusion diagonal 0.7,
    // two 3-valued categorical descriptors with emission accuracy 0.8.
    static WorldConfig default_world();
};

// Margins of the self-predicting condition, overall and per descriptor cell:
// margin(x) = P(peer=x | me=x) - max_{y != x} P(peer=x | me=y), computed by
// Bayes from the prior (or the cell posterior) and the confusion matrix. The
// condition holds iff every margin is strictly positive.
struct SelfPredictingReport {
    struct Cell {
        std::vector<int> cell;  // descriptor feature values; empty = overall
        std::vector<double> margins;
        bool holds = false;
    };
    Cell overall;
    std::vector<Cell> per_cell;
    bool holds = false;
};

SelfPredictingReport check_self_predicting(const WorldConfig& world);

struct SimItem {
    std::string id;
    int state = 0;
    DescriptorVector descriptors;
    int outcome = 0;             // realized success event
    std::vector<int> raters;     // indices into the rater pool
    std::vector<int> signals;    // parallel to raters
};

struct SimWorld {
    std::vector<SimItem> items;
};

// Items i.i.d. from the prior; descriptors and signals drawn conditionally.
// Deterministic in config.seed.
SimWorld generate_world(const WorldConfig& config);

// P(signal | state) posterior over states for one observed signal.
std::vector<double> state_posterior(const WorldConfig& world, int signal);

// Marginal P(label = x) implied by truthful reporting.
std::vector<double> marginal_signal_distribution(const WorldConfig& world);

// P(success | signal): the truthful probabilistic report in quadratic worlds.
double success_posterior(const WorldConfig& world, int signal);

}  // namespace peertruth

#include "peertruth/world.hpp"

#include <algorithm>
#include <cmath>

#include "peertruth/rng.hpp"

namespace peertruth {

namespace {

void check_distribution(const std::vector<double>& p, const char* what,
                        bool strictly_positive) {
    if (p.empty()) throw ConfigError(std::string(what) + " is empty");
    double sum = 0.0;
    for (double v : p) {
        if (strictly_positive ? !(v > 0.0) : !(v >= 0.0)) {
            throw ConfigError(std::string(what) + (strictly_positive
                                                       ? " must be strictly positive everywhere"
                                                       : " must be nonnegative"));
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ConfigError(std::string(what) + " must sum to 1");
    }
}

// Self-predicting margins for an arbitrary prior over states.
SelfPredictingReport::Cell margins_for_prior(const WorldConfig& world,
                                             const std::vector<double>& prior,
                                             std::vector<int> cell) {
    const std::size_t m = world.labels.size();
    const std::size_t states = world.state_count();

    // peer_given_me[x][y] = P(peer reports y | my signal is x), truthful peers
    std::vector<std::vector<double>> peer_given_me(m, std::vector<double>(m, 0.0));
    for (std::size_t x = 0; x < m; ++x) {
        double z = 0.0;
        std::vector<double> posterior(states, 0.0);
        for (std::size_t t = 0; t < states; ++t) {
            posterior[t] = prior[t] * world.confusion[t][x];
            z += posterior[t];
        }
        for (std::size_t t = 0; t < states; ++t) posterior[t] /= z;
        for (std::size_t y = 0; y < m; ++y) {
            for (std::size_t t = 0; t < states; ++t) {
                peer_given_me[x][y] += posterior[t] * world.confusion[t][y];
            }
        }
    }

    SelfPredictingReport::Cell out;
    out.cell = std::move(cell);
    out.margins.resize(m);
    out.holds = true;
    for (std::size_t x = 0; x < m; ++x) {
        double best_other = 0.0;
        for (std::size_t y = 0; y < m; ++y) {
            if (y == x) continue;
            best_other = std::max(best_other, peer_given_me[y][x]);
        }
        out.margins[x] = peer_given_me[x][x] - best_other;
        out.holds = out.holds && out.margins[x] > 0.0;
    }
    return out;
}

}  // namespace

DescriptorSchema WorldConfig::schema() const {
    DescriptorSchema schema;
    for (const auto& feature : descriptor_emissions) {
        schema.categorical_cardinalities.push_back(
            static_cast<int>(feature.empty() ? 0 : feature[0].size()));
    }
    return schema;
}

void WorldConfig::validate() const {
    // The prior may be degenerate (a point mass); belief channels must stay
    // fully mixed.
    check_distribution(prior, "world prior", /*strictly_positive=*/false);
    if (confusion.size() != prior.size()) {
        throw ConfigError("confusion matrix needs one row per latent state");
    }
    for (const auto& row : confusion) {
        if (row.size() != labels.size()) {
            throw ConfigError("confusion rows must have one entry per label");
        }
        check_distribution(row, "confusion row", /*strictly_positive=*/true);
    }
    for (const auto& feature : descriptor_emissions) {
        if (feature.size() != prior.size()) {
            throw ConfigError("descriptor emissions need one row per latent state");
        }
        const std::size_t values = feature[0].size();
        for (const auto& row : feature) {
            if (row.size() != values) {
                throw ConfigError("descriptor emission rows must agree on value count");
            }
            check_distribution(row, "descriptor emission row", /*strictly_positive=*/true);
        }
    }
    if (!success_prob_by_state.empty()) {
        if (success_prob_by_state.size() != prior.size()) {
            throw ConfigError("success probabilities need one entry per latent state");
        }
        for (double p : success_prob_by_state) {
            if (!(p >= 0.0 && p <= 1.0)) {
                throw ConfigError("success probabilities must lie in [0, 1]");
            }
        }
    }
    if (item_count < 1) throw ConfigError("item_count must be >= 1");
    if (rater_count < 1) throw ConfigError("rater_count must be >= 1");
    if (ratings_per_item < 1 || ratings_per_item > rater_count) {
        throw ConfigError("ratings_per_item must lie in [1, rater_count]");
    }
}

WorldConfig WorldConfig::default_world() {
    WorldConfig world;
    world.prior = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    world.confusion = {{0.7, 0.15, 0.15}, {0.15, 0.7, 0.15}, {0.15, 0.15, 0.7}};
    const std::vector<std::vector<double>> emission = {
        {0.8, 0.1, 0.1}, {0.1, 0.8, 0.1}, {0.1, 0.1, 0.8}};
    world.descriptor_emissions = {emission, emission};
    world.success_prob_by_state = {0.25, 0.5, 0.75};
    return world;
}

SelfPredictingReport check_self_predicting(const WorldConfig& world) {
    world.validate();
    SelfPredictingReport report;
    report.overall = margins_for_prior(world, world.prior, {});
    report.holds = report.overall.holds;

    // Every descriptor cell induces a posterior over states; the condition
    // must hold within each cell for descriptor-based partitions.
    std::vector<int> cell(world.descriptor_emissions.size(), 0);
    const auto cell_count = [&] {
        std::size_t n = 1;
        for (const auto& feature : world.descriptor_emissions) n *= feature[0].size();
        return world.descriptor_emissions.empty() ? 0 : n;
    }();
    for (std::size_t flat = 0; flat < cell_count; ++flat) {
        std::size_t rest = flat;
        for (std::size_t f = 0; f < cell.size(); ++f) {
            const std::size_t values = world.descriptor_emissions[f][0].size();
            cell[f] = static_cast<int>(rest % values);
            rest /= values;
        }
        std::vector<double> posterior(world.state_count(), 0.0);
        double z = 0.0;
        for (std::size_t t = 0; t < world.state_count(); ++t) {
            double likelihood = world.prior[t];
            for (std::size_t f = 0; f < cell.size(); ++f) {
                likelihood *= world.descriptor_emissions[f][t][cell[f]];
            }
            posterior[t] = likelihood;
            z += likelihood;
        }
        for (double& v : posterior) v /= z;
        report.per_cell.push_back(margins_for_prior(world, posterior, cell));
        report.holds = report.holds && report.per_cell.back().holds;
    }
    return report;
}

SimWorld generate_world(const WorldConfig& config) {
    config.validate();
    SimWorld world;
    world.items.reserve(config.item_count);

    for (int i = 0; i < config.item_count; ++i) {
        Rng rng(derive_seed(config.seed, "item", static_cast<std::uint64_t>(i)));
        SimItem item;
        item.id = "i" + std::to_string(i);
        item.state = static_cast<int>(rng.categorical(config.prior));

        for (const auto& feature : config.descriptor_emissions) {
            item.descriptors.categorical.push_back(
                static_cast<int>(rng.categorical(feature[item.state])));
        }
        if (!config.success_prob_by_state.empty()) {
            item.outcome = rng.bernoulli(config.success_prob_by_state[item.state]) ? 1 : 0;
        }

        const auto chosen = rng.sample_indices(config.rater_count, config.ratings_per_item);
        for (std::size_t r : chosen) {
            item.raters.push_back(static_cast<int>(r));
            item.signals.push_back(static_cast<int>(rng.categorical(config.confusion[item.state])));
        }
        world.items.push_back(std::move(item));
    }
    return world;
}

std::vector<double> state_posterior(const WorldConfig& world, int signal) {
    std::vector<double> posterior(world.state_count(), 0.0);
    double z = 0.0;
    for (std::size_t t = 0; t < world.state_count(); ++t) {
        posterior[t] = world.prior[t] * world.confusion[t][signal];
        z += posterior[t];
    }
    for (double& v : posterior) v /= z;
    return posterior;
}

std::vector<double> marginal_signal_distribution(const WorldConfig& world) {
    std::vector<double> marginal(world.labels.size(), 0.0);
    for (std::size_t t = 0; t < world.state_count(); ++t) {
        for (std::size_t s = 0; s < marginal.size(); ++s) {
            marginal[s] += world.prior[t] * world.confusion[t][s];
        }
    }
    return marginal;
}

double success_posterior(const WorldConfig& world, int signal) {
    if (world.success_prob_by_state.empty()) return 0.5;
    const auto posterior = state_posterior(world, signal);
    double p = 0.0;
    for (std::size_t t = 0; t < posterior.size(); ++t) {
        p += posterior[t] * world.success_prob_by_state[t];
    }
    return p;
}

}  // namespace peertruth

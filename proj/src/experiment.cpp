#include "peertruth/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>

#include "peertruth/parallel.hpp"
#include "peertruth/scoring_variants.hpp"

namespace peertruth {

namespace {

std::string format_gamma(double gamma) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", gamma);
    return buf;
}

// Per-replication tallies keyed by strategy name.
struct RepTally {
    std::map<std::string, std::pair<double, long>> by_strategy;  // sum, count
    std::vector<double> item_totals;
    std::vector<double> item_states;
    double score_sum = 0.0;
    double abs_sum = 0.0;
    long count = 0;

    void add(const std::string& strategy, double value) {
        auto& [sum, n] = by_strategy[strategy];
        sum += value;
        n += 1;
        score_sum += value;
        abs_sum += std::abs(value);
        count += 1;
    }
};

struct SimRatings {
    RatingLog log;
    // per item: parallel to world.items; label index per assigned rater
    std::vector<std::vector<int>> labels;
};

SimRatings build_ratings(const SimWorld& world, const WorldConfig& config,
                         const StrategyAssignment& assignment, std::uint64_t rep_seed) {
    SimRatings out;
    out.labels.resize(world.items.size());
    for (std::size_t i = 0; i < world.items.size(); ++i) {
        const SimItem& item = world.items[i];
        for (std::size_t j = 0; j < item.raters.size(); ++j) {
            const int rater = item.raters[j];
            Rng rng(derive_seed(rep_seed, "strategy", item.id, rater));
            const int label = apply_strategy_label(assignment.of(rater), item.signals[j],
                                                   item.descriptors, config.labels, rng);
            out.labels[i].push_back(label);
            out.log.add(RatingEvent{"r" + std::to_string(rater), item.id, "q",
                                    config.labels.name(label), 0});
        }
    }
    return out;
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mean = mean_of(v);
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    return sd / std::sqrt(static_cast<double>(v.size()));
}

void require_self_predicting_if_needed(const WorldConfig& world,
                                       const StrategyAssignment& assignment) {
    bool needed = false;
    for (const auto& spec : assignment.specs) {
        needed = needed || spec.kind == StrategySpec::Kind::truthful ||
                 spec.kind == StrategySpec::Kind::noisy;
    }
    if (!needed) return;
    const auto report = check_self_predicting(world);
    if (!report.holds) {
        throw Error("world does not satisfy the self-predicting condition "
                    "(required for truthful-strategy experiments)");
    }
}

// Scores one replication's corpus and fills the tally.
void score_replication(const WorldConfig& config, const SimWorld& world,
                       const SimRatings& ratings, const StrategyAssignment& assignment,
                       MechanismKind mechanism, const ExperimentParams& params,
                       std::uint64_t rep_seed, RepTally& tally) {
    const std::uint64_t scoring_seed = derive_seed(rep_seed, "score");

    if (mechanism == MechanismKind::quadratic) {
        for (std::size_t i = 0; i < world.items.size(); ++i) {
            const SimItem& item = world.items[i];
            std::vector<double> reports(item.raters.size());
            for (std::size_t j = 0; j < item.raters.size(); ++j) {
                reports[j] = apply_strategy_probability(assignment.of(item.raters[j]), config,
                                                        item.signals[j], item.descriptors);
            }
            for (std::size_t j = 0; j < item.raters.size(); ++j) {
                double p_b = 0.5;
                if (reports.size() > 1) {
                    double sum = 0.0;
                    for (std::size_t k = 0; k < reports.size(); ++k) {
                        if (k != j) sum += reports[k];
                    }
                    p_b = sum / static_cast<double>(reports.size() - 1);
                }
                const double value = quadratic_accuracy(reports[j], p_b, item.outcome);
                tally.add(assignment.of(item.raters[j]).name(), value);
            }
        }
        return;
    }

    Forest forest;
    if (mechanism == MechanismKind::augmented) {
        TrainingSet data;
        data.schema = config.schema();
        data.label_count = config.labels.size();
        for (std::size_t i = 0; i < world.items.size(); ++i) {
            for (int label : ratings.labels[i]) {
                data.rows.push_back(
                    TrainingRow{world.items[i].descriptors, label, world.items[i].id});
            }
        }
        ForestConfig fc = params.forest;
        fc.seed = derive_seed(rep_seed, "forest");
        fc.threads = 1;  // replications already run in parallel
        forest = train_forest(data, fc);
    }

    for (std::size_t i = 0; i < world.items.size(); ++i) {
        const SimItem& item = world.items[i];
        std::map<std::string, AccuracyScore> scores;
        if (mechanism == MechanismKind::augmented) {
            const auto q_tilde =
                regularize(forest.predict_proba(item.descriptors), params.epsilon);
            scores = score_item_ratings_augmented(ratings.log, item.id, "q", q_tilde,
                                                  config.labels, params.score, scoring_seed);
        } else {
            try {
                scores = score_item_ratings(ratings.log, item.id, "q", params.score,
                                            scoring_seed);
            } catch (const InsufficientCorpus&) {
                continue;  // single-item world: nothing to benchmark against
            }
        }
        for (std::size_t j = 0; j < item.raters.size(); ++j) {
            const auto& score = scores.at("r" + std::to_string(item.raters[j]));
            if (score.status == ScoreStatus::pending) continue;
            tally.add(assignment.of(item.raters[j]).name(), score.value);
        }

        std::vector<std::string> label_names;
        for (int label : ratings.labels[i]) label_names.push_back(config.labels.name(label));
        tally.item_totals.push_back(item_rating_total(label_names, params.weights));
        tally.item_states.push_back(static_cast<double>(item.state));
    }
}

}  // namespace

std::string StrategySpec::name() const {
    switch (kind) {
        case Kind::truthful: return "truthful";
        case Kind::constant: return "constant(" + constant_label + ")";
        case Kind::noisy: return "noisy(" + format_gamma(gamma) + ")";
        case Kind::descriptor_map:
            if (map_rule == "sum") return "map(sum)";
            if (map_rule == "constant") return "map(constant)";
            return "map(feature" + std::to_string(map_feature) + ")";
    }
    return "?";
}

StrategySpec StrategySpec::truthful() { return {}; }

StrategySpec StrategySpec::constant(std::string label) {
    StrategySpec s;
    s.kind = Kind::constant;
    s.constant_label = std::move(label);
    return s;
}

StrategySpec StrategySpec::noisy(double gamma) {
    StrategySpec s;
    s.kind = Kind::noisy;
    s.gamma = gamma;
    return s;
}

StrategySpec StrategySpec::descriptor_keyed(int feature) {
    StrategySpec s;
    s.kind = Kind::descriptor_map;
    s.map_rule = "feature";
    s.map_feature = feature;
    return s;
}

StrategySpec StrategySpec::descriptor_sum() {
    StrategySpec s;
    s.kind = Kind::descriptor_map;
    s.map_rule = "sum";
    return s;
}

int apply_strategy_label(const StrategySpec& spec, int signal, const DescriptorVector& d,
                         const LabelSet& labels, Rng& rng) {
    const int m = static_cast<int>(labels.size());
    switch (spec.kind) {
        case StrategySpec::Kind::truthful:
            return signal;
        case StrategySpec::Kind::constant:
            return static_cast<int>(labels.index_of(spec.constant_label));
        case StrategySpec::Kind::noisy:
            if (rng.bernoulli(spec.gamma)) return static_cast<int>(rng.index(m));
            return signal;
        case StrategySpec::Kind::descriptor_map: {
            if (spec.map_rule == "sum") {
                int sum = 0;
                for (int v : d.categorical) sum += v;
                return sum % m;
            }
            if (spec.map_rule == "constant") {
                if (spec.constant_label.empty()) return 0;
                return static_cast<int>(labels.index_of(spec.constant_label));
            }
            return d.categorical.at(spec.map_feature) % m;
        }
    }
    return signal;
}

double apply_strategy_probability(const StrategySpec& spec, const WorldConfig& world,
                                  int signal, const DescriptorVector& d) {
    switch (spec.kind) {
        case StrategySpec::Kind::truthful:
            return success_posterior(world, signal);
        case StrategySpec::Kind::constant:
            return 0.5;
        case StrategySpec::Kind::noisy:
            return (1.0 - spec.gamma) * success_posterior(world, signal) + spec.gamma * 0.5;
        case StrategySpec::Kind::descriptor_map: {
            Rng dummy(0);
            const int label = apply_strategy_label(spec, signal, d, world.labels, dummy);
            return (label + 0.5) / static_cast<double>(world.labels.size());
        }
    }
    return 0.5;
}

ExperimentResult run_experiment(const WorldConfig& world, const StrategyAssignment& assignment,
                                MechanismKind mechanism, const ExperimentParams& params) {
    world.validate();
    params.score.validate();
    if (assignment.specs.empty()) {
        throw ConfigError("strategy assignment must name at least one strategy");
    }
    require_self_predicting_if_needed(world, assignment);

    const int reps = std::max(1, params.replications);
    std::vector<RepTally> tallies(reps);
    parallel_for(reps, params.threads, [&](std::size_t rep) {
        WorldConfig cfg = world;
        cfg.seed = derive_seed(world.seed, "rep", static_cast<std::uint64_t>(rep));
        const SimWorld sim = generate_world(cfg);
        const SimRatings ratings = build_ratings(sim, cfg, assignment, cfg.seed);
        score_replication(cfg, sim, ratings, assignment, mechanism, params, cfg.seed,
                          tallies[rep]);
    });

    // Reduce in replication order so results do not depend on thread timing.
    std::set<std::string> strategy_names;
    for (const auto& spec : assignment.specs) strategy_names.insert(spec.name());

    ExperimentResult result;
    for (const auto& name : strategy_names) {
        std::vector<double> rep_means;
        long samples = 0;
        for (const auto& tally : tallies) {
            auto it = tally.by_strategy.find(name);
            if (it == tally.by_strategy.end() || it->second.second == 0) continue;
            rep_means.push_back(it->second.first / static_cast<double>(it->second.second));
            samples += it->second.second;
        }
        StrategyStat stat;
        stat.mechanism = mechanism;
        stat.strategy = name;
        stat.corpus_size = static_cast<long>(world.item_count) * world.ratings_per_item;
        stat.mean = mean_of(rep_means);
        stat.stderr_ = stderr_of(rep_means);
        stat.reps = static_cast<int>(rep_means.size());
        stat.samples = samples;
        result.rows.push_back(std::move(stat));
    }

    std::vector<double> totals;
    std::vector<double> states;
    for (const auto& tally : tallies) {
        totals.insert(totals.end(), tally.item_totals.begin(), tally.item_totals.end());
        states.insert(states.end(), tally.item_states.begin(), tally.item_states.end());
    }
    result.correlation = spearman_rank_correlation(totals, states);
    return result;
}

ExperimentResult convergence_curve(const WorldConfig& world, const StrategySpec& strategy,
                                   MechanismKind mechanism, const std::vector<long>& schedule,
                                   const ExperimentParams& params) {
    world.validate();
    params.score.validate();
    if (schedule.empty()) throw ConfigError("convergence schedule must not be empty");

    const StrategyAssignment assignment = StrategyAssignment::all(strategy);
    const int reps = std::max(1, params.replications);

    ExperimentResult result;
    for (long target : schedule) {
        const int items =
            std::max<long>(2, (target + world.ratings_per_item - 1) / world.ratings_per_item);
        std::vector<RepTally> tallies(reps);
        parallel_for(reps, params.threads, [&](std::size_t rep) {
            WorldConfig cfg = world;
            cfg.item_count = items;
            cfg.seed = derive_seed(world.seed, "conv", static_cast<std::uint64_t>(target),
                                   static_cast<std::uint64_t>(rep));
            const SimWorld sim = generate_world(cfg);
            const SimRatings ratings = build_ratings(sim, cfg, assignment, cfg.seed);
            score_replication(cfg, sim, ratings, assignment, mechanism, params, cfg.seed,
                              tallies[rep]);
        });

        std::vector<double> rep_means;
        std::vector<double> rep_abs;
        for (const auto& tally : tallies) {
            if (tally.count == 0) continue;
            rep_means.push_back(tally.score_sum / static_cast<double>(tally.count));
            rep_abs.push_back(tally.abs_sum / static_cast<double>(tally.count));
        }
        CurvePoint point;
        point.corpus_size = static_cast<long>(items) * world.ratings_per_item;
        point.mean_score = mean_of(rep_means);
        point.mean_abs_score = mean_of(rep_abs);
        point.stderr_abs = stderr_of(rep_abs);
        point.reps = static_cast<int>(rep_abs.size());
        result.curve.push_back(point);
    }
    return result;
}

CorrelationResult spearman_rank_correlation(const std::vector<double>& x,
                                            const std::vector<double>& y) {
    CorrelationResult result;
    if (x.size() != y.size() || x.size() < 2) {
        result.degenerate = true;
        return result;
    }

    auto ranks = [](const std::vector<double>& v) {
        const std::size_t n = v.size();
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> rank(n, 0.0);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
            const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
            for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
            i = j + 1;
        }
        return rank;
    };

    const auto rx = ranks(x);
    const auto ry = ranks(y);
    const double mx = mean_of(rx);
    const double my = mean_of(ry);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) {
        result.degenerate = true;  // zero variance: correlation reported as 0
        return result;
    }
    result.value = sxy / std::sqrt(sxx * syy);
    return result;
}

}  // namespace peertruth

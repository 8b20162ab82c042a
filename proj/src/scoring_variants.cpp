#include "peertruth/scoring_variants.hpp"

namespace peertruth {

double augmented_score(const std::string& r_w, const std::optional<std::string>& r_p,
                       const std::vector<double>& q_tilde, const LabelSet& labels,
                       double alpha) {
    if (!r_p.has_value()) return 0.0;
    if (*r_p != r_w) return -alpha;
    return alpha * (1.0 / q_tilde.at(labels.index_of(r_w)) - 1.0);
}

std::map<std::string, AccuracyScore> score_item_ratings_augmented(
    const RatingLog& log, const std::string& item_k, const std::string& question,
    const std::vector<double>& q_tilde, const LabelSet& labels, const ScoreParams& params,
    std::uint64_t seed) {
    params.validate();
    std::map<std::string, AccuracyScore> out;
    const auto* channel = log.ratings(item_k, question);
    if (channel == nullptr) return out;

    for (const auto& rating : *channel) {
        AccuracyScore score;
        score.rater = rating.rater;
        score.item = item_k;
        score.question = question;

        int peer_count = 0;
        int peer_matches = 0;
        for (const auto& other : *channel) {
            if (other.rater == rating.rater) continue;
            ++peer_count;
            if (other.label == rating.label) ++peer_matches;
        }
        if (peer_count == 0) {
            out.emplace(rating.rater, std::move(score));
            continue;
        }

        const double denom = q_tilde.at(labels.index_of(rating.label));
        if (params.peer_mode == PeerMode::expectation) {
            const double match_fraction =
                static_cast<double>(peer_matches) / static_cast<double>(peer_count);
            score.value = params.alpha * (match_fraction / denom - 1.0);
        } else {
            Rng peer_rng(derive_seed(seed, "peer", item_k, question, rating.rater));
            const auto peer = select_peer(log, item_k, rating.rater, question, peer_rng);
            score.value = augmented_score(rating.label, peer, q_tilde, labels, params.alpha);
        }
        score.status = ScoreStatus::provisional;
        out.emplace(rating.rater, std::move(score));
    }
    return out;
}

double quadratic_score(double p, int outcome) {
    const double diff = static_cast<double>(outcome) - p;
    return 1.0 - 2.0 * diff * diff;
}

double quadratic_accuracy(double p_i, double p_b, std::optional<int> outcome) {
    if (!outcome.has_value()) {
        throw UnresolvedEvent("success event outcome is not resolved");
    }
    return quadratic_score(p_i, *outcome) - quadratic_score(p_b, *outcome);
}

BenchmarkPrediction community_benchmark(const std::vector<ProbabilisticRating>& community,
                                        const std::string& exclude_rater) {
    double sum = 0.0;
    int count = 0;
    for (const auto& rating : community) {
        if (rating.rater == exclude_rater) continue;
        sum += rating.p;
        ++count;
    }
    if (count == 0) {
        throw NoBenchmarkData("no community prediction available besides the scored rater");
    }
    return {sum / count, BenchmarkMode::community_average};
}

BenchmarkPrediction algorithmic_benchmark(const Forest& outcome_model,
                                          const DescriptorVector& d) {
    if (outcome_model.label_count() != 2) {
        throw SchemaMismatch("algorithmic benchmark needs a two-label outcome model");
    }
    const auto proba = outcome_model.predict_proba(d);
    return {proba[1], BenchmarkMode::algorithmic};
}

BenchmarkPrediction constant_benchmark() {
    return {0.5, BenchmarkMode::constant};
}

}  // namespace peertruth

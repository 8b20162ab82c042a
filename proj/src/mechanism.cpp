#include "peertruth/mechanism.hpp"

#include <algorithm>

namespace peertruth {

const char* to_string(ScoreStatus s) {
    switch (s) {
        case ScoreStatus::pending: return "pending";
        case ScoreStatus::provisional: return "provisional";
        case ScoreStatus::finalized: return "final";
    }
    return "?";
}

const char* to_string(PeerMode m) {
    return m == PeerMode::sampled ? "sampled" : "expectation";
}

PeerMode peer_mode_from_string(const std::string& s) {
    if (s == "sampled") return PeerMode::sampled;
    if (s == "expectation") return PeerMode::expectation;
    throw ConfigError("unknown peer_mode '" + s + "' (expected sampled|expectation)");
}

const char* to_string(MechanismKind m) {
    switch (m) {
        case MechanismKind::original: return "original";
        case MechanismKind::augmented: return "augmented";
        case MechanismKind::quadratic: return "quadratic";
    }
    return "?";
}

MechanismKind mechanism_from_string(const std::string& s) {
    if (s == "original") return MechanismKind::original;
    if (s == "augmented") return MechanismKind::augmented;
    if (s == "quadratic") return MechanismKind::quadratic;
    throw ConfigError("unknown mechanism '" + s + "' (expected original|augmented|quadratic)");
}

void ScoreParams::validate() const {
    if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
    if (n < 2) throw ConfigError("frequency sample size n must be >= 2");
}

double tau(const std::string& r_w, const std::string& r_p, const FrequencyEstimate& f) {
    return r_w == r_p ? 1.0 / f.value : 0.0;
}

double rptsc_score(const std::string& r_w, const std::optional<std::string>& r_p,
                   const FrequencyEstimate& f, double alpha) {
    if (!r_p.has_value()) return 0.0;
    return alpha * (tau(r_w, *r_p, f) - 1.0);
}

FrequencyEstimate sample_frequency(const RatingLog& log, const std::string& item_k,
                                   const std::string& rater_w, const std::string& question,
                                   const std::string& label, const ScoreParams& params,
                                   Rng& rng) {
    params.validate();
    const auto eligible = log.eligible_other_items(item_k, rater_w, question);
    if (eligible.empty()) {
        throw InsufficientCorpus("no other rated item on question '" + question +
                                 "' to sample frequencies from");
    }

    // The sample shrinks with the corpus: n_eff - 1 other items, never more
    // than exist.
    const int n_eff = std::min<std::size_t>(params.n, eligible.size() + 1);

    int matches = 0;
    int drawn = 0;
    for (std::size_t idx : rng.sample_indices(eligible.size(), n_eff - 1)) {
        const auto* channel = log.ratings(eligible[idx], question);
        std::vector<const RatingEvent*> candidates;
        for (const auto& ev : *channel) {
            if (ev.rater != rater_w) candidates.push_back(&ev);
        }
        const RatingEvent* pick = candidates[rng.index(candidates.size())];
        ++drawn;
        if (pick->label == label) ++matches;
    }

    if (params.include_peer_in_frequency) {
        if (const auto* channel = log.ratings(item_k, question)) {
            std::vector<const RatingEvent*> candidates;
            for (const auto& ev : *channel) {
                if (ev.rater != rater_w) candidates.push_back(&ev);
            }
            if (!candidates.empty()) {
                const RatingEvent* pick = candidates[rng.index(candidates.size())];
                ++drawn;
                if (pick->label == label) ++matches;
            }
        }
    }

    const double proportion = static_cast<double>(matches) / static_cast<double>(drawn);
    FrequencyEstimate f;
    f.label = label;
    f.value = std::max(proportion, 1.0 / static_cast<double>(n_eff));
    f.sample_size = n_eff;
    return f;
}

std::optional<std::string> select_peer(const RatingLog& log, const std::string& item_k,
                                       const std::string& rater_w, const std::string& question,
                                       Rng& rng) {
    const auto* channel = log.ratings(item_k, question);
    if (channel == nullptr) return std::nullopt;
    std::vector<const RatingEvent*> peers;
    for (const auto& ev : *channel) {
        if (ev.rater != rater_w) peers.push_back(&ev);
    }
    if (peers.empty()) return std::nullopt;
    return peers[rng.index(peers.size())]->label;
}

std::map<std::string, AccuracyScore> score_item_ratings(const RatingLog& log,
                                                        const std::string& item_k,
                                                        const std::string& question,
                                                        const ScoreParams& params,
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
            score.value = 0.0;
            score.status = ScoreStatus::pending;
            out.emplace(rating.rater, std::move(score));
            continue;
        }

        Rng freq_rng(derive_seed(seed, "freq", item_k, question, rating.rater));
        const FrequencyEstimate f =
            sample_frequency(log, item_k, rating.rater, question, rating.label, params, freq_rng);

        if (params.peer_mode == PeerMode::expectation) {
            const double match_fraction =
                static_cast<double>(peer_matches) / static_cast<double>(peer_count);
            score.value = params.alpha * (match_fraction / f.value - 1.0);
        } else {
            Rng peer_rng(derive_seed(seed, "peer", item_k, question, rating.rater));
            const auto peer = select_peer(log, item_k, rating.rater, question, peer_rng);
            score.value = rptsc_score(rating.label, peer, f, params.alpha);
        }
        score.status = ScoreStatus::provisional;
        out.emplace(rating.rater, std::move(score));
    }
    return out;
}

}  // namespace peertruth

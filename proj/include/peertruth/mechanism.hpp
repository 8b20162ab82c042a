#pragma once

// Peer-prediction accuracy scoring. A rating earns
//
//     e = alpha * (tau - 1),   tau = 1/F(label) on a peer match, 0 otherwise
//
// where F(label) is the sampled frequency of the label across other items.
// Matching a peer on a rare label pays the most; mismatching costs alpha.

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "peertruth/errors.hpp"
#include "peertruth/rating_log.hpp"
#include "peertruth/rng.hpp"

namespace peertruth {

enum class PeerMode {
    sampled,      // one random peer per rating
    expectation,  // average the score over every admissible peer (deterministic)
};

enum class ScoreStatus { pending, provisional, finalized };

// Which scoring rule applies to an item's ratings.
enum class MechanismKind { original, augmented, quadratic };

const char* to_string(ScoreStatus s);
const char* to_string(PeerMode m);
const char* to_string(MechanismKind m);
PeerMode peer_mode_from_string(const std::string& s);
MechanismKind mechanism_from_string(const std::string& s);

struct ScoreParams {
    double alpha = 1.0;  // scales score impact; must be > 0
    int n = 10;          // frequency sample size target; must be >= 2
    // Paper-literal sampling draws one of the scored item's own ratings into
    // the frequency sample; the default keeps F independent of that item.
    bool include_peer_in_frequency = false;
    PeerMode peer_mode = PeerMode::expectation;

    void validate() const;
};

struct FrequencyEstimate {
    std::string label;
    double value = 0.0;  // clamped to [1/sample_size, 1]
    int sample_size = 0; // the n used as clamp denominator
};

struct AccuracyScore {
    std::string rater;
    std::string item;
    std::string question;
    double value = 0.0;
    ScoreStatus status = ScoreStatus::pending;
};

// tau case split: 1/F on a match, 0 on a mismatch.
double tau(const std::string& r_w, const std::string& r_p, const FrequencyEstimate& f);

// alpha * (tau - 1); absent peer scores 0 (pending).
double rptsc_score(const std::string& r_w, const std::optional<std::string>& r_p,
                   const FrequencyEstimate& f, double alpha);

// Draws up to n-1 distinct other items, one rating per item (never the scored
// rater's own), and returns the proportion matching `label`, clamped below at
// 1/n. When params.include_peer_in_frequency is set one rating of item_k
// itself joins the sample. Throws InsufficientCorpus when no other rated item
// is available.
FrequencyEstimate sample_frequency(const RatingLog& log, const std::string& item_k,
                                   const std::string& rater_w, const std::string& question,
                                   const std::string& label, const ScoreParams& params,
                                   Rng& rng);

// Uniform draw among item_k's ratings on the question by raters != rater_w.
std::optional<std::string> select_peer(const RatingLog& log, const std::string& item_k,
                                       const std::string& rater_w, const std::string& question,
                                       Rng& rng);

// Scores every active rating of one item/question channel. Frequency samples
// and peer draws use streams derived from (seed, item, question, rater), so
// the result is a pure function of the log content, not of event order.
// Ratings with no peer come back pending with value 0. InsufficientCorpus
// propagates when frequencies cannot be sampled.
std::map<std::string, AccuracyScore> score_item_ratings(const RatingLog& log,
                                                        const std::string& item_k,
                                                        const std::string& question,
                                                        const ScoreParams& params,
                                                        std::uint64_t seed);

}  // namespace peertruth

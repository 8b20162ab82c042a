#pragma once

// Append-only event log plus deterministic replay. Derived state (scores,
// reputation, token balances) is a pure function of the log prefix: replaying
// the same events with the same seed reproduces it byte for byte.
//
// Scoring is redone perpetually: every query recomputes scores from the
// current active ratings. Finalizing a question channel closes its rating
// set and marks its scores final; resetting a channel archives its ratings,
// which then stop contributing to scores and to frequency corpora entirely.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "peertruth/descriptors.hpp"
#include "peertruth/errors.hpp"
#include "peertruth/forest.hpp"
#include "peertruth/labels.hpp"
#include "peertruth/mechanism.hpp"
#include "peertruth/rating_log.hpp"
#include "peertruth/scoring_variants.hpp"
#include "peertruth/tokens.hpp"

namespace peertruth {

enum class EventKind {
    UserJoined,
    ProjectPublished,
    ReportSubmitted,
    RatingSubmitted,
    ProbabilisticRatingSubmitted,
    EventResolved,
    QuestionReset,
    ScoringFinalized,
    ReviewBidPlaced,
    ReviewFulfilled,
    ReviewBidCancelled,
    BountyPosted,
    BountyClaimed,
    IdeaAdopted,
};

const char* to_string(EventKind k);
EventKind event_kind_from_string(const std::string& s);

struct LedgerEvent {
    std::uint64_t seq = 0;
    std::int64_t ts = 0;  // seconds; drives time-based finalization
    EventKind kind = EventKind::UserJoined;
    nlohmann::json payload;
};

enum class ItemKind { project, report };

const char* to_string(ItemKind k);

// Question channel ids. Projects carry the two project questions; referee
// reports carry the single quality question.
inline constexpr const char* kQuestionContribution = "contribution";
inline constexpr const char* kQuestionDesign = "design";
inline constexpr const char* kQuestionQuality = "quality";

struct QuestionChannel {
    std::vector<RatingEvent> active;    // current scoring inputs, seq order
    std::vector<RatingEvent> archived;  // reset ratings; never rejoin scoring
    bool finalized = false;
    // set by a reset; restarts the age-based finalization clock
    std::optional<std::int64_t> reopened_ts;
};

struct ItemState {
    std::string id;
    std::string author;
    ItemKind kind = ItemKind::project;
    MechanismKind mechanism = MechanismKind::original;
    DescriptorVector descriptors;
    std::string target;  // reports: the refereed item, if stated
    std::int64_t published_ts = 0;
    std::map<std::string, QuestionChannel> questions;
    std::map<std::string, SuccessEvent> success_events;
    // success event id -> rater -> reported probability
    std::map<std::string, std::map<std::string, double>> prob_ratings;
};

struct Weights {
    std::map<std::string, double> level_weights;  // per-label rating weight
    double beta_r = 1.0;
    double beta_p = 1.0;
    double default_r0 = 0.0;

    static Weights defaults() {
        Weights w;
        w.level_weights = {{"u", -1.0}, {"s", 1.0}, {"e", 2.0}};
        return w;
    }
};

// Weighted count of a finalized label multiset. Labels without a configured
// weight contribute zero.
double item_rating_total(const std::vector<std::string>& labels, const Weights& weights);

// beta * sum of non-pending score values (pending scores are exactly 0).
double accuracy_component(const std::vector<AccuracyScore>& scores, double beta);

// Per-user reputation decomposition. total is always the exact sum.
struct ReputationState {
    double r0 = 0.0;
    double r_projects = 0.0;
    double r_reports = 0.0;
    double e_projects = 0.0;
    double e_reports = 0.0;
    double total() const { return r0 + r_projects + r_reports + e_projects + e_reports; }
};

struct LedgerConfig {
    LabelSet labels = LabelSet::use();
    DescriptorSchema schema;  // descriptor shape items must conform to
    Weights weights = Weights::defaults();
    ScoreParams params;
    double epsilon = 0.05;
    ForestConfig forest;  // augmented-mechanism model settings
    int finalize_after_ratings = 5;
    std::int64_t finalize_after_seconds = 30 * 86400;
    MechanismKind default_mechanism = MechanismKind::original;
    TokenPolicy tokens;
    // Scores categorical channels with this mechanism regardless of item tags
    // (CLI --mechanism flag).
    std::optional<MechanismKind> mechanism_override;
    // Pretrained model reused for every augmented item; when absent a forest
    // is trained per scoring pass with the scored item's rows excluded.
    std::shared_ptr<const Forest> benchmark_forest;
};

class Ledger {
  public:
    explicit Ledger(LedgerConfig config = {}, std::uint64_t seed = 0);

    const LedgerConfig& config() const { return config_; }
    std::uint64_t seed() const { return seed_; }
    const std::vector<LedgerEvent>& events() const { return events_; }
    const std::map<std::string, ItemState>& items() const { return items_; }
    const std::map<std::string, double>& users() const { return users_; }
    const TokenLedger& tokens() const { return tokens_; }

    // Validates seq continuity and the payload against current state, then
    // applies the event. Question channels auto-finalize when the rating
    // threshold or the age window is reached.
    void append_event(LedgerEvent ev);

    // Convenience wrappers that append the corresponding event.
    void reset_question(const std::string& item, const std::string& question,
                        const std::string& requester, std::int64_t ts);

    // Current accuracy scores for every rated channel and resolved success
    // event, recomputed from the active ratings. Ratings whose frequency
    // corpus is still empty come back pending with value 0.
    std::vector<AccuracyScore> current_scores() const;

    // Full reputation decomposition per user, derived from current scores
    // and finalized rating totals.
    std::map<std::string, ReputationState> reputation() const;

    // Rating total of one item over its finalized channels.
    double finalized_item_total(const ItemState& item) const;

    // Visibility rule: until a channel finalizes a viewer sees only their own
    // rating; afterwards everyone sees all of them.
    std::vector<RatingEvent> visible_ratings(const std::string& item,
                                             const std::string& question,
                                             const std::string& viewer) const;

    // Canonical JSON rendering of users, items, scores, reputation and token
    // state; equal strings mean equal state.
    std::string canonical_state() const;

  private:
    void apply_user_joined(const LedgerEvent& ev);
    void apply_item_published(const LedgerEvent& ev, ItemKind kind);
    void apply_rating(const LedgerEvent& ev);
    void apply_prob_rating(const LedgerEvent& ev);
    void apply_event_resolved(const LedgerEvent& ev);
    void apply_reset(const LedgerEvent& ev);
    void apply_finalize(const LedgerEvent& ev);
    void apply_token_event(const LedgerEvent& ev);

    ItemState& require_item(const std::string& id);
    const ItemState& require_item(const std::string& id) const;
    void require_user(const std::string& user) const;
    void finalize_channel(ItemState& item, const std::string& question);
    void sweep_time_finalization(std::int64_t now);

    // Corpus of active ratings for one (kind, question) pair.
    RatingLog active_corpus(ItemKind kind, const std::string& question) const;
    TrainingSet corpus_training_set(ItemKind kind, const std::string& question) const;
    std::map<std::string, AccuracyScore> score_channel(const ItemState& item,
                                                       const std::string& question,
                                                       const RatingLog& corpus) const;
    void append_quadratic_scores(const ItemState& item,
                                 std::vector<AccuracyScore>& out) const;

    LedgerConfig config_;
    std::uint64_t seed_ = 0;
    std::vector<LedgerEvent> events_;
    std::map<std::string, double> users_;  // user -> initial reputation
    std::map<std::string, ItemState> items_;
    TokenLedger tokens_;
};

// Fresh fold of an event sequence; equal inputs give byte-identical state.
Ledger replay(const std::vector<LedgerEvent>& events, const LedgerConfig& config,
              std::uint64_t seed);

// Newline-delimited JSON with a version header record.
void write_event_log(std::ostream& os, const std::vector<LedgerEvent>& events);
std::vector<LedgerEvent> read_event_log(std::istream& is);

nlohmann::json event_to_json(const LedgerEvent& ev);
LedgerEvent event_from_json(const nlohmann::json& j);

}  // namespace peertruth

#include "peertruth/ledger.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace peertruth {

using nlohmann::json;

namespace {

const json& need(const json& payload, const char* key) {
    auto it = payload.find(key);
    if (it == payload.end()) {
        throw InvalidPayload(std::string("payload missing field '") + key + "'");
    }
    return *it;
}

std::string need_str(const json& payload, const char* key) {
    const json& v = need(payload, key);
    if (!v.is_string()) {
        throw InvalidPayload(std::string("payload field '") + key + "' must be a string");
    }
    return v.get<std::string>();
}

std::int64_t need_int(const json& payload, const char* key) {
    const json& v = need(payload, key);
    if (!v.is_number_integer()) {
        throw InvalidPayload(std::string("payload field '") + key + "' must be an integer");
    }
    return v.get<std::int64_t>();
}

double need_number(const json& payload, const char* key) {
    const json& v = need(payload, key);
    if (!v.is_number()) {
        throw InvalidPayload(std::string("payload field '") + key + "' must be a number");
    }
    return v.get<double>();
}

DescriptorVector descriptors_from_payload(const json& payload) {
    DescriptorVector d;
    if (auto it = payload.find("descriptors"); it != payload.end()) {
        if (it->contains("numeric")) d.numeric = it->at("numeric").get<std::vector<double>>();
        if (it->contains("categorical")) {
            d.categorical = it->at("categorical").get<std::vector<int>>();
        }
    }
    return d;
}

}  // namespace

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::UserJoined: return "UserJoined";
        case EventKind::ProjectPublished: return "ProjectPublished";
        case EventKind::ReportSubmitted: return "ReportSubmitted";
        case EventKind::RatingSubmitted: return "RatingSubmitted";
        case EventKind::ProbabilisticRatingSubmitted: return "ProbabilisticRatingSubmitted";
        case EventKind::EventResolved: return "EventResolved";
        case EventKind::QuestionReset: return "QuestionReset";
        case EventKind::ScoringFinalized: return "ScoringFinalized";
        case EventKind::ReviewBidPlaced: return "ReviewBidPlaced";
        case EventKind::ReviewFulfilled: return "ReviewFulfilled";
        case EventKind::ReviewBidCancelled: return "ReviewBidCancelled";
        case EventKind::BountyPosted: return "BountyPosted";
        case EventKind::BountyClaimed: return "BountyClaimed";
        case EventKind::IdeaAdopted: return "IdeaAdopted";
    }
    return "?";
}

EventKind event_kind_from_string(const std::string& s) {
    static const std::map<std::string, EventKind> table = {
        {"UserJoined", EventKind::UserJoined},
        {"ProjectPublished", EventKind::ProjectPublished},
        {"ReportSubmitted", EventKind::ReportSubmitted},
        {"RatingSubmitted", EventKind::RatingSubmitted},
        {"ProbabilisticRatingSubmitted", EventKind::ProbabilisticRatingSubmitted},
        {"EventResolved", EventKind::EventResolved},
        {"QuestionReset", EventKind::QuestionReset},
        {"ScoringFinalized", EventKind::ScoringFinalized},
        {"ReviewBidPlaced", EventKind::ReviewBidPlaced},
        {"ReviewFulfilled", EventKind::ReviewFulfilled},
        {"ReviewBidCancelled", EventKind::ReviewBidCancelled},
        {"BountyPosted", EventKind::BountyPosted},
        {"BountyClaimed", EventKind::BountyClaimed},
        {"IdeaAdopted", EventKind::IdeaAdopted},
    };
    auto it = table.find(s);
    if (it == table.end()) throw InvalidPayload("unknown event kind '" + s + "'");
    return it->second;
}

const char* to_string(ItemKind k) {
    return k == ItemKind::project ? "project" : "report";
}

double item_rating_total(const std::vector<std::string>& labels, const Weights& weights) {
    double total = 0.0;
    for (const auto& label : labels) {
        auto it = weights.level_weights.find(label);
        if (it != weights.level_weights.end()) total += it->second;
    }
    return total;
}

double accuracy_component(const std::vector<AccuracyScore>& scores, double beta) {
    double total = 0.0;
    for (const auto& s : scores) {
        if (s.status != ScoreStatus::pending) total += s.value;
    }
    return beta * total;
}

Ledger::Ledger(LedgerConfig config, std::uint64_t seed)
    : config_(std::move(config)), seed_(seed), tokens_(config_.tokens) {
    config_.params.validate();
    validated_epsilon(config_.epsilon, config_.labels.size());
}

void Ledger::require_user(const std::string& user) const {
    if (users_.find(user) == users_.end()) {
        throw InvalidPayload("unknown user '" + user + "'");
    }
}

ItemState& Ledger::require_item(const std::string& id) {
    auto it = items_.find(id);
    if (it == items_.end()) throw InvalidPayload("unknown item '" + id + "'");
    return it->second;
}

const ItemState& Ledger::require_item(const std::string& id) const {
    auto it = items_.find(id);
    if (it == items_.end()) throw InvalidPayload("unknown item '" + id + "'");
    return it->second;
}

void Ledger::append_event(LedgerEvent ev) {
    const std::uint64_t expected = events_.empty() ? 1 : events_.back().seq + 1;
    if (ev.seq != expected) {
        throw SequenceGap("expected seq " + std::to_string(expected) + ", got " +
                          std::to_string(ev.seq));
    }
    if (!events_.empty() && ev.ts < events_.back().ts) {
        throw InvalidPayload("event timestamps must be nondecreasing");
    }

    switch (ev.kind) {
        case EventKind::UserJoined: apply_user_joined(ev); break;
        case EventKind::ProjectPublished: apply_item_published(ev, ItemKind::project); break;
        case EventKind::ReportSubmitted: apply_item_published(ev, ItemKind::report); break;
        case EventKind::RatingSubmitted: apply_rating(ev); break;
        case EventKind::ProbabilisticRatingSubmitted: apply_prob_rating(ev); break;
        case EventKind::EventResolved: apply_event_resolved(ev); break;
        case EventKind::QuestionReset: apply_reset(ev); break;
        case EventKind::ScoringFinalized: apply_finalize(ev); break;
        default: apply_token_event(ev); break;
    }

    const std::int64_t now = ev.ts;
    events_.push_back(std::move(ev));
    sweep_time_finalization(now);
}

void Ledger::apply_user_joined(const LedgerEvent& ev) {
    const std::string user = need_str(ev.payload, "user");
    if (users_.count(user) != 0) {
        throw DuplicateAccount("user '" + user + "' already joined");
    }
    double r0 = config_.weights.default_r0;
    if (ev.payload.contains("r0")) r0 = need_number(ev.payload, "r0");
    tokens_.mint_on_join(user);
    users_.emplace(user, r0);
}

void Ledger::apply_item_published(const LedgerEvent& ev, ItemKind kind) {
    ItemState item;
    item.id = need_str(ev.payload, "item");
    item.author = need_str(ev.payload, "author");
    item.kind = kind;
    item.published_ts = ev.ts;
    require_user(item.author);
    if (items_.count(item.id) != 0) {
        throw InvalidPayload("item '" + item.id + "' already published");
    }

    item.mechanism = config_.default_mechanism;
    if (ev.payload.contains("mechanism")) {
        try {
            item.mechanism = mechanism_from_string(need_str(ev.payload, "mechanism"));
        } catch (const ConfigError& e) {
            throw InvalidPayload(e.what());
        }
    }
    if (kind == ItemKind::report && item.mechanism == MechanismKind::quadratic) {
        throw InvalidPayload("referee reports cannot use the quadratic mechanism");
    }

    item.descriptors = descriptors_from_payload(ev.payload);
    if (!config_.schema.matches(item.descriptors)) {
        throw InvalidPayload("item descriptors do not match the configured schema");
    }

    if (kind == ItemKind::report && ev.payload.contains("target")) {
        item.target = need_str(ev.payload, "target");
        if (items_.count(item.target) == 0) {
            throw InvalidPayload("report target '" + item.target + "' does not exist");
        }
    }

    if (item.mechanism == MechanismKind::quadratic) {
        if (auto it = ev.payload.find("success_events"); it != ev.payload.end()) {
            for (const auto& entry : *it) {
                SuccessEvent sev;
                sev.item = item.id;
                sev.id = need_str(entry, "id");
                sev.description = entry.value("description", "");
                if (item.success_events.count(sev.id) != 0) {
                    throw InvalidPayload("duplicate success event id '" + sev.id + "'");
                }
                item.success_events.emplace(sev.id, std::move(sev));
            }
        }
    } else if (kind == ItemKind::project) {
        item.questions.emplace(kQuestionContribution, QuestionChannel{});
        item.questions.emplace(kQuestionDesign, QuestionChannel{});
    }
    if (kind == ItemKind::report) {
        item.questions.emplace(kQuestionQuality, QuestionChannel{});
    }

    items_.emplace(item.id, std::move(item));
}

void Ledger::apply_rating(const LedgerEvent& ev) {
    const std::string rater = need_str(ev.payload, "rater");
    const std::string item_id = need_str(ev.payload, "item");
    const std::string question = need_str(ev.payload, "question");
    const std::string label = need_str(ev.payload, "label");

    require_user(rater);
    ItemState& item = require_item(item_id);
    if (rater == item.author) {
        throw InvalidPayload("authors cannot rate their own items");
    }
    if (!config_.labels.contains(label)) {
        throw InvalidPayload("label '" + label + "' not in label set");
    }
    auto qt = item.questions.find(question);
    if (qt == item.questions.end()) {
        throw InvalidPayload("item '" + item_id + "' has no question '" + question + "'");
    }
    QuestionChannel& channel = qt->second;
    if (channel.finalized) {
        throw InvalidPayload("question '" + question + "' of item '" + item_id +
                             "' is finalized");
    }
    for (const auto& existing : channel.active) {
        if (existing.rater == rater) {
            throw InvalidPayload("rater '" + rater + "' already rated this question");
        }
    }

    channel.active.push_back(RatingEvent{rater, item_id, question, label, ev.seq});
    if (config_.finalize_after_ratings > 0 &&
        static_cast<int>(channel.active.size()) >= config_.finalize_after_ratings) {
        finalize_channel(item, question);
    }
}

void Ledger::apply_prob_rating(const LedgerEvent& ev) {
    const std::string rater = need_str(ev.payload, "rater");
    const std::string item_id = need_str(ev.payload, "item");
    const std::string event_id = need_str(ev.payload, "event");
    const double p = need_number(ev.payload, "p");

    require_user(rater);
    ItemState& item = require_item(item_id);
    if (rater == item.author) {
        throw InvalidPayload("authors cannot rate their own items");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidPayload("probability report must lie in [0, 1]");
    }
    auto st = item.success_events.find(event_id);
    if (st == item.success_events.end()) {
        throw InvalidPayload("item '" + item_id + "' has no success event '" + event_id + "'");
    }
    if (st->second.outcome.has_value()) {
        throw InvalidPayload("success event '" + event_id + "' is already resolved");
    }
    auto& per_event = item.prob_ratings[event_id];
    if (per_event.count(rater) != 0) {
        throw InvalidPayload("rater '" + rater + "' already predicted this event");
    }
    per_event.emplace(rater, p);
}

void Ledger::apply_event_resolved(const LedgerEvent& ev) {
    const std::string item_id = need_str(ev.payload, "item");
    const std::string event_id = need_str(ev.payload, "event");
    const std::int64_t outcome = need_int(ev.payload, "outcome");

    ItemState& item = require_item(item_id);
    auto st = item.success_events.find(event_id);
    if (st == item.success_events.end()) {
        throw InvalidPayload("item '" + item_id + "' has no success event '" + event_id + "'");
    }
    if (st->second.outcome.has_value()) {
        throw InvalidPayload("success event outcome is immutable once set");
    }
    if (outcome != 0 && outcome != 1) {
        throw InvalidPayload("success event outcome must be 0 or 1");
    }
    st->second.outcome = static_cast<int>(outcome);
    st->second.resolution_time = ev.ts;
}

void Ledger::apply_reset(const LedgerEvent& ev) {
    const std::string item_id = need_str(ev.payload, "item");
    const std::string question = need_str(ev.payload, "question");
    const std::string requester = need_str(ev.payload, "requester");

    ItemState& item = require_item(item_id);
    if (requester != item.author) {
        throw UnauthorizedReset("only the author may reset question ratings");
    }
    auto qt = item.questions.find(question);
    if (qt == item.questions.end()) {
        throw UnknownQuestion("item '" + item_id + "' has no question '" + question + "'");
    }
    QuestionChannel& channel = qt->second;
    channel.archived.insert(channel.archived.end(), channel.active.begin(),
                            channel.active.end());
    channel.active.clear();
    channel.finalized = false;
    channel.reopened_ts = ev.ts;
}

void Ledger::apply_finalize(const LedgerEvent& ev) {
    const std::string item_id = need_str(ev.payload, "item");
    const std::string question = need_str(ev.payload, "question");
    ItemState& item = require_item(item_id);
    auto qt = item.questions.find(question);
    if (qt == item.questions.end()) {
        throw UnknownQuestion("item '" + item_id + "' has no question '" + question + "'");
    }
    if (qt->second.finalized) {
        throw InvalidPayload("question '" + question + "' is already finalized");
    }
    finalize_channel(item, question);
}

void Ledger::apply_token_event(const LedgerEvent& ev) {
    switch (ev.kind) {
        case EventKind::ReviewBidPlaced: {
            const std::string buyer = need_str(ev.payload, "buyer");
            const std::string item_id = need_str(ev.payload, "item");
            require_user(buyer);
            require_item(item_id);
            tokens_.place_review_bid(need_str(ev.payload, "bid"), buyer, item_id,
                                     need_int(ev.payload, "amount"),
                                     static_cast<int>(need_int(ev.payload, "slots")));
            break;
        }
        case EventKind::ReviewFulfilled: {
            const std::string reviewer = need_str(ev.payload, "reviewer");
            const std::string report_id = need_str(ev.payload, "report");
            require_user(reviewer);
            const ItemState& report = require_item(report_id);
            if (report.kind != ItemKind::report) {
                throw InvalidPayload("'" + report_id + "' is not a referee report");
            }
            if (report.author != reviewer) {
                throw InvalidPayload("report '" + report_id + "' was not written by '" +
                                     reviewer + "'");
            }
            auto qt = report.questions.find(kQuestionQuality);
            if (qt == report.questions.end() || !qt->second.finalized) {
                throw InvalidPayload("report '" + report_id + "' is not finalized yet");
            }
            tokens_.fulfill_review(need_str(ev.payload, "bid"), reviewer,
                                   finalized_item_total(report));
            break;
        }
        case EventKind::ReviewBidCancelled:
            tokens_.cancel_review_bid(need_str(ev.payload, "bid"),
                                      need_str(ev.payload, "requester"));
            break;
        case EventKind::BountyPosted: {
            const std::string sponsor = need_str(ev.payload, "sponsor");
            require_user(sponsor);
            tokens_.post_bounty(need_str(ev.payload, "bounty"),
                                need_str(ev.payload, "question"), sponsor,
                                need_int(ev.payload, "amount"));
            break;
        }
        case EventKind::BountyClaimed: {
            const std::string claimant = need_str(ev.payload, "claimant");
            const std::string item_id = need_str(ev.payload, "item");
            require_user(claimant);
            const ItemState& item = require_item(item_id);
            if (item.author != claimant) {
                throw InvalidPayload("only the item's author may claim with it");
            }
            bool any_finalized = false;
            for (const auto& [q, channel] : item.questions) {
                any_finalized = any_finalized || channel.finalized;
            }
            if (!any_finalized) {
                throw InvalidPayload("item '" + item_id + "' has no finalized scoring yet");
            }
            tokens_.claim_bounty(need_str(ev.payload, "bounty"), claimant,
                                 finalized_item_total(item));
            break;
        }
        case EventKind::IdeaAdopted: {
            const std::string adopter = need_str(ev.payload, "adopter");
            const std::string item_id = need_str(ev.payload, "item");
            require_user(adopter);
            const ItemState& item = require_item(item_id);
            tokens_.adopt_idea(adopter, item.author, need_int(ev.payload, "price"));
            break;
        }
        default:
            throw InvalidPayload("unhandled event kind");
    }
}

void Ledger::finalize_channel(ItemState& item, const std::string& question) {
    QuestionChannel& channel = item.questions.at(question);
    channel.finalized = true;
    if (config_.tokens.tokens_per_score > 0.0 && !channel.active.empty()) {
        const RatingLog corpus = active_corpus(item.kind, question);
        for (const auto& [rater, score] : score_channel(item, question, corpus)) {
            if (score.status != ScoreStatus::pending) {
                tokens_.apply_score_reward(rater, score.value);
            }
        }
    }
}

void Ledger::sweep_time_finalization(std::int64_t now) {
    if (config_.finalize_after_seconds <= 0) return;
    for (auto& [id, item] : items_) {
        for (auto& [question, channel] : item.questions) {
            if (!channel.finalized && channel.reopened_ts.value_or(item.published_ts) +
                                              config_.finalize_after_seconds <=
                                          now) {
                finalize_channel(item, question);
            }
        }
    }
}

void Ledger::reset_question(const std::string& item, const std::string& question,
                            const std::string& requester, std::int64_t ts) {
    LedgerEvent ev;
    ev.seq = events_.empty() ? 1 : events_.back().seq + 1;
    ev.ts = ts;
    ev.kind = EventKind::QuestionReset;
    ev.payload = {{"item", item}, {"question", question}, {"requester", requester}};
    append_event(std::move(ev));
}

RatingLog Ledger::active_corpus(ItemKind kind, const std::string& question) const {
    RatingLog log;
    for (const auto& [id, item] : items_) {
        if (item.kind != kind) continue;
        auto qt = item.questions.find(question);
        if (qt == item.questions.end()) continue;
        for (const auto& ev : qt->second.active) log.add(ev);
    }
    return log;
}

TrainingSet Ledger::corpus_training_set(ItemKind kind, const std::string& question) const {
    TrainingSet data;
    data.schema = config_.schema;
    data.label_count = config_.labels.size();
    for (const auto& [id, item] : items_) {
        if (item.kind != kind) continue;
        auto qt = item.questions.find(question);
        if (qt == item.questions.end()) continue;
        for (const auto& ev : qt->second.active) {
            data.rows.push_back(TrainingRow{item.descriptors,
                                            static_cast<int>(config_.labels.index_of(ev.label)),
                                            item.id});
        }
    }
    return data;
}

std::map<std::string, AccuracyScore> Ledger::score_channel(const ItemState& item,
                                                           const std::string& question,
                                                           const RatingLog& corpus) const {
    auto pending_all = [&] {
        std::map<std::string, AccuracyScore> out;
        for (const auto& ev : item.questions.at(question).active) {
            out.emplace(ev.rater, AccuracyScore{ev.rater, item.id, question, 0.0,
                                                ScoreStatus::pending});
        }
        return out;
    };

    const MechanismKind mechanism =
        config_.mechanism_override.value_or(item.mechanism) == MechanismKind::augmented
            ? MechanismKind::augmented
            : MechanismKind::original;

    try {
        if (mechanism == MechanismKind::augmented) {
            std::vector<double> q_tilde;
            if (config_.benchmark_forest != nullptr) {
                q_tilde = regularize(config_.benchmark_forest->predict_proba(item.descriptors),
                                     config_.epsilon);
            } else {
                ForestConfig fc = config_.forest;
                fc.seed = derive_seed(seed_, "ledger-forest", item.id, question);
                const Forest forest =
                    train_excluding(corpus_training_set(item.kind, question), fc, item.id);
                q_tilde = regularize(forest.predict_proba(item.descriptors), config_.epsilon);
            }
            return score_item_ratings_augmented(corpus, item.id, question, q_tilde,
                                                config_.labels, config_.params, seed_);
        }
        return score_item_ratings(corpus, item.id, question, config_.params, seed_);
    } catch (const InsufficientCorpus&) {
        // No other rated item yet: scores stay pending until a corpus exists.
        return pending_all();
    } catch (const EmptyTrainingSet&) {
        return pending_all();
    }
}

void Ledger::append_quadratic_scores(const ItemState& item,
                                     std::vector<AccuracyScore>& out) const {
    for (const auto& [event_id, per_rater] : item.prob_ratings) {
        const SuccessEvent& sev = item.success_events.at(event_id);
        for (const auto& [rater, p] : per_rater) {
            AccuracyScore score{rater, item.id, "event:" + event_id, 0.0, ScoreStatus::pending};
            if (sev.outcome.has_value()) {
                double p_b = 0.5;  // constant benchmark when nobody else predicted
                double sum = 0.0;
                int count = 0;
                for (const auto& [other, q] : per_rater) {
                    if (other == rater) continue;
                    sum += q;
                    ++count;
                }
                if (count > 0) p_b = sum / count;
                score.value = quadratic_accuracy(p, p_b, sev.outcome);
                score.status = ScoreStatus::finalized;
            }
            out.push_back(std::move(score));
        }
    }
}

std::vector<AccuracyScore> Ledger::current_scores() const {
    std::vector<AccuracyScore> out;
    const std::pair<ItemKind, const char*> corpora[] = {
        {ItemKind::project, kQuestionContribution},
        {ItemKind::project, kQuestionDesign},
        {ItemKind::report, kQuestionQuality},
    };
    for (const auto& [kind, question] : corpora) {
        const RatingLog corpus = active_corpus(kind, question);
        if (corpus.empty()) continue;
        for (const auto& [id, item] : items_) {
            if (item.kind != kind) continue;
            auto qt = item.questions.find(question);
            if (qt == item.questions.end() || qt->second.active.empty()) continue;
            auto scores = score_channel(item, question, corpus);
            for (auto& [rater, score] : scores) {
                if (qt->second.finalized && score.status == ScoreStatus::provisional) {
                    score.status = ScoreStatus::finalized;
                }
                out.push_back(std::move(score));
            }
        }
    }
    for (const auto& [id, item] : items_) {
        if (item.mechanism == MechanismKind::quadratic) {
            append_quadratic_scores(item, out);
        }
    }
    return out;
}

double Ledger::finalized_item_total(const ItemState& item) const {
    double total = 0.0;
    for (const auto& [question, channel] : item.questions) {
        if (!channel.finalized) continue;
        std::vector<std::string> labels;
        labels.reserve(channel.active.size());
        for (const auto& ev : channel.active) labels.push_back(ev.label);
        total += item_rating_total(labels, config_.weights);
    }
    return total;
}

std::map<std::string, ReputationState> Ledger::reputation() const {
    std::map<std::string, ReputationState> rep;
    for (const auto& [user, r0] : users_) rep[user].r0 = r0;

    for (const auto& [id, item] : items_) {
        const double total = finalized_item_total(item);
        auto& entry = rep[item.author];
        if (item.kind == ItemKind::project) {
            entry.r_projects += total;
        } else {
            entry.r_reports += total;
        }
    }

    for (const auto& score : current_scores()) {
        if (score.status == ScoreStatus::pending) continue;
        const ItemState& item = items_.at(score.item);
        auto& entry = rep[score.rater];
        if (item.kind == ItemKind::project) {
            entry.e_projects += config_.weights.beta_p * score.value;
        } else {
            entry.e_reports += config_.weights.beta_r * score.value;
        }
    }
    return rep;
}

std::vector<RatingEvent> Ledger::visible_ratings(const std::string& item,
                                                 const std::string& question,
                                                 const std::string& viewer) const {
    std::vector<RatingEvent> out;
    auto it = items_.find(item);
    if (it == items_.end()) return out;
    auto qt = it->second.questions.find(question);
    if (qt == it->second.questions.end()) return out;
    for (const auto& ev : qt->second.active) {
        if (qt->second.finalized || ev.rater == viewer) out.push_back(ev);
    }
    return out;
}

std::string Ledger::canonical_state() const {
    json state;
    state["users"] = json::object();
    for (const auto& [user, r0] : users_) state["users"][user] = r0;

    state["items"] = json::object();
    for (const auto& [id, item] : items_) {
        json questions = json::object();
        for (const auto& [q, channel] : item.questions) {
            json active = json::array();
            for (const auto& ev : channel.active) {
                active.push_back({ev.rater, ev.label, ev.seq});
            }
            json archived = json::array();
            for (const auto& ev : channel.archived) {
                archived.push_back({ev.rater, ev.label, ev.seq});
            }
            questions[q] = {{"finalized", channel.finalized},
                            {"active", std::move(active)},
                            {"archived", std::move(archived)}};
        }
        json events = json::object();
        for (const auto& [eid, sev] : item.success_events) {
            events[eid] = {{"outcome", sev.outcome ? json(*sev.outcome) : json(nullptr)},
                           {"resolved_at", sev.resolution_time}};
        }
        state["items"][id] = {{"author", item.author},
                              {"kind", to_string(item.kind)},
                              {"mechanism", to_string(item.mechanism)},
                              {"published_ts", item.published_ts},
                              {"questions", std::move(questions)},
                              {"success_events", std::move(events)},
                              {"prob_ratings", item.prob_ratings}};
    }

    json scores = json::array();
    for (const auto& s : current_scores()) {
        scores.push_back({s.item, s.question, s.rater, s.value, to_string(s.status)});
    }
    state["scores"] = std::move(scores);

    state["reputation"] = json::object();
    for (const auto& [user, r] : reputation()) {
        state["reputation"][user] = {r.r0, r.r_projects, r.r_reports,
                                     r.e_projects, r.e_reports, r.total()};
    }

    json accounts = json::object();
    for (const auto& [user, acct] : tokens_.accounts()) {
        accounts[user] = {acct.available, acct.escrowed};
    }
    json bids = json::object();
    for (const auto& [bid_id, bid] : tokens_.bids()) {
        bids[bid_id] = {bid.item, bid.buyer, bid.amount, bid.remaining_slots,
                        static_cast<int>(bid.status)};
    }
    json bounties = json::object();
    for (const auto& [bounty_id, bounty] : tokens_.bounties()) {
        bounties[bounty_id] = {bounty.question_id, bounty.sponsor, bounty.amount,
                               static_cast<int>(bounty.status)};
    }
    state["tokens"] = {{"accounts", std::move(accounts)},
                       {"minted", tokens_.total_minted()},
                       {"burned", tokens_.total_burned()},
                       {"joins", tokens_.join_count()},
                       {"bids", std::move(bids)},
                       {"bounties", std::move(bounties)}};
    return state.dump();
}

Ledger replay(const std::vector<LedgerEvent>& events, const LedgerConfig& config,
              std::uint64_t seed) {
    Ledger ledger(config, seed);
    for (const auto& ev : events) ledger.append_event(ev);
    return ledger;
}

void write_event_log(std::ostream& os, const std::vector<LedgerEvent>& events) {
    os << json{{"format", "peertruth-log"}, {"version", 1}}.dump() << '\n';
    for (const auto& ev : events) {
        os << event_to_json(ev).dump() << '\n';
    }
}

std::vector<LedgerEvent> read_event_log(std::istream& is) {
    std::vector<LedgerEvent> events;
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        json record = json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.is_object()) {
            throw LogParseError("line " + std::to_string(line_no) +
                                ": malformed event record", line_no);
        }
        if (!saw_header) {
            if (record.value("format", "") != "peertruth-log" ||
                record.value("version", 0) != 1) {
                throw LogParseError("line " + std::to_string(line_no) +
                                    ": missing or unsupported log header", line_no);
            }
            saw_header = true;
            continue;
        }
        try {
            events.push_back(event_from_json(record));
        } catch (const std::exception& e) {
            throw LogParseError("line " + std::to_string(line_no) + ": " + e.what(), line_no);
        }
    }
    return events;
}

json event_to_json(const LedgerEvent& ev) {
    return json{{"seq", ev.seq}, {"ts", ev.ts}, {"kind", to_string(ev.kind)},
                {"payload", ev.payload.is_null() ? json::object() : ev.payload}};
}

LedgerEvent event_from_json(const json& j) {
    LedgerEvent ev;
    ev.seq = j.at("seq").get<std::uint64_t>();
    ev.ts = j.at("ts").get<std::int64_t>();
    ev.kind = event_kind_from_string(j.at("kind").get<std::string>());
    ev.payload = j.value("payload", json::object());
    return ev;
}

}  // namespace peertruth

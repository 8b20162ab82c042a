#pragma once

// Random-but-valid event stream generator for replay tests. Candidate events
// are thrown at a scratch ledger; rejected ones are dropped, so the returned
// stream always replays cleanly. Deterministic in the seed.
//
// Published items use the original or quadratic mechanisms only: augmented
// items would retrain a forest per scoring pass, which the dedicated
// augmented tests cover at a smaller scale.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "peertruth/ledger.hpp"
#include "peertruth/rng.hpp"

namespace peertruth_test {

using namespace peertruth;

inline std::vector<LedgerEvent> fuzz_event_log(const LedgerConfig& config, std::uint64_t seed,
                                               int count) {
    Ledger scratch(config, seed);
    Rng rng(seed);
    std::vector<LedgerEvent> events;
    events.reserve(count);

    std::vector<std::string> users;
    std::vector<std::string> items;  // all published items
    std::vector<std::string> reports;
    std::vector<std::string> bids;
    std::vector<std::string> bounties;
    std::vector<std::pair<std::string, std::string>> channels;        // (item, question)
    std::vector<std::pair<std::string, std::string>> success_events;  // (item, event id)
    std::map<std::string, std::string> author_of;

    std::int64_t ts = 0;
    std::uint64_t seq = 1;
    const auto& labels = config.labels.names();

    auto pick = [&](const auto& v) -> decltype(v.front()) { return v[rng.index(v.size())]; };

    auto try_append = [&](EventKind kind, nlohmann::json payload) {
        LedgerEvent ev{seq, ts, kind, std::move(payload)};
        try {
            scratch.append_event(ev);
        } catch (const Error&) {
            return false;
        }
        events.push_back(std::move(ev));
        ++seq;
        return true;
    };

    int attempts = 0;
    while (static_cast<int>(events.size()) < count && attempts < count * 20) {
        ++attempts;
        ts += rng.index(1800);
        if (rng.index(300) == 0) ts += 40ll * 86400;  // age out some channels

        const int roll = static_cast<int>(rng.index(100));
        if (roll < 6 || users.size() < 3) {
            const std::string user = "u" + std::to_string(users.size());
            if (try_append(EventKind::UserJoined,
                           {{"user", user}, {"r0", static_cast<double>(rng.index(20))}})) {
                users.push_back(user);
            }
        } else if (roll < 14 || items.empty()) {
            const std::string id = "p" + std::to_string(items.size());
            const std::string author = pick(users);
            nlohmann::json payload{{"item", id}, {"author", author}};
            const bool quadratic = rng.index(5) == 0;
            if (quadratic) {
                payload["mechanism"] = "quadratic";
                payload["success_events"] = nlohmann::json::array(
                    {{{"id", "ev0"}, {"description", "cited within 3 years"}}});
            } else {
                payload["mechanism"] = "original";
            }
            if (try_append(EventKind::ProjectPublished, payload)) {
                items.push_back(id);
                author_of[id] = author;
                if (quadratic) {
                    success_events.emplace_back(id, "ev0");
                } else {
                    channels.emplace_back(id, kQuestionContribution);
                    channels.emplace_back(id, kQuestionDesign);
                }
            }
        } else if (roll < 20) {
            const std::string id = "rep" + std::to_string(reports.size());
            const std::string author = pick(users);
            nlohmann::json payload{
                {"item", id}, {"author", author}, {"mechanism", "original"}};
            if (!items.empty() && rng.index(2) == 0) payload["target"] = pick(items);
            if (try_append(EventKind::ReportSubmitted, payload)) {
                reports.push_back(id);
                items.push_back(id);
                author_of[id] = author;
                channels.emplace_back(id, kQuestionQuality);
            }
        } else if (roll < 65 && !channels.empty()) {
            const auto& [item, question] = pick(channels);
            try_append(EventKind::RatingSubmitted,
                       {{"rater", pick(users)},
                        {"item", item},
                        {"question", question},
                        {"label", labels[rng.index(labels.size())]}});
        } else if (roll < 70 && !success_events.empty()) {
            const auto& [item, event_id] = pick(success_events);
            try_append(EventKind::ProbabilisticRatingSubmitted, {{"rater", pick(users)},
                                                                 {"item", item},
                                                                 {"event", event_id},
                                                                 {"p", rng.real01()}});
        } else if (roll < 72 && !success_events.empty()) {
            const auto& [item, event_id] = pick(success_events);
            try_append(EventKind::EventResolved,
                       {{"item", item},
                        {"event", event_id},
                        {"outcome", static_cast<std::int64_t>(rng.index(2))}});
        } else if (roll < 75 && !channels.empty()) {
            const auto& [item, question] = pick(channels);
            try_append(EventKind::QuestionReset, {{"item", item},
                                                  {"question", question},
                                                  {"requester", author_of.at(item)}});
        } else if (roll < 78 && !channels.empty()) {
            const auto& [item, question] = pick(channels);
            try_append(EventKind::ScoringFinalized,
                       {{"item", item}, {"question", question}});
        } else if (roll < 84 && !items.empty()) {
            const std::string id = "bid" + std::to_string(bids.size());
            if (try_append(EventKind::ReviewBidPlaced,
                           {{"bid", id},
                            {"item", pick(items)},
                            {"buyer", pick(users)},
                            {"amount", static_cast<std::int64_t>(1 + rng.index(30))},
                            {"slots", static_cast<std::int64_t>(1 + rng.index(3))}})) {
                bids.push_back(id);
            }
        } else if (roll < 88 && !bids.empty() && !reports.empty()) {
            const std::string report = pick(reports);
            try_append(EventKind::ReviewFulfilled, {{"bid", pick(bids)},
                                                    {"reviewer", author_of.at(report)},
                                                    {"report", report}});
        } else if (roll < 90 && !bids.empty()) {
            try_append(EventKind::ReviewBidCancelled,
                       {{"bid", pick(bids)}, {"requester", pick(users)}});
        } else if (roll < 94) {
            const std::string id = "bounty" + std::to_string(bounties.size());
            if (try_append(EventKind::BountyPosted,
                           {{"bounty", id},
                            {"question", "open-question-" + std::to_string(rng.index(6))},
                            {"sponsor", pick(users)},
                            {"amount", static_cast<std::int64_t>(1 + rng.index(40))}})) {
                bounties.push_back(id);
            }
        } else if (roll < 96 && !bounties.empty() && !items.empty()) {
            const std::string item = pick(items);
            try_append(EventKind::BountyClaimed, {{"bounty", pick(bounties)},
                                                  {"claimant", author_of.at(item)},
                                                  {"item", item}});
        } else if (!items.empty()) {
            const std::string item = pick(items);
            try_append(EventKind::IdeaAdopted,
                       {{"item", item},
                        {"adopter", pick(users)},
                        {"price", static_cast<std::int64_t>(rng.index(25))}});
        }
    }
    return events;
}

}  // namespace peertruth_test

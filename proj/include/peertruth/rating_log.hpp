#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "peertruth/errors.hpp"

namespace peertruth {

// One rater's categorical label for one item on one question channel.
struct RatingEvent {
    std::string rater;
    std::string item;
    std::string question;
    std::string label;
    std::uint64_t seq = 0;
};

// In-memory view of the active ratings the scoring mechanism reads. Ratings
// are grouped per (item, question); iteration order is sorted by id so every
// derived quantity is independent of insertion order.
class RatingLog {
  public:
    void add(RatingEvent ev) {
        auto& channel = by_item_[ev.item][ev.question];
        for (const auto& existing : channel) {
            if (existing.rater == ev.rater) {
                throw InvalidPayload("rater '" + ev.rater + "' already rated item '" +
                                     ev.item + "' question '" + ev.question + "'");
            }
        }
        channel.push_back(std::move(ev));
    }

    // Ratings of one channel in submission order, or nullptr when none exist.
    const std::vector<RatingEvent>* ratings(const std::string& item,
                                            const std::string& question) const {
        auto it = by_item_.find(item);
        if (it == by_item_.end()) return nullptr;
        auto qt = it->second.find(question);
        if (qt == it->second.end() || qt->second.empty()) return nullptr;
        return &qt->second;
    }

    // Items other than `item` that carry at least one rating on `question`
    // not authored by `rater`. Sorted by item id.
    std::vector<std::string> eligible_other_items(const std::string& item,
                                                  const std::string& rater,
                                                  const std::string& question) const {
        std::vector<std::string> out;
        for (const auto& [id, channels] : by_item_) {
            if (id == item) continue;
            auto qt = channels.find(question);
            if (qt == channels.end()) continue;
            for (const auto& ev : qt->second) {
                if (ev.rater != rater) {
                    out.push_back(id);
                    break;
                }
            }
        }
        return out;
    }

    const std::map<std::string, std::map<std::string, std::vector<RatingEvent>>>& items() const {
        return by_item_;
    }

    bool empty() const { return by_item_.empty(); }

  private:
    std::map<std::string, std::map<std::string, std::vector<RatingEvent>>> by_item_;
};

}  // namespace peertruth

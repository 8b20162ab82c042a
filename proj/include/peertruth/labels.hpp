#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "peertruth/errors.hpp"

namespace peertruth {

// Ordered finite set of categorical rating labels. The index <-> label
// bijection is stable: probability vectors and per-label weights use the
// position in the constructor sequence.
class LabelSet {
  public:
    explicit LabelSet(std::vector<std::string> labels) : names_(std::move(labels)) {
        if (names_.size() < 2) {
            throw InvalidPayload("label set needs at least two labels");
        }
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (!index_.emplace(names_[i], i).second) {
                throw InvalidPayload("duplicate label '" + names_[i] + "'");
            }
        }
    }

    // unsatisfactory / satisfactory / exceptional
    static LabelSet use() { return LabelSet({"u", "s", "e"}); }

    std::size_t size() const { return names_.size(); }
    const std::string& name(std::size_t idx) const { return names_.at(idx); }
    const std::vector<std::string>& names() const { return names_; }

    bool contains(std::string_view label) const {
        return index_.find(label) != index_.end();
    }

    std::optional<std::size_t> find(std::string_view label) const {
        auto it = index_.find(label);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t index_of(std::string_view label) const {
        auto it = index_.find(label);
        if (it == index_.end()) {
            throw InvalidPayload("label '" + std::string(label) + "' not in label set");
        }
        return it->second;
    }

    bool operator==(const LabelSet& other) const { return names_ == other.names_; }

  private:
    std::vector<std::string> names_;
    std::map<std::string, std::size_t, std::less<>> index_;
};

}  // namespace peertruth

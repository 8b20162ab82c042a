#include "peertruth/tokens.hpp"

#include <cmath>

namespace peertruth {

const Account& TokenLedger::account(const std::string& user) const {
    auto it = accounts_.find(user);
    if (it == accounts_.end()) {
        throw InvalidPayload("no token account for user '" + user + "'");
    }
    return it->second;
}

Account& TokenLedger::require_account(const std::string& user) {
    auto it = accounts_.find(user);
    if (it == accounts_.end()) {
        throw InvalidPayload("no token account for user '" + user + "'");
    }
    return it->second;
}

void TokenLedger::mint_on_join(const std::string& user) {
    auto [it, inserted] = accounts_.emplace(user, Account{});
    if (!inserted) {
        throw DuplicateAccount("user '" + user + "' already has a token account");
    }
    it->second.available = policy_.mint_on_join;
    minted_ += policy_.mint_on_join;
    ++joins_;
}

const ReviewBid& TokenLedger::place_review_bid(const std::string& bid_id,
                                               const std::string& buyer,
                                               const std::string& item, std::int64_t amount,
                                               int slots) {
    if (amount <= 0) throw InvalidPayload("bid amount must be positive");
    if (slots <= 0) throw InvalidPayload("bid slot count must be positive");
    if (bids_.count(bid_id) != 0) throw InvalidPayload("bid id '" + bid_id + "' already used");
    Account& acct = require_account(buyer);
    const std::int64_t total = amount * slots;
    if (acct.available < total) {
        throw InsufficientBalance("buyer '" + buyer + "' cannot escrow " + std::to_string(total));
    }
    acct.available -= total;
    acct.escrowed += total;
    ReviewBid bid{bid_id, item, buyer, amount, slots, ReviewBid::Status::open};
    return bids_.emplace(bid_id, std::move(bid)).first->second;
}

bool TokenLedger::fulfill_review(const std::string& bid_id, const std::string& reviewer,
                                 double report_rating_total) {
    auto it = bids_.find(bid_id);
    if (it == bids_.end()) throw InvalidPayload("unknown bid '" + bid_id + "'");
    ReviewBid& bid = it->second;
    if (bid.status != ReviewBid::Status::open || bid.remaining_slots <= 0) {
        throw BidExhausted("bid '" + bid_id + "' is not open");
    }
    if (reviewer == bid.buyer) {
        throw SelfDealing("buyer cannot fulfill their own review bid");
    }
    if (report_rating_total < policy_.satisfactory_threshold) {
        return false;  // escrow retained, slot unconsumed
    }
    Account& buyer = require_account(bid.buyer);
    Account& rev = require_account(reviewer);
    buyer.escrowed -= bid.amount;
    rev.available += bid.amount;
    if (--bid.remaining_slots == 0) {
        bid.status = ReviewBid::Status::exhausted;
    }
    return true;
}

void TokenLedger::cancel_review_bid(const std::string& bid_id, const std::string& requester) {
    auto it = bids_.find(bid_id);
    if (it == bids_.end()) throw InvalidPayload("unknown bid '" + bid_id + "'");
    ReviewBid& bid = it->second;
    if (requester != bid.buyer) {
        throw SelfDealing("only the buyer may cancel a review bid");
    }
    if (bid.status != ReviewBid::Status::open) {
        throw BidExhausted("bid '" + bid_id + "' is not open");
    }
    Account& buyer = require_account(bid.buyer);
    const std::int64_t refund = bid.amount * bid.remaining_slots;
    buyer.escrowed -= refund;
    buyer.available += refund;
    bid.remaining_slots = 0;
    bid.status = ReviewBid::Status::cancelled;
}

void TokenLedger::post_bounty(const std::string& bounty_id, const std::string& question_id,
                              const std::string& sponsor, std::int64_t amount) {
    if (amount <= 0) throw InvalidPayload("bounty amount must be positive");
    if (bounties_.count(bounty_id) != 0) {
        throw InvalidPayload("bounty id '" + bounty_id + "' already used");
    }
    Account& acct = require_account(sponsor);
    if (acct.available < amount) {
        throw InsufficientBalance("sponsor '" + sponsor + "' cannot escrow " +
                                  std::to_string(amount));
    }
    acct.available -= amount;
    acct.escrowed += amount;
    bounties_.emplace(bounty_id, Bounty{bounty_id, question_id, sponsor, amount,
                                        Bounty::Status::open});
}

void TokenLedger::claim_bounty(const std::string& bounty_id, const std::string& claimant,
                               double item_rating_total) {
    auto it = bounties_.find(bounty_id);
    if (it == bounties_.end()) throw InvalidPayload("unknown bounty '" + bounty_id + "'");
    Bounty& bounty = it->second;
    if (bounty.status != Bounty::Status::open) {
        throw BountyClosed("bounty '" + bounty_id + "' was already claimed");
    }
    if (item_rating_total < policy_.bounty_claim_threshold) {
        throw BelowThreshold("item rating total does not meet the bounty claim threshold");
    }
    Account& sponsor = require_account(bounty.sponsor);
    Account& winner = require_account(claimant);
    sponsor.escrowed -= bounty.amount;
    winner.available += bounty.amount;
    bounty.status = Bounty::Status::claimed;
}

void TokenLedger::adopt_idea(const std::string& adopter, const std::string& author,
                             std::int64_t price) {
    if (price < 0) throw InvalidPayload("adoption price cannot be negative");
    if (adopter == author) {
        throw SelfDealing("authors cannot adopt their own ideas");
    }
    Account& from = require_account(adopter);
    Account& to = require_account(author);
    if (from.available < price) {
        throw InsufficientBalance("adopter '" + adopter + "' cannot pay " +
                                  std::to_string(price));
    }
    from.available -= price;
    to.available += price;
}

void TokenLedger::apply_score_reward(const std::string& user, double score) {
    if (policy_.tokens_per_score <= 0.0) return;
    Account& acct = require_account(user);
    const auto delta = static_cast<std::int64_t>(std::llround(score * policy_.tokens_per_score));
    if (delta >= 0) {
        acct.available += delta;
        minted_ += delta;
    } else {
        const std::int64_t burn = std::min(acct.available, -delta);  // never below zero
        acct.available -= burn;
        burned_ += burn;
    }
}

std::int64_t TokenLedger::circulating() const {
    std::int64_t total = 0;
    for (const auto& [user, acct] : accounts_) {
        total += acct.available + acct.escrowed;
    }
    return total;
}

std::int64_t TokenLedger::open_commitments() const {
    std::int64_t total = 0;
    for (const auto& [id, bid] : bids_) {
        if (bid.status == ReviewBid::Status::open) {
            total += bid.amount * bid.remaining_slots;
        }
    }
    for (const auto& [id, bounty] : bounties_) {
        if (bounty.status == Bounty::Status::open) {
            total += bounty.amount;
        }
    }
    return total;
}

}  // namespace peertruth

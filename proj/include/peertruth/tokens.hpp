#pragma once

// Platform token accounting: minting tied to user joins, review bids with
// escrow, bounties, and idea-adoption transfers. Balances are integral and
// the ledger never creates or destroys tokens outside of mint/burn, so
// sum(available + escrowed) == minted - burned holds after every operation.

#include <cstdint>
#include <map>
#include <string>

#include "peertruth/errors.hpp"

namespace peertruth {

struct Account {
    std::int64_t available = 0;
    std::int64_t escrowed = 0;
};

struct ReviewBid {
    enum class Status { open, exhausted, cancelled };
    std::string id;
    std::string item;
    std::string buyer;
    std::int64_t amount = 0;  // per fulfilled review
    int remaining_slots = 0;
    Status status = Status::open;
};

struct Bounty {
    enum class Status { open, claimed };
    std::string id;
    std::string question_id;
    std::string sponsor;
    std::int64_t amount = 0;
    Status status = Status::open;
};

struct TokenPolicy {
    std::int64_t mint_on_join = 100;  // T0
    // minimum finalized rating total for a report to count as satisfactory
    double satisfactory_threshold = 0.0;
    // minimum finalized rating total for an item to claim a bounty
    double bounty_claim_threshold = 0.0;
    // tokens granted per unit of accuracy score (0 disables the flow)
    double tokens_per_score = 0.0;
};

class TokenLedger {
  public:
    explicit TokenLedger(TokenPolicy policy = {}) : policy_(policy) {}

    const TokenPolicy& policy() const { return policy_; }
    const std::map<std::string, Account>& accounts() const { return accounts_; }
    const std::map<std::string, ReviewBid>& bids() const { return bids_; }
    const std::map<std::string, Bounty>& bounties() const { return bounties_; }

    bool has_account(const std::string& user) const { return accounts_.count(user) != 0; }
    const Account& account(const std::string& user) const;

    // Creates the account and mints T0 into it.
    void mint_on_join(const std::string& user);

    // Escrows amount * slots from the buyer.
    const ReviewBid& place_review_bid(const std::string& bid_id, const std::string& buyer,
                                      const std::string& item, std::int64_t amount, int slots);

    // Pays the bid amount from escrow to the reviewer when the report's
    // finalized rating total meets the satisfactory threshold; otherwise the
    // escrow is retained and the slot stays unconsumed. Returns whether the
    // transfer happened.
    bool fulfill_review(const std::string& bid_id, const std::string& reviewer,
                        double report_rating_total);

    // Refunds the remaining escrow to the buyer.
    void cancel_review_bid(const std::string& bid_id, const std::string& requester);

    void post_bounty(const std::string& bounty_id, const std::string& question_id,
                     const std::string& sponsor, std::int64_t amount);

    // item_rating_total must come from a finalized item.
    void claim_bounty(const std::string& bounty_id, const std::string& claimant,
                      double item_rating_total);

    void adopt_idea(const std::string& adopter, const std::string& author, std::int64_t price);

    // Accuracy-score token rewards: positive scores mint rate-scaled tokens,
    // negative ones burn from the available balance, clamped at zero.
    void apply_score_reward(const std::string& user, double score);

    std::int64_t total_minted() const { return minted_; }
    std::int64_t total_burned() const { return burned_; }
    std::int64_t join_count() const { return joins_; }

    std::int64_t circulating() const;    // sum(available + escrowed)
    std::int64_t open_commitments() const;  // escrow owed to open bids + bounties

  private:
    Account& require_account(const std::string& user);

    TokenPolicy policy_;
    std::map<std::string, Account> accounts_;
    std::map<std::string, ReviewBid> bids_;
    std::map<std::string, Bounty> bounties_;
    std::int64_t minted_ = 0;
    std::int64_t burned_ = 0;
    std::int64_t joins_ = 0;
};

}  // namespace peertruth

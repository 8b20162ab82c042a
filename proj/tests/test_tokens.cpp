#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "peertruth/rng.hpp"
#include "peertruth/tokens.hpp"

using namespace peertruth;

TEST_CASE("minting is tied to joins") {
    TokenLedger ledger;
    ledger.mint_on_join("alice");
    CHECK(ledger.circulating() == 100);
    ledger.mint_on_join("bob");
    CHECK(ledger.circulating() == 200);
    CHECK_THROWS_AS(ledger.mint_on_join("alice"), DuplicateAccount);
    CHECK(ledger.join_count() == 2);
}

TEST_CASE("review bids escrow amount times slots") {
    TokenLedger ledger;
    ledger.mint_on_join("buyer");
    ledger.place_review_bid("bid1", "buyer", "p1", 30, 2);
    CHECK(ledger.account("buyer").available == 40);
    CHECK(ledger.account("buyer").escrowed == 60);

    CHECK_THROWS_AS(ledger.place_review_bid("bid2", "buyer", "p1", 30, 2),
                    InsufficientBalance);
    CHECK_THROWS_AS(ledger.place_review_bid("bid3", "buyer", "p1", 30, 0), InvalidPayload);
    CHECK_THROWS_AS(ledger.place_review_bid("bid4", "buyer", "p1", 0, 1), InvalidPayload);
}

TEST_CASE("fulfilling a review pays from escrow for satisfactory reports") {
    TokenLedger ledger;
    ledger.mint_on_join("buyer");
    ledger.mint_on_join("reviewer");
    ledger.place_review_bid("bid", "buyer", "p1", 30, 2);

    // below the satisfactory threshold: escrow retained, slot unconsumed
    CHECK_FALSE(ledger.fulfill_review("bid", "reviewer", -2.0));
    CHECK(ledger.account("reviewer").available == 100);
    CHECK(ledger.account("buyer").escrowed == 60);
    CHECK(ledger.bids().at("bid").remaining_slots == 2);

    CHECK(ledger.fulfill_review("bid", "reviewer", 5.0));
    CHECK(ledger.account("reviewer").available == 130);
    CHECK(ledger.account("buyer").escrowed == 30);

    CHECK_THROWS_AS(ledger.fulfill_review("bid", "buyer", 5.0), SelfDealing);

    CHECK(ledger.fulfill_review("bid", "reviewer", 0.0));  // threshold is >= 0
    CHECK(ledger.bids().at("bid").status == ReviewBid::Status::exhausted);
    CHECK_THROWS_AS(ledger.fulfill_review("bid", "reviewer", 5.0), BidExhausted);
}

TEST_CASE("cancelling a bid refunds the remaining escrow") {
    TokenLedger ledger;
    ledger.mint_on_join("buyer");
    ledger.place_review_bid("bid", "buyer", "p1", 25, 3);
    CHECK_THROWS_AS(ledger.cancel_review_bid("bid", "someone"), SelfDealing);
    ledger.cancel_review_bid("bid", "buyer");
    CHECK(ledger.account("buyer").available == 100);
    CHECK(ledger.account("buyer").escrowed == 0);
    CHECK_THROWS_AS(ledger.cancel_review_bid("bid", "buyer"), BidExhausted);
}

TEST_CASE("bounties pay the first qualifying claimant") {
    TokenLedger ledger;
    ledger.mint_on_join("sponsor");
    ledger.mint_on_join("researcher");
    ledger.post_bounty("b1", "open-question", "sponsor", 40);
    CHECK(ledger.account("sponsor").escrowed == 40);

    CHECK_THROWS_AS(ledger.claim_bounty("b1", "researcher", -1.0), BelowThreshold);
    ledger.claim_bounty("b1", "researcher", 3.0);
    CHECK(ledger.account("researcher").available == 140);
    CHECK(ledger.account("sponsor").escrowed == 0);
    CHECK_THROWS_AS(ledger.claim_bounty("b1", "researcher", 3.0), BountyClosed);
}

TEST_CASE("idea adoption transfers the price") {
    TokenLedger ledger;
    ledger.mint_on_join("author");
    ledger.mint_on_join("adopter");
    ledger.adopt_idea("adopter", "author", 10);
    CHECK(ledger.account("author").available == 110);
    CHECK(ledger.account("adopter").available == 90);

    ledger.adopt_idea("adopter", "author", 0);  // free adoption is a no-op transfer
    CHECK(ledger.account("adopter").available == 90);

    CHECK_THROWS_AS(ledger.adopt_idea("author", "author", 5), SelfDealing);
    CHECK_THROWS_AS(ledger.adopt_idea("adopter", "author", 1000), InsufficientBalance);
}

TEST_CASE("score rewards mint and burn with a floor at zero") {
    TokenPolicy policy;
    policy.mint_on_join = 5;
    policy.tokens_per_score = 1.0;
    TokenLedger ledger(policy);
    ledger.mint_on_join("u");
    ledger.apply_score_reward("u", 3.0);
    CHECK(ledger.account("u").available == 8);
    CHECK(ledger.total_minted() == 8);

    ledger.apply_score_reward("u", -100.0);  // clamped: burns only what exists
    CHECK(ledger.account("u").available == 0);
    CHECK(ledger.total_burned() == 8);
    CHECK(ledger.circulating() == ledger.total_minted() - ledger.total_burned());
}

TEST_CASE("property: conservation and escrow accounting under random operations") {
    Rng rng(9001);
    TokenLedger ledger;
    std::vector<std::string> users;
    std::vector<std::string> bids;
    std::vector<std::string> bounties;
    int accepted = 0;
    int attempts = 0;

    while (accepted < 2000 && attempts < 20000) {
        ++attempts;
        const int op = static_cast<int>(rng.index(7));
        try {
            switch (op) {
                case 0: {
                    const std::string user = "u" + std::to_string(users.size());
                    ledger.mint_on_join(user);
                    users.push_back(user);
                    break;
                }
                case 1: {
                    if (users.empty()) continue;
                    const std::string id = "bid" + std::to_string(bids.size());
                    ledger.place_review_bid(id, users[rng.index(users.size())],
                                            "item" + std::to_string(rng.index(5)),
                                            1 + static_cast<std::int64_t>(rng.index(40)),
                                            1 + static_cast<int>(rng.index(3)));
                    bids.push_back(id);
                    break;
                }
                case 2: {
                    if (bids.empty() || users.empty()) continue;
                    ledger.fulfill_review(bids[rng.index(bids.size())],
                                          users[rng.index(users.size())],
                                          rng.real01() * 10.0 - 3.0);
                    break;
                }
                case 3: {
                    if (bids.empty() || users.empty()) continue;
                    ledger.cancel_review_bid(bids[rng.index(bids.size())],
                                             users[rng.index(users.size())]);
                    break;
                }
                case 4: {
                    if (users.empty()) continue;
                    const std::string id = "bounty" + std::to_string(bounties.size());
                    ledger.post_bounty(id, "q" + std::to_string(rng.index(5)),
                                       users[rng.index(users.size())],
                                       1 + static_cast<std::int64_t>(rng.index(60)));
                    bounties.push_back(id);
                    break;
                }
                case 5: {
                    if (bounties.empty() || users.empty()) continue;
                    ledger.claim_bounty(bounties[rng.index(bounties.size())],
                                        users[rng.index(users.size())],
                                        rng.real01() * 6.0 - 1.0);
                    break;
                }
                case 6: {
                    if (users.size() < 2) continue;
                    ledger.adopt_idea(users[rng.index(users.size())],
                                      users[rng.index(users.size())],
                                      static_cast<std::int64_t>(rng.index(50)));
                    break;
                }
            }
            ++accepted;
        } catch (const Error&) {
            // rejected operations must leave the ledger untouched
        }

        CHECK(ledger.circulating() == 100 * ledger.join_count());
        std::int64_t escrow_total = 0;
        for (const auto& [user, acct] : ledger.accounts()) {
            CHECK(acct.available >= 0);
            CHECK(acct.escrowed >= 0);
            escrow_total += acct.escrowed;
        }
        CHECK(escrow_total == ledger.open_commitments());
    }
    CHECK(accepted >= 2000);
}

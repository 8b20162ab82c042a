// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Every tolerance is pinned here; runtimes are measured and
// enforced where budgeted.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "peertruth/csv.hpp"
#include "peertruth/experiment.hpp"
#include "peertruth/forest.hpp"
#include "peertruth/ledger.hpp"
#include "peertruth/mechanism.hpp"
#include "peertruth/scoring_variants.hpp"
#include "peertruth/tokens.hpp"
#include "peertruth/world.hpp"
#include "support/log_fuzzer.hpp"

using namespace peertruth;

namespace {

int g_failures = 0;

void run_criterion(int id, const std::string& name,
                   const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool pass = false;
    const auto start = std::chrono::steady_clock::now();
    try {
        pass = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char line[512];
    std::snprintf(line, sizeof(line), "[%s] %d. %s (%.1fs)%s%s", pass ? "PASS" : "FAIL", id,
                  name.c_str(), secs, detail.empty() ? "" : " - ", detail.c_str());
    std::cout << line << std::endl;
    if (!pass) ++g_failures;
}

WorldConfig acceptance_world(std::uint64_t seed) {
    WorldConfig world = WorldConfig::default_world();  // 500 items, 5 raters each
    world.seed = seed;
    return world;
}

ExperimentParams acceptance_params(int reps) {
    ExperimentParams params;
    params.replications = reps;
    return params;
}

double ci_low(const StrategyStat& row) { return row.mean - 1.96 * row.stderr_; }
double ci_high(const StrategyStat& row) { return row.mean + 1.96 * row.stderr_; }

const StrategyStat& row_for(const ExperimentResult& result, const std::string& name) {
    for (const auto& row : result.rows) {
        if (row.strategy == name) return row;
    }
    throw Error("no result row for strategy " + name);
}

// ---- criterion 5 oracle: analytic conditional label distribution ----------

double cell_weight(const WorldConfig& world, const std::vector<int>& cell) {
    double weight = 0.0;
    for (std::size_t t = 0; t < world.state_count(); ++t) {
        double p = world.prior[t];
        for (std::size_t f = 0; f < cell.size(); ++f) {
            p *= world.descriptor_emissions[f][t][cell[f]];
        }
        weight += p;
    }
    return weight;
}

std::vector<double> analytic_conditional(const WorldConfig& world,
                                         const std::vector<int>& cell) {
    std::vector<double> posterior(world.state_count(), 0.0);
    double z = 0.0;
    for (std::size_t t = 0; t < world.state_count(); ++t) {
        double p = world.prior[t];
        for (std::size_t f = 0; f < cell.size(); ++f) {
            p *= world.descriptor_emissions[f][t][cell[f]];
        }
        posterior[t] = p;
        z += p;
    }
    std::vector<double> conditional(world.labels.size(), 0.0);
    for (std::size_t t = 0; t < world.state_count(); ++t) {
        for (std::size_t s = 0; s < conditional.size(); ++s) {
            conditional[s] += posterior[t] / z * world.confusion[t][s];
        }
    }
    return conditional;
}

// Weighted held-out L1 of a forest trained on `rows` truthful ratings.
double forest_l1_at(long rows, std::uint64_t seed) {
    WorldConfig world = acceptance_world(seed);
    world.item_count = static_cast<int>((rows + world.ratings_per_item - 1) /
                                        world.ratings_per_item);
    const SimWorld sim = generate_world(world);

    TrainingSet data;
    data.schema = world.schema();
    data.label_count = world.labels.size();
    for (const auto& item : sim.items) {
        for (int signal : item.signals) {
            data.rows.push_back(TrainingRow{item.descriptors, signal, item.id});
        }
    }
    ForestConfig config;  // defaults: 200 trees, min leaf 5
    config.seed = derive_seed(seed, "forest");
    const Forest forest = train_forest(data, config);

    double weighted = 0.0;
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            const std::vector<int> cell = {a, b};
            DescriptorVector d;
            d.categorical = cell;
            const auto predicted = forest.predict_proba(d);
            const auto truth = analytic_conditional(world, cell);
            double l1 = 0.0;
            for (std::size_t k = 0; k < truth.size(); ++k) {
                l1 += std::abs(predicted[k] - truth[k]);
            }
            weighted += cell_weight(world, cell) * l1;
        }
    }
    return weighted;  // cell weights sum to 1
}

// ---- criterion 7 helper: reputation rendering ------------------------------

std::string dump_reputation(const Ledger& ledger) {
    std::ostringstream os;
    for (const auto& [user, r] : ledger.reputation()) {
        os << user << ':' << format_double(r.r0) << ',' << format_double(r.r_projects) << ','
           << format_double(r.r_reports) << ',' << format_double(r.e_projects) << ','
           << format_double(r.e_reports) << ';';
    }
    return os.str();
}

bool reset_counterfactuals_match(std::uint64_t seed, int trials, std::string& detail) {
    LedgerConfig config;
    config.finalize_after_ratings = 0;  // keep every channel live so resets are
    config.finalize_after_seconds = 0;  // the only archiving path
    Rng meta(seed);
    for (int trial = 0; trial < trials; ++trial) {
        const int item_count = 3 + static_cast<int>(meta.index(6));
        const int rater_count = 3 + static_cast<int>(meta.index(4));
        const int reset_item = static_cast<int>(meta.index(item_count));
        const char* questions[] = {kQuestionContribution, kQuestionDesign};
        const std::string reset_question = questions[meta.index(2)];

        std::vector<std::vector<std::vector<int>>> labels(
            item_count, std::vector<std::vector<int>>(2));
        for (int i = 0; i < item_count; ++i) {
            for (int q = 0; q < 2; ++q) {
                for (int r = 0; r < rater_count; ++r) {
                    labels[i][q].push_back(
                        meta.index(3) == 0 ? -1 : static_cast<int>(meta.index(3)));
                }
            }
        }

        auto build = [&](bool include_reset_ratings) {
            Ledger ledger(config, 11);
            std::uint64_t seq = 0;
            auto ev = [&](EventKind kind, nlohmann::json payload) {
                ledger.append_event(LedgerEvent{++seq, 0, kind, std::move(payload)});
            };
            for (int i = 0; i < item_count; ++i) {
                ev(EventKind::UserJoined, {{"user", "a" + std::to_string(i)}});
            }
            for (int r = 0; r < rater_count; ++r) {
                ev(EventKind::UserJoined, {{"user", "w" + std::to_string(r)}});
            }
            for (int i = 0; i < item_count; ++i) {
                ev(EventKind::ProjectPublished,
                   {{"item", "p" + std::to_string(i)}, {"author", "a" + std::to_string(i)}});
            }
            const LabelSet set = LabelSet::use();
            for (int i = 0; i < item_count; ++i) {
                for (int q = 0; q < 2; ++q) {
                    const bool is_reset_channel =
                        i == reset_item && questions[q] == reset_question;
                    if (!include_reset_ratings && is_reset_channel) continue;
                    for (int r = 0; r < rater_count; ++r) {
                        if (labels[i][q][r] < 0) continue;
                        ev(EventKind::RatingSubmitted,
                           {{"rater", "w" + std::to_string(r)},
                            {"item", "p" + std::to_string(i)},
                            {"question", questions[q]},
                            {"label", set.name(labels[i][q][r])}});
                    }
                }
            }
            if (include_reset_ratings) {
                ev(EventKind::QuestionReset,
                   {{"item", "p" + std::to_string(reset_item)},
                    {"question", reset_question},
                    {"requester", "a" + std::to_string(reset_item)}});
            }
            return dump_reputation(ledger);
        };

        if (build(true) != build(false)) {
            detail = "counterfactual mismatch at trial " + std::to_string(trial);
            return false;
        }
    }
    return true;
}

}  // namespace

int main() {
    run_criterion(1, "truthful positivity under the original mechanism", [](std::string& d) {
        const auto start = std::chrono::steady_clock::now();
        const WorldConfig world = acceptance_world(20240601);
        const auto sp = check_self_predicting(world);
        if (!sp.holds) {
            d = "default world fails the self-predicting condition";
            return false;
        }
        const auto result = run_experiment(world, StrategyAssignment::all(StrategySpec::truthful()),
                                           MechanismKind::original, acceptance_params(50));
        const auto& row = row_for(result, "truthful");
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        d = "mean=" + format_double(row.mean) + " ci=[" + format_double(ci_low(row)) + "," +
            format_double(ci_high(row)) + "] reps=" + std::to_string(row.reps);
        return row.mean > 0.0 && ci_low(row) > 0.0 && row.reps == 50 && secs < 60.0;
    });

    run_criterion(2, "constant-strategy scores are exactly zero", [](std::string& d) {
        // direct sweep: every score of an all-constant corpus is exactly 0
        WorldConfig world = acceptance_world(77);
        world.item_count = 100;
        const SimWorld sim = generate_world(world);
        for (PeerMode mode : {PeerMode::expectation, PeerMode::sampled}) {
            RatingLog log;
            for (const auto& item : sim.items) {
                for (int r : item.raters) {
                    log.add(RatingEvent{"r" + std::to_string(r), item.id, "q", "e", 0});
                }
            }
            ScoreParams params;
            params.peer_mode = mode;
            for (const auto& item : sim.items) {
                for (const auto& [rater, score] : score_item_ratings(log, item.id, "q",
                                                                     params, 5)) {
                    if (score.value != 0.0) {
                        d = "nonzero score " + format_double(score.value) + " on " + item.id;
                        return false;
                    }
                }
            }
        }
        // aggregate view: mean and spread are exactly zero as well
        const auto result =
            run_experiment(acceptance_world(78), StrategyAssignment::all(StrategySpec::constant("e")),
                           MechanismKind::original, acceptance_params(10));
        const auto& row = row_for(result, "constant(e)");
        d = "mean=" + format_double(row.mean) + " stderr=" + format_double(row.stderr_) +
            " samples=" + std::to_string(row.samples);
        return row.mean == 0.0 && row.stderr_ == 0.0 && row.samples > 0;
    });

    run_criterion(3, "descriptor-keyed strategies profit under original scoring",
                  [](std::string& d) {
                      WorldConfig world = acceptance_world(31337);
                      world.item_count = 300;
                      const auto result = run_experiment(
                          world, StrategyAssignment::all(StrategySpec::descriptor_keyed(0)),
                          MechanismKind::original, acceptance_params(20));
                      const auto& row = row_for(result, "map(feature0)");
                      d = "mean=" + format_double(row.mean) + " ci_low=" +
                          format_double(ci_low(row)) + " (threshold 0.1*alpha=0.1)";
                      return row.mean > 0.1 && ci_low(row) > 0.0;
                  });

    run_criterion(4, "augmented scoring drives the same strategy to zero", [](std::string& d) {
        const auto start = std::chrono::steady_clock::now();
        const std::vector<long> schedule = {1000, 5000, 20000};
        const auto result =
            convergence_curve(acceptance_world(2029), StrategySpec::descriptor_keyed(0),
                              MechanismKind::augmented, schedule, acceptance_params(10));
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::ostringstream os;
        bool nonincreasing = true;
        for (std::size_t i = 0; i < result.curve.size(); ++i) {
            os << result.curve[i].corpus_size << ":"
               << format_double(result.curve[i].mean_abs_score) << " ";
            if (i > 0) {
                nonincreasing = nonincreasing &&
                                result.curve[i].mean_abs_score <=
                                    result.curve[i - 1].mean_abs_score + 1e-12;
            }
        }
        d = "mean|score| " + os.str();
        return nonincreasing && result.curve.back().mean_abs_score < 0.05 && secs < 300.0;
    });

    run_criterion(5, "forest consistency on the synthetic generator", [](std::string& d) {
        const std::vector<long> schedule = {1000, 5000, 20000};
        std::vector<double> errors;
        std::ostringstream os;
        for (long rows : schedule) {
            double total = 0.0;
            const int reps = 3;
            for (int rep = 0; rep < reps; ++rep) {
                total += forest_l1_at(rows, derive_seed(99, "l1", rows, rep));
            }
            errors.push_back(total / reps);
            os << rows << ":" << format_double(errors.back()) << " ";
        }
        d = "mean L1 " + os.str();
        bool nonincreasing = true;
        for (std::size_t i = 1; i < errors.size(); ++i) {
            nonincreasing = nonincreasing && errors[i] <= errors[i - 1] + 1e-12;
        }
        return nonincreasing && errors.back() < 0.05;
    });

    run_criterion(6, "quadratic rule is proper on the reporting grid", [](std::string& d) {
        for (double q : {0.1, 0.3, 0.7}) {
            for (double p_b : {0.5, q, 1.0 - q}) {
                double best_p = -1.0;
                double best_value = -1e18;
                for (int i = 0; i <= 100; ++i) {
                    const double p = i / 100.0;
                    const double expected = q * quadratic_accuracy(p, p_b, 1) +
                                            (1.0 - q) * quadratic_accuracy(p, p_b, 0);
                    if (expected > best_value) {
                        best_value = expected;
                        best_p = p;
                    }
                }
                if (std::abs(best_p - q) > 0.01 + 1e-12) {
                    d = "argmax " + format_double(best_p) + " for q=" + format_double(q) +
                        " p_b=" + format_double(p_b);
                    return false;
                }
            }
        }
        d = "argmax at the true probability for all q and benchmarks";
        return true;
    });

    run_criterion(7, "replay determinism and reset isolation", [](std::string& d) {
        LedgerConfig config;
        const auto events = peertruth_test::fuzz_event_log(config, 4242, 10000);
        if (events.size() != 10000) {
            d = "fuzzer produced only " + std::to_string(events.size()) + " events";
            return false;
        }
        const std::string once = replay(events, config, 3).canonical_state();
        const std::string twice = replay(events, config, 3).canonical_state();
        if (once != twice) {
            d = "two replays of the same 10k-event log differ";
            return false;
        }
        if (!reset_counterfactuals_match(888, 20, d)) return false;
        d = "10k-event replay byte-identical; 20 reset counterfactuals exact";
        return true;
    });

    run_criterion(8, "token conservation under random market operations", [](std::string& d) {
        Rng rng(606);
        TokenLedger ledger;
        std::vector<std::string> users;
        std::vector<std::string> bids;
        std::vector<std::string> bounties;
        int accepted = 0;
        long attempts = 0;
        while (accepted < 10000 && attempts < 400000) {
            ++attempts;
            try {
                switch (rng.index(7)) {
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
                                                "item" + std::to_string(rng.index(9)),
                                                1 + static_cast<std::int64_t>(rng.index(40)),
                                                1 + static_cast<int>(rng.index(3)));
                        bids.push_back(id);
                        break;
                    }
                    case 2:
                        if (bids.empty() || users.empty()) continue;
                        ledger.fulfill_review(bids[rng.index(bids.size())],
                                              users[rng.index(users.size())],
                                              rng.real01() * 8.0 - 2.0);
                        break;
                    case 3:
                        if (bids.empty() || users.empty()) continue;
                        ledger.cancel_review_bid(bids[rng.index(bids.size())],
                                                 users[rng.index(users.size())]);
                        break;
                    case 4: {
                        if (users.empty()) continue;
                        const std::string id = "bounty" + std::to_string(bounties.size());
                        ledger.post_bounty(id, "q" + std::to_string(rng.index(7)),
                                           users[rng.index(users.size())],
                                           1 + static_cast<std::int64_t>(rng.index(50)));
                        bounties.push_back(id);
                        break;
                    }
                    case 5:
                        if (bounties.empty() || users.empty()) continue;
                        ledger.claim_bounty(bounties[rng.index(bounties.size())],
                                            users[rng.index(users.size())],
                                            rng.real01() * 6.0 - 1.0);
                        break;
                    case 6:
                        if (users.size() < 2) continue;
                        ledger.adopt_idea(users[rng.index(users.size())],
                                          users[rng.index(users.size())],
                                          static_cast<std::int64_t>(rng.index(60)));
                        break;
                }
                ++accepted;
            } catch (const Error&) {
                continue;  // rejected operations leave the ledger untouched
            }

            if (ledger.circulating() != 100 * ledger.join_count()) {
                d = "conservation broken after op " + std::to_string(accepted);
                return false;
            }
            std::int64_t escrow_total = 0;
            for (const auto& [user, acct] : ledger.accounts()) {
                if (acct.available < 0 || acct.escrowed < 0) {
                    d = "negative balance for " + user;
                    return false;
                }
                escrow_total += acct.escrowed;
            }
            if (escrow_total != ledger.open_commitments()) {
                d = "escrow does not match open commitments";
                return false;
            }
        }
        d = std::to_string(accepted) + " accepted ops, supply " +
            std::to_string(ledger.circulating()) + " = 100 x " +
            std::to_string(ledger.join_count()) + " joins";
        return accepted == 10000;
    });

    run_criterion(9, "noisier strategies earn strictly less", [](std::string& d) {
        StrategyAssignment assignment{
            {StrategySpec::truthful(), StrategySpec::noisy(0.25), StrategySpec::noisy(0.5)}};
        const auto result = run_experiment(acceptance_world(909), assignment,
                                           MechanismKind::original, acceptance_params(50));
        const auto& truthful = row_for(result, "truthful");
        const auto& noisy25 = row_for(result, "noisy(0.25)");
        const auto& noisy50 = row_for(result, "noisy(0.5)");
        d = "means " + format_double(truthful.mean) + " > " + format_double(noisy25.mean) +
            " > " + format_double(noisy50.mean);
        const bool ordered = truthful.mean > noisy25.mean && noisy25.mean > noisy50.mean;
        const bool separated = ci_low(truthful) > ci_high(noisy25) &&
                               ci_low(noisy25) > ci_high(noisy50);
        return ordered && separated;
    });

    if (g_failures == 0) {
        std::cout << "all acceptance criteria passed" << std::endl;
    } else {
        std::cout << g_failures << " acceptance criteria failed" << std::endl;
    }
    return g_failures;
}

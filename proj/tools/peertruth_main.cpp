// peertruth CLI: simulation experiments, event-log replay, accuracy scoring,
// benchmark-model training and platform reports, all deterministic in the
// configured seed.
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration/parse failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "peertruth/config.hpp"
#include "peertruth/csv.hpp"
#include "peertruth/experiment.hpp"
#include "peertruth/ledger.hpp"
#include "peertruth/logging.hpp"
#include "peertruth/table.hpp"

namespace fs = std::filesystem;
using namespace peertruth;

namespace {

struct Options {
    std::string config_path;
    std::string out_dir = ".";
    std::string format = "table";
    std::string mechanism;
    std::string log_path;
    std::string forest_path;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

AppConfig effective_config(const Options& opts) {
    AppConfig config = opts.config_path.empty() ? AppConfig::defaults()
                                                : load_app_config(opts.config_path);
    if (opts.seed_given) {
        config.seed = opts.seed;
        config.world.seed = opts.seed;
    } else {
        config.world.seed = config.seed;
    }
    if (!opts.log_path.empty()) config.log_path = opts.log_path;
    if (!opts.forest_path.empty()) config.forest_file = opts.forest_path;
    return config;
}

std::vector<LedgerEvent> events_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open event log '" + path + "'");
    }
    return read_event_log(in);
}

Ledger replay_from_file(const AppConfig& config) {
    if (config.log_path.empty()) {
        throw ConfigError("no event log given (use --log or the 'log' config key)");
    }
    const auto events = events_from_file(config.log_path);
    Ledger ledger(config.ledger, config.seed);
    for (const auto& ev : events) {
        try {
            ledger.append_event(ev);
        } catch (const Error& e) {
            throw ConfigError("event seq " + std::to_string(ev.seq) + ": " + e.what());
        }
    }
    return ledger;
}

void write_results_csv(const std::string& path, const std::vector<StrategyStat>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    CsvWriter csv(out);
    csv.row({"mechanism", "strategy", "N", "mean", "stderr", "reps"});
    for (const auto& row : rows) {
        csv.row({to_string(row.mechanism), row.strategy, std::to_string(row.corpus_size),
                 format_double(row.mean), format_double(row.stderr_), std::to_string(row.reps)});
    }
}

int cmd_simulate(const Options& opts) {
    const AppConfig config = effective_config(opts);
    if (config.experiments.empty()) {
        throw ConfigError("config has no experiments to run");
    }
    fs::create_directories(opts.out_dir);

    std::vector<StrategyStat> all_rows;
    TextTable table({"experiment", "mechanism", "strategy", "N", "mean", "stderr", "reps"});

    for (const auto& spec : config.experiments) {
        ExperimentParams params = config.experiment_params(spec.replications);
        WorldConfig world = config.world;
        world.seed = config.seed;

        if (spec.type == "convergence") {
            const auto result =
                convergence_curve(world, spec.strategy, spec.mechanism, spec.schedule, params);
            // Convergence rows report the mean absolute score per corpus size.
            for (const auto& point : result.curve) {
                StrategyStat row;
                row.mechanism = spec.mechanism;
                row.strategy = spec.strategy.name();
                row.corpus_size = point.corpus_size;
                row.mean = point.mean_abs_score;
                row.stderr_ = point.stderr_abs;
                row.reps = point.reps;
                all_rows.push_back(row);
                table.row({spec.name, to_string(spec.mechanism), spec.strategy.name() + " |.|",
                           std::to_string(point.corpus_size),
                           format_double(point.mean_abs_score), format_double(point.stderr_abs),
                           std::to_string(point.reps)});
            }
        } else {
            const auto result =
                run_experiment(world, StrategyAssignment{spec.strategies}, spec.mechanism,
                               params);
            for (const auto& row : result.rows) {
                all_rows.push_back(row);
                table.row({spec.name, to_string(row.mechanism), row.strategy,
                           std::to_string(row.corpus_size), format_double(row.mean),
                           format_double(row.stderr_), std::to_string(row.reps)});
            }
            if (!result.correlation.degenerate) {
                std::cout << spec.name << ": rating/quality rank correlation = "
                          << format_double(result.correlation.value) << "\n";
            }
        }
    }

    const std::string csv_path = (fs::path(opts.out_dir) / "results.csv").string();
    write_results_csv(csv_path, all_rows);

    table.print(std::cout);
    std::cout << "wrote " << csv_path << "\n";
    return 0;
}

int cmd_replay(const Options& opts) {
    const AppConfig config = effective_config(opts);
    const Ledger ledger = replay_from_file(config);
    const auto reputation = ledger.reputation();

    if (opts.format == "csv") {
        CsvWriter csv(std::cout);
        csv.row({"user", "r0", "r_projects", "r_reports", "e_projects", "e_reports", "total"});
        for (const auto& [user, r] : reputation) {
            csv.row({user, format_double(r.r0), format_double(r.r_projects),
                     format_double(r.r_reports), format_double(r.e_projects),
                     format_double(r.e_reports), format_double(r.total())});
        }
        return 0;
    }
    TextTable table({"user", "R0", "R_p", "R_r", "E_p", "E_r", "total"});
    for (const auto& [user, r] : reputation) {
        table.row({user, format_double(r.r0), format_double(r.r_projects),
                   format_double(r.r_reports), format_double(r.e_projects),
                   format_double(r.e_reports), format_double(r.total())});
    }
    table.print(std::cout);
    return 0;
}

int cmd_score(const Options& opts) {
    AppConfig config = effective_config(opts);
    std::optional<MechanismKind> override;
    if (!opts.mechanism.empty()) {
        override = mechanism_from_string(opts.mechanism);
        config.ledger.mechanism_override = override;
    }
    if (!config.forest_file.empty()) {
        std::ifstream in(config.forest_file);
        if (!in) throw ConfigError("cannot open forest file '" + config.forest_file + "'");
        config.ledger.benchmark_forest = std::make_shared<Forest>(Forest::load(in));
    }

    const Ledger ledger = replay_from_file(config);

    // Augmented scoring with no pretrained model needs at least one rated
    // item to learn from.
    bool wants_augmented = override == MechanismKind::augmented;
    if (!override.has_value()) {
        for (const auto& [id, item] : ledger.items()) {
            wants_augmented = wants_augmented || item.mechanism == MechanismKind::augmented;
        }
    }
    if (wants_augmented && config.ledger.benchmark_forest == nullptr) {
        bool any_rating = false;
        for (const auto& [id, item] : ledger.items()) {
            for (const auto& [q, channel] : item.questions) {
                any_rating = any_rating || !channel.active.empty();
            }
        }
        if (!any_rating) {
            throw InsufficientCorpus(
                "augmented scoring needs a forest file or a rated corpus to train on");
        }
    }

    auto scores = ledger.current_scores();
    if (override == MechanismKind::quadratic) {
        std::erase_if(scores, [&](const AccuracyScore& s) {
            return ledger.items().at(s.item).mechanism != MechanismKind::quadratic;
        });
    }

    if (opts.format == "csv") {
        CsvWriter csv(std::cout);
        csv.row({"item", "question", "rater", "value", "status"});
        for (const auto& s : scores) {
            csv.row({s.item, s.question, s.rater, format_double(s.value), to_string(s.status)});
        }
        return 0;
    }
    TextTable table({"item", "question", "rater", "value", "status"});
    for (const auto& s : scores) {
        table.row({s.item, s.question, s.rater, format_double(s.value), to_string(s.status)});
    }
    table.print(std::cout);
    return 0;
}

// Held-out diagnostic for an all-categorical schema: mean L1 distance between
// the forest prediction and the empirical label distribution per descriptor
// cell, weighted by cell count.
double held_out_l1(const Forest& forest, const std::vector<TrainingRow>& held_out,
                   std::size_t label_count) {
    std::map<std::vector<int>, std::pair<std::vector<double>, int>> cells;
    for (const auto& row : held_out) {
        auto& [counts, n] = cells[row.d.categorical];
        counts.resize(label_count, 0.0);
        counts[row.label] += 1.0;
        n += 1;
    }
    double weighted = 0.0;
    int total = 0;
    for (const auto& [cell, entry] : cells) {
        const auto& [counts, n] = entry;
        DescriptorVector d;
        d.categorical = cell;
        const auto predicted = forest.predict_proba(d);
        double l1 = 0.0;
        for (std::size_t k = 0; k < label_count; ++k) {
            l1 += std::abs(predicted[k] - counts[k] / n);
        }
        weighted += l1 * n;
        total += n;
    }
    return total == 0 ? 0.0 : weighted / total;
}

int cmd_train_benchmark(const Options& opts) {
    const AppConfig config = effective_config(opts);
    const Ledger ledger = replay_from_file(config);

    TrainingSet data;
    data.schema = config.ledger.schema;
    data.label_count = config.ledger.labels.size();
    for (const auto& [id, item] : ledger.items()) {
        for (const auto& [question, channel] : item.questions) {
            if (!channel.finalized) continue;
            for (const auto& ev : channel.active) {
                data.rows.push_back(
                    TrainingRow{item.descriptors,
                                static_cast<int>(config.ledger.labels.index_of(ev.label)),
                                item.id});
            }
        }
    }
    if (data.rows.empty()) {
        throw EmptyTrainingSet("event log has no finalized ratings to train on");
    }

    // Deterministic 80/20 split by item id hash keeps whole items out.
    TrainingSet train;
    train.schema = data.schema;
    train.label_count = data.label_count;
    std::vector<TrainingRow> held_out;
    for (auto& row : data.rows) {
        if (fnv1a(row.origin_item) % 5 == 0) {
            held_out.push_back(std::move(row));
        } else {
            train.rows.push_back(std::move(row));
        }
    }
    if (train.rows.empty()) {
        train.rows = std::move(held_out);
        held_out.clear();
    }

    ForestConfig fc = config.ledger.forest;
    fc.seed = derive_seed(config.seed, "train-benchmark");
    const Forest forest = train_forest(train, fc);

    fs::create_directories(opts.out_dir);
    const std::string path = config.forest_file.empty()
                                 ? (fs::path(opts.out_dir) / "forest.ndjson").string()
                                 : config.forest_file;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    forest.save(out);

    std::cout << "trained " << fc.tree_count << " trees on " << train.rows.size()
              << " ratings\n";
    if (!held_out.empty() && data.schema.numeric_count == 0) {
        std::cout << "held-out mean L1: "
                  << format_double(held_out_l1(forest, held_out, data.label_count)) << " over "
                  << held_out.size() << " ratings\n";
    }
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_report(const Options& opts) {
    const AppConfig config = effective_config(opts);
    const Ledger ledger = replay_from_file(config);

    TextTable items({"item", "kind", "author", "mechanism", "question", "ratings", "status",
                     "finalized_total"});
    for (const auto& [id, item] : ledger.items()) {
        const std::string total = format_double(ledger.finalized_item_total(item));
        if (item.questions.empty()) {
            items.row({id, to_string(item.kind), item.author, to_string(item.mechanism), "-",
                       "0", "-", total});
        }
        for (const auto& [question, channel] : item.questions) {
            items.row({id, to_string(item.kind), item.author, to_string(item.mechanism),
                       question, std::to_string(channel.active.size()),
                       channel.finalized ? "final" : "pending", total});
        }
    }
    std::cout << "items:\n";
    items.print(std::cout);

    std::cout << "\nreputation:\n";
    TextTable rep({"user", "R0", "R_p", "R_r", "E_p", "E_r", "total"});
    for (const auto& [user, r] : ledger.reputation()) {
        rep.row({user, format_double(r.r0), format_double(r.r_projects),
                 format_double(r.r_reports), format_double(r.e_projects),
                 format_double(r.e_reports), format_double(r.total())});
    }
    rep.print(std::cout);

    std::cout << "\ntokens (minted " << ledger.tokens().total_minted() << ", burned "
              << ledger.tokens().total_burned() << ", circulating "
              << ledger.tokens().circulating() << "):\n";
    TextTable tokens({"user", "available", "escrowed"});
    for (const auto& [user, acct] : ledger.tokens().accounts()) {
        tokens.row({user, std::to_string(acct.available), std::to_string(acct.escrowed)});
    }
    tokens.print(std::cout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"peer-prediction scoring, reputation/token ledgers and simulation harness"};
    app.require_subcommand(1);
    app.fallthrough();

    Options opts;
    app.add_option("--config", opts.config_path, "JSON config file");
    app.add_option("--seed", opts.seed, "64-bit seed override")
        ->each([&opts](const std::string&) { opts.seed_given = true; });
    app.add_option("--out", opts.out_dir, "output directory for artifacts");
    app.add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember({"csv", "table"}));
    app.add_option("--mechanism", opts.mechanism, "scoring mechanism override")
        ->check(CLI::IsMember({"original", "augmented", "quadratic"}));
    app.add_option("--log", opts.log_path, "event log file (NDJSON)");
    app.add_option("--forest", opts.forest_path, "forest model file");

    auto* simulate = app.add_subcommand("simulate", "run configured experiments, write CSV");
    auto* score = app.add_subcommand("score", "compute accuracy scores from an event log");
    auto* replay = app.add_subcommand("replay", "replay an event log into a reputation report");
    auto* train = app.add_subcommand("train-benchmark",
                                     "train the benchmark forest from finalized ratings");
    auto* report = app.add_subcommand("report", "summarize items, reputation and tokens");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(opts);
        if (score->parsed()) return cmd_score(opts);
        if (replay->parsed()) return cmd_replay(opts);
        if (train->parsed()) return cmd_train_benchmark(opts);
        if (report->parsed()) return cmd_report(opts);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

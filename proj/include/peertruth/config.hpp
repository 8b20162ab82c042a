#pragma once

// JSON application config shared by all CLI subcommands. Every field is
// optional and falls back to the built-in defaults; unknown mechanisms,
// malformed distributions and bad strategy specs raise ConfigError with the
// offending key in the message.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "peertruth/experiment.hpp"
#include "peertruth/ledger.hpp"
#include "peertruth/world.hpp"

namespace peertruth {

struct ExperimentSpec {
    std::string name;
    std::string type = "comparison";  // comparison | convergence
    MechanismKind mechanism = MechanismKind::original;
    std::vector<StrategySpec> strategies;        // comparison: round-robin over raters
    StrategySpec strategy;                       // convergence: adopted by everyone
    std::vector<long> schedule;                  // convergence corpus sizes
    int replications = 10;
};

struct AppConfig {
    std::uint64_t seed = 0;
    std::string log_path;
    std::string forest_file;
    LedgerConfig ledger;
    WorldConfig world = WorldConfig::default_world();
    std::vector<ExperimentSpec> experiments;

    ExperimentParams experiment_params(int replications) const;

    // Default world, original-mechanism truthful vs noisy comparison.
    static AppConfig defaults();
};

StrategySpec strategy_from_json(const nlohmann::json& j);
AppConfig parse_app_config(const nlohmann::json& j);
AppConfig load_app_config(const std::string& path);

}  // namespace peertruth

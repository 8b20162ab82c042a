#include "peertruth/config.hpp"

#include <fstream>

namespace peertruth {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config field '") + key + "' has the wrong type");
    }
}

LabelSet labels_from_json(const json& j, const char* key, LabelSet fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    try {
        return LabelSet(it->get<std::vector<std::string>>());
    } catch (const Error& e) {
        throw ConfigError(std::string("config field '") + key + "': " + e.what());
    } catch (const json::exception&) {
        throw ConfigError(std::string("config field '") + key +
                          "' must be an array of strings");
    }
}

DescriptorSchema schema_from_json(const json& j) {
    DescriptorSchema schema;
    schema.numeric_count = get_or<std::size_t>(j, "numeric", 0);
    schema.categorical_cardinalities = get_or<std::vector<int>>(j, "categorical", {});
    return schema;
}

ScoreParams params_from_json(const json& j, ScoreParams base) {
    base.alpha = get_or(j, "alpha", base.alpha);
    base.n = get_or(j, "n", base.n);
    base.include_peer_in_frequency =
        get_or(j, "include_peer_in_frequency", base.include_peer_in_frequency);
    if (j.contains("peer_mode")) {
        base.peer_mode = peer_mode_from_string(j.at("peer_mode").get<std::string>());
    }
    base.validate();
    return base;
}

ForestConfig forest_from_json(const json& j, ForestConfig base) {
    base.tree_count = get_or(j, "tree_count", base.tree_count);
    base.max_depth = get_or(j, "max_depth", base.max_depth);
    base.min_leaf_size = get_or(j, "min_leaf_size", base.min_leaf_size);
    base.features_per_split = get_or(j, "features_per_split", base.features_per_split);
    base.bootstrap_fraction = get_or(j, "bootstrap_fraction", base.bootstrap_fraction);
    base.threads = get_or(j, "threads", base.threads);
    base.validate();
    return base;
}

Weights weights_from_json(const json& j, Weights base) {
    if (j.contains("levels")) {
        base.level_weights.clear();
        for (const auto& [label, weight] : j.at("levels").items()) {
            base.level_weights[label] = weight.get<double>();
        }
    }
    base.beta_r = get_or(j, "beta_r", base.beta_r);
    base.beta_p = get_or(j, "beta_p", base.beta_p);
    base.default_r0 = get_or(j, "default_r0", base.default_r0);
    if (!(base.beta_r > 0.0) || !(base.beta_p > 0.0)) {
        throw ConfigError("weights.beta_r and weights.beta_p must be > 0");
    }
    return base;
}

TokenPolicy tokens_from_json(const json& j, TokenPolicy base) {
    base.mint_on_join = get_or(j, "mint_on_join", base.mint_on_join);
    base.satisfactory_threshold = get_or(j, "satisfactory_threshold", base.satisfactory_threshold);
    base.bounty_claim_threshold = get_or(j, "bounty_claim_threshold", base.bounty_claim_threshold);
    base.tokens_per_score = get_or(j, "tokens_per_score", base.tokens_per_score);
    if (base.mint_on_join < 0) throw ConfigError("tokens.mint_on_join must be >= 0");
    return base;
}

WorldConfig world_from_json(const json& j, WorldConfig base) {
    base.labels = labels_from_json(j, "labels", base.labels);
    base.prior = get_or(j, "prior", base.prior);
    base.confusion = get_or(j, "confusion", base.confusion);
    base.descriptor_emissions = get_or(j, "descriptor_emissions", base.descriptor_emissions);
    base.success_prob_by_state = get_or(j, "success_prob_by_state", base.success_prob_by_state);
    base.item_count = get_or(j, "items", base.item_count);
    base.rater_count = get_or(j, "raters", base.rater_count);
    base.ratings_per_item = get_or(j, "ratings_per_item", base.ratings_per_item);
    base.seed = get_or(j, "seed", base.seed);
    base.validate();
    return base;
}

ExperimentSpec experiment_from_json(const json& j, std::size_t index) {
    ExperimentSpec spec;
    spec.name = get_or<std::string>(j, "name", "experiment" + std::to_string(index));
    spec.type = get_or<std::string>(j, "type", "comparison");
    if (spec.type != "comparison" && spec.type != "convergence") {
        throw ConfigError("experiments[" + std::to_string(index) +
                          "].type must be comparison|convergence");
    }
    if (j.contains("mechanism")) {
        spec.mechanism = mechanism_from_string(j.at("mechanism").get<std::string>());
    }
    spec.replications = get_or(j, "replications", spec.replications);
    if (spec.type == "comparison") {
        auto it = j.find("strategies");
        if (it == j.end() || !it->is_array() || it->empty()) {
            throw ConfigError("experiments[" + std::to_string(index) +
                              "].strategies must be a nonempty array");
        }
        for (const auto& entry : *it) spec.strategies.push_back(strategy_from_json(entry));
    } else {
        if (!j.contains("strategy")) {
            throw ConfigError("experiments[" + std::to_string(index) +
                              "].strategy is required for convergence runs");
        }
        spec.strategy = strategy_from_json(j.at("strategy"));
        spec.schedule = get_or<std::vector<long>>(j, "schedule", {1000, 5000, 20000});
    }
    return spec;
}

}  // namespace

StrategySpec strategy_from_json(const json& j) {
    const std::string kind = get_or<std::string>(j, "kind", "truthful");
    if (kind == "truthful") return StrategySpec::truthful();
    if (kind == "constant") {
        auto it = j.find("label");
        if (it == j.end()) throw ConfigError("constant strategy needs a 'label' field");
        return StrategySpec::constant(it->get<std::string>());
    }
    if (kind == "noisy") {
        const double gamma = get_or(j, "gamma", 0.5);
        if (!(gamma >= 0.0 && gamma <= 1.0)) {
            throw ConfigError("noisy strategy gamma must lie in [0, 1]");
        }
        return StrategySpec::noisy(gamma);
    }
    if (kind == "descriptor_map") {
        StrategySpec spec;
        spec.kind = StrategySpec::Kind::descriptor_map;
        spec.map_rule = get_or<std::string>(j, "rule", "feature");
        spec.map_feature = get_or(j, "feature", 0);
        spec.constant_label = get_or<std::string>(j, "label", "");
        if (spec.map_rule != "feature" && spec.map_rule != "sum" &&
            spec.map_rule != "constant") {
            throw ConfigError("descriptor_map rule must be feature|sum|constant");
        }
        return spec;
    }
    throw ConfigError("unknown strategy kind '" + kind + "'");
}

ExperimentParams AppConfig::experiment_params(int replications) const {
    ExperimentParams params;
    params.score = ledger.params;
    params.epsilon = ledger.epsilon;
    params.forest = ledger.forest;
    params.weights = ledger.weights;
    params.replications = replications;
    return params;
}

AppConfig AppConfig::defaults() {
    AppConfig config;
    ExperimentSpec comparison;
    comparison.name = "truthful-vs-noisy";
    comparison.type = "comparison";
    comparison.mechanism = MechanismKind::original;
    comparison.strategies = {StrategySpec::truthful(), StrategySpec::noisy(0.5)};
    comparison.replications = 10;
    config.experiments.push_back(std::move(comparison));
    return config;
}

AppConfig parse_app_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    AppConfig config = AppConfig::defaults();
    config.experiments.clear();

    config.seed = get_or<std::uint64_t>(j, "seed", 0);
    config.log_path = get_or<std::string>(j, "log", "");
    config.forest_file = get_or<std::string>(j, "forest_file", "");

    config.ledger.labels = labels_from_json(j, "labels", config.ledger.labels);
    if (j.contains("schema")) config.ledger.schema = schema_from_json(j.at("schema"));
    if (j.contains("params")) {
        config.ledger.params = params_from_json(j.at("params"), config.ledger.params);
    }
    config.ledger.epsilon = get_or(j, "epsilon", config.ledger.epsilon);
    validated_epsilon(config.ledger.epsilon, config.ledger.labels.size());
    if (j.contains("forest")) {
        config.ledger.forest = forest_from_json(j.at("forest"), config.ledger.forest);
    }
    if (j.contains("weights")) {
        config.ledger.weights = weights_from_json(j.at("weights"), config.ledger.weights);
    }
    if (j.contains("tokens")) {
        config.ledger.tokens = tokens_from_json(j.at("tokens"), config.ledger.tokens);
    }
    if (j.contains("ledger")) {
        const json& l = j.at("ledger");
        config.ledger.finalize_after_ratings =
            get_or(l, "finalize_after_ratings", config.ledger.finalize_after_ratings);
        config.ledger.finalize_after_seconds =
            get_or(l, "finalize_after_seconds", config.ledger.finalize_after_seconds);
        if (l.contains("default_mechanism")) {
            config.ledger.default_mechanism =
                mechanism_from_string(l.at("default_mechanism").get<std::string>());
        }
    }

    if (j.contains("world")) {
        WorldConfig base = WorldConfig::default_world();
        base.labels = config.ledger.labels;
        config.world = world_from_json(j.at("world"), base);
    } else {
        config.world.labels = config.ledger.labels;
    }

    if (auto it = j.find("experiments"); it != j.end()) {
        if (!it->is_array()) throw ConfigError("config field 'experiments' must be an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            config.experiments.push_back(experiment_from_json((*it)[i], i));
        }
    } else {
        config.experiments = AppConfig::defaults().experiments;
    }
    return config;
}

AppConfig load_app_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        throw ConfigError("config file '" + path + "' is not valid JSON");
    }
    try {
        return parse_app_config(j);
    } catch (const json::exception& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
}

}  // namespace peertruth

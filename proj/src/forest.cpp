#include "peertruth/forest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "peertruth/parallel.hpp"
#include "peertruth/rng.hpp"

namespace peertruth {

using nlohmann::json;

namespace {

constexpr int kSubsetSplitMaxCategories = 8;
constexpr double kMinGain = 1e-12;

double gini(const std::vector<int>& counts, int total) {
    if (total == 0) return 0.0;
    double sum_sq = 0.0;
    for (int c : counts) {
        const double p = static_cast<double>(c) / total;
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

struct SplitChoice {
    double gain = 0.0;
    int feature = -1;
    bool subset_split = false;
    double threshold = 0.0;
    std::uint32_t mask = 0;
};

class TreeBuilder {
  public:
    TreeBuilder(const TrainingSet& data, const ForestConfig& config, int features_per_split,
                std::uint64_t seed)
        : data_(data),
          config_(config),
          features_per_split_(features_per_split),
          rng_(seed) {}

    Tree build() {
        const std::size_t n = data_.rows.size();
        const std::size_t draws =
            std::max<std::size_t>(1, static_cast<std::size_t>(
                                         std::llround(config_.bootstrap_fraction * n)));
        std::vector<std::size_t> sample(draws);
        for (auto& s : sample) s = rng_.index(n);

        Tree tree;
        nodes_ = &tree.nodes;
        grow(std::move(sample), 0);
        return tree;
    }

  private:
    // value of feature f for a row; categorical features follow numeric ones
    double feature_value(const TrainingRow& row, int f) const {
        const auto numeric = static_cast<int>(data_.schema.numeric_count);
        if (f < numeric) return row.d.numeric[f];
        return static_cast<double>(row.d.categorical[f - numeric]);
    }

    bool is_categorical(int f) const {
        return f >= static_cast<int>(data_.schema.numeric_count);
    }

    int cardinality(int f) const {
        return data_.schema.categorical_cardinalities[f - data_.schema.numeric_count];
    }

    int make_leaf(const std::vector<int>& counts, int total) {
        TreeNode node;
        node.proportions.resize(counts.size());
        for (std::size_t i = 0; i < counts.size(); ++i) {
            node.proportions[i] = static_cast<double>(counts[i]) / total;
        }
        nodes_->push_back(std::move(node));
        return static_cast<int>(nodes_->size() - 1);
    }

    // Best threshold split of `values` sorted ascending; used for numeric
    // features and for ordinal-encoded wide categorical features.
    void consider_threshold(int f, const std::vector<std::size_t>& idx, double parent_impurity,
                            SplitChoice& best) const {
        const int n = static_cast<int>(idx.size());
        std::vector<std::pair<double, int>> values;
        values.reserve(idx.size());
        for (std::size_t i : idx) {
            values.emplace_back(feature_value(data_.rows[i], f), data_.rows[i].label);
        }
        std::sort(values.begin(), values.end());

        std::vector<int> left_counts(data_.label_count, 0);
        std::vector<int> total_counts(data_.label_count, 0);
        for (const auto& [v, label] : values) total_counts[label]++;

        for (int i = 1; i < n; ++i) {
            left_counts[values[i - 1].second]++;
            if (values[i].first == values[i - 1].first) continue;
            const int nl = i;
            const int nr = n - i;
            if (nl < config_.min_leaf_size || nr < config_.min_leaf_size) continue;
            std::vector<int> right_counts(data_.label_count, 0);
            for (std::size_t k = 0; k < right_counts.size(); ++k) {
                right_counts[k] = total_counts[k] - left_counts[k];
            }
            const double weighted = (nl * gini(left_counts, nl) + nr * gini(right_counts, nr)) / n;
            const double gain = parent_impurity - weighted;
            if (gain > best.gain + kMinGain ||
                (best.feature < 0 && gain > kMinGain)) {
                best = {gain, f, false, (values[i - 1].first + values[i].first) / 2.0, 0};
            }
        }
    }

    // Subset-membership splits for narrow categorical features: enumerate the
    // 2^(c-1)-1 masks that keep category 0 on the left (complements collapse).
    void consider_subset(int f, const std::vector<std::size_t>& idx, double parent_impurity,
                         SplitChoice& best) const {
        const int card = cardinality(f);
        const int n = static_cast<int>(idx.size());
        const int numeric = static_cast<int>(data_.schema.numeric_count);

        std::vector<std::vector<int>> counts(card, std::vector<int>(data_.label_count, 0));
        std::vector<int> total_counts(data_.label_count, 0);
        for (std::size_t i : idx) {
            const auto& row = data_.rows[i];
            counts[row.d.categorical[f - numeric]][row.label]++;
            total_counts[row.label]++;
        }

        const std::uint32_t full = (1u << card) - 1;
        for (std::uint32_t mask = 1; mask < full; mask += 2) {  // bit 0 always on the left
            std::vector<int> left_counts(data_.label_count, 0);
            int nl = 0;
            for (int c = 0; c < card; ++c) {
                if (mask & (1u << c)) {
                    for (std::size_t k = 0; k < left_counts.size(); ++k) {
                        left_counts[k] += counts[c][k];
                    }
                }
            }
            for (int v : left_counts) nl += v;
            const int nr = n - nl;
            if (nl < config_.min_leaf_size || nr < config_.min_leaf_size) continue;
            std::vector<int> right_counts(data_.label_count, 0);
            for (std::size_t k = 0; k < right_counts.size(); ++k) {
                right_counts[k] = total_counts[k] - left_counts[k];
            }
            const double weighted = (nl * gini(left_counts, nl) + nr * gini(right_counts, nr)) / n;
            const double gain = parent_impurity - weighted;
            if (gain > best.gain + kMinGain ||
                (best.feature < 0 && gain > kMinGain)) {
                best = {gain, f, true, 0.0, mask};
            }
        }
    }

    int grow(std::vector<std::size_t> idx, int depth) {
        const int n = static_cast<int>(idx.size());
        std::vector<int> counts(data_.label_count, 0);
        for (std::size_t i : idx) counts[data_.rows[i].label]++;

        const bool pure = std::count(counts.begin(), counts.end(), 0) ==
                          static_cast<long>(counts.size()) - 1;
        const bool depth_capped = config_.max_depth > 0 && depth >= config_.max_depth;
        const std::size_t feature_count = data_.schema.feature_count();
        if (pure || depth_capped || feature_count == 0 || n < 2 * config_.min_leaf_size) {
            return make_leaf(counts, n);
        }

        const double parent_impurity = gini(counts, n);
        SplitChoice best;
        for (std::size_t f : rng_.sample_indices(feature_count, features_per_split_)) {
            const int feature = static_cast<int>(f);
            if (is_categorical(feature) && cardinality(feature) <= kSubsetSplitMaxCategories) {
                consider_subset(feature, idx, parent_impurity, best);
            } else {
                consider_threshold(feature, idx, parent_impurity, best);
            }
        }
        if (best.feature < 0) {
            return make_leaf(counts, n);
        }

        std::vector<std::size_t> left_idx;
        std::vector<std::size_t> right_idx;
        const int numeric = static_cast<int>(data_.schema.numeric_count);
        for (std::size_t i : idx) {
            const auto& row = data_.rows[i];
            bool goes_left;
            if (best.subset_split) {
                goes_left = (best.mask >> row.d.categorical[best.feature - numeric]) & 1u;
            } else {
                goes_left = feature_value(row, best.feature) <= best.threshold;
            }
            (goes_left ? left_idx : right_idx).push_back(i);
        }
        idx.clear();
        idx.shrink_to_fit();

        TreeNode node;
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.category_mask = best.mask;
        node.subset_split = best.subset_split;
        nodes_->push_back(std::move(node));
        const int self = static_cast<int>(nodes_->size() - 1);

        const int left = grow(std::move(left_idx), depth + 1);
        const int right = grow(std::move(right_idx), depth + 1);
        (*nodes_)[self].left = left;
        (*nodes_)[self].right = right;
        return self;
    }

    const TrainingSet& data_;
    const ForestConfig& config_;
    int features_per_split_;
    Rng rng_;
    std::vector<TreeNode>* nodes_ = nullptr;
};

}  // namespace

void TrainingSet::validate() const {
    if (rows.empty()) throw EmptyTrainingSet("training set has no rows");
    if (label_count < 2) throw SchemaMismatch("training set needs at least two labels");
    for (const auto& row : rows) {
        if (!schema.matches(row.d)) {
            throw SchemaMismatch("training row does not match descriptor schema");
        }
        if (row.label < 0 || row.label >= static_cast<int>(label_count)) {
            throw SchemaMismatch("training row label out of range");
        }
    }
}

void ForestConfig::validate() const {
    if (tree_count < 1) throw ConfigError("tree_count must be >= 1");
    if (min_leaf_size < 1) throw ConfigError("min_leaf_size must be >= 1");
    if (!(bootstrap_fraction > 0.0 && bootstrap_fraction <= 1.0)) {
        throw ConfigError("bootstrap_fraction must be in (0, 1]");
    }
    if (max_depth < 0) throw ConfigError("max_depth must be >= 0");
    if (features_per_split < 0) throw ConfigError("features_per_split must be >= 0");
}

Forest train_forest(const TrainingSet& data, const ForestConfig& config) {
    config.validate();
    data.validate();

    int features_per_split = config.features_per_split;
    if (features_per_split == 0) {
        features_per_split = static_cast<int>(
            std::ceil(std::sqrt(static_cast<double>(data.schema.feature_count()))));
    }
    features_per_split = std::max(features_per_split, 1);

    std::vector<Tree> trees(config.tree_count);
    parallel_for(trees.size(), config.threads, [&](std::size_t t) {
        TreeBuilder builder(data, config, features_per_split,
                            derive_seed(config.seed, "tree", static_cast<std::uint64_t>(t)));
        trees[t] = builder.build();
    });
    return Forest(data.schema, data.label_count, config, std::move(trees));
}

Forest train_excluding(const TrainingSet& data, const ForestConfig& config,
                       const std::string& item_k) {
    TrainingSet reduced;
    reduced.schema = data.schema;
    reduced.label_count = data.label_count;
    for (const auto& row : data.rows) {
        if (row.origin_item != item_k) reduced.rows.push_back(row);
    }
    if (reduced.rows.empty()) {
        throw EmptyTrainingSet("no training rows remain after excluding item '" + item_k + "'");
    }
    return train_forest(reduced, config);
}

std::vector<double> Forest::predict_proba(const DescriptorVector& d) const {
    schema_.require(d);
    std::vector<double> acc(label_count_, 0.0);
    for (const auto& tree : trees_) {
        int at = 0;
        while (tree.nodes[at].feature >= 0) {
            const TreeNode& node = tree.nodes[at];
            bool goes_left;
            if (node.subset_split) {
                const int value =
                    d.categorical[node.feature - static_cast<int>(schema_.numeric_count)];
                goes_left = (node.category_mask >> value) & 1u;
            } else if (node.feature < static_cast<int>(schema_.numeric_count)) {
                goes_left = d.numeric[node.feature] <= node.threshold;
            } else {
                const int value =
                    d.categorical[node.feature - static_cast<int>(schema_.numeric_count)];
                goes_left = static_cast<double>(value) <= node.threshold;
            }
            at = goes_left ? node.left : node.right;
        }
        const auto& proportions = tree.nodes[at].proportions;
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += proportions[k];
    }
    for (double& v : acc) v /= static_cast<double>(trees_.size());
    return acc;
}

std::vector<double> regularize(std::vector<double> q, double epsilon) {
    for (double& v : q) v = std::max(v, epsilon);
    return q;
}

double validated_epsilon(double value, std::size_t label_count) {
    if (!(value > 0.0) || value > 1.0 / static_cast<double>(label_count)) {
        throw ConfigError("epsilon must lie in (0, 1/m]");
    }
    return value;
}

namespace {

json config_to_json(const ForestConfig& c) {
    return json{{"tree_count", c.tree_count},
                {"max_depth", c.max_depth},
                {"min_leaf_size", c.min_leaf_size},
                {"features_per_split", c.features_per_split},
                {"bootstrap_fraction", c.bootstrap_fraction},
                {"seed", c.seed}};
}

ForestConfig config_from_json(const json& j) {
    ForestConfig c;
    c.tree_count = j.at("tree_count").get<int>();
    c.max_depth = j.at("max_depth").get<int>();
    c.min_leaf_size = j.at("min_leaf_size").get<int>();
    c.features_per_split = j.at("features_per_split").get<int>();
    c.bootstrap_fraction = j.at("bootstrap_fraction").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

}  // namespace

void Forest::save(std::ostream& os) const {
    json header{{"format", "peertruth-forest"},
                {"version", 1},
                {"labels", label_count_},
                {"schema",
                 {{"numeric", schema_.numeric_count},
                  {"categorical", schema_.categorical_cardinalities}}},
                {"config", config_to_json(config_)}};
    os << header.dump() << '\n';
    for (const auto& tree : trees_) {
        json nodes = json::array();
        for (const auto& node : tree.nodes) {
            json props = node.feature < 0 ? json(node.proportions) : json(nullptr);
            nodes.push_back(json::array({node.feature, node.threshold, node.category_mask,
                                         node.subset_split ? 1 : 0, node.left, node.right,
                                         std::move(props)}));
        }
        os << json{{"nodes", std::move(nodes)}}.dump() << '\n';
    }
}

std::string Forest::to_ndjson() const {
    std::ostringstream os;
    save(os);
    return os.str();
}

Forest Forest::load(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) {
        throw ConfigError("forest file is empty");
    }
    json header = json::parse(line, nullptr, false);
    if (header.is_discarded() || header.value("format", "") != "peertruth-forest") {
        throw ConfigError("not a peertruth forest file (bad header record)");
    }
    if (header.at("version").get<int>() != 1) {
        throw ConfigError("unsupported forest file version");
    }
    DescriptorSchema schema;
    schema.numeric_count = header.at("schema").at("numeric").get<std::size_t>();
    schema.categorical_cardinalities =
        header.at("schema").at("categorical").get<std::vector<int>>();
    const auto label_count = header.at("labels").get<std::size_t>();
    ForestConfig config = config_from_json(header.at("config"));

    std::vector<Tree> trees;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        json record = json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.contains("nodes")) {
            throw LogParseError("malformed forest tree record", line_no);
        }
        Tree tree;
        for (const auto& entry : record.at("nodes")) {
            TreeNode node;
            node.feature = entry.at(0).get<int>();
            node.threshold = entry.at(1).get<double>();
            node.category_mask = entry.at(2).get<std::uint32_t>();
            node.subset_split = entry.at(3).get<int>() != 0;
            node.left = entry.at(4).get<int>();
            node.right = entry.at(5).get<int>();
            if (node.feature < 0) {
                node.proportions = entry.at(6).get<std::vector<double>>();
            }
            tree.nodes.push_back(std::move(node));
        }
        if (tree.nodes.empty()) {
            throw LogParseError("forest tree record has no nodes", line_no);
        }
        trees.push_back(std::move(tree));
    }
    if (trees.empty()) {
        throw ConfigError("forest file contains no trees");
    }
    return Forest(std::move(schema), label_count, std::move(config), std::move(trees));
}

Forest Forest::from_ndjson(const std::string& text) {
    std::istringstream is(text);
    return load(is);
}

}  // namespace peertruth

#pragma once

// Probability-machine random forest: leaves store class-proportion vectors
// and predictions average them across trees, giving a consistent estimate of
// the conditional label distribution Q(x, D) from public descriptors.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "peertruth/descriptors.hpp"
#include "peertruth/errors.hpp"
#include "peertruth/labels.hpp"

namespace peertruth {

struct TrainingRow {
    DescriptorVector d;
    int label = 0;            // index into the label set
    std::string origin_item;  // enables leave-item-out training
};

struct TrainingSet {
    DescriptorSchema schema;
    std::size_t label_count = 0;
    std::vector<TrainingRow> rows;

    void validate() const;
};

struct ForestConfig {
    int tree_count = 200;
    int max_depth = 0;  // 0 = unlimited
    int min_leaf_size = 5;
    int features_per_split = 0;  // 0 = ceil(sqrt(#features))
    double bootstrap_fraction = 1.0;
    std::uint64_t seed = 0;
    int threads = 0;  // 0 = hardware concurrency

    void validate() const;
};

struct TreeNode {
    // feature < 0 marks a leaf
    int feature = -1;
    // numeric / ordinal split: go left when value <= threshold
    double threshold = 0.0;
    // categorical subset split: go left when the category bit is set
    std::uint32_t category_mask = 0;
    bool subset_split = false;
    int left = -1;
    int right = -1;
    std::vector<double> proportions;  // leaves only; nonnegative, sums to 1
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
};

class Forest {
  public:
    Forest() = default;
    Forest(DescriptorSchema schema, std::size_t label_count, ForestConfig config,
           std::vector<Tree> trees)
        : schema_(std::move(schema)),
          label_count_(label_count),
          config_(std::move(config)),
          trees_(std::move(trees)) {}

    const DescriptorSchema& schema() const { return schema_; }
    std::size_t label_count() const { return label_count_; }
    const ForestConfig& config() const { return config_; }
    const std::vector<Tree>& trees() const { return trees_; }

    // Average of leaf class-proportion vectors across trees; a valid
    // probability vector for any schema-conforming input.
    std::vector<double> predict_proba(const DescriptorVector& d) const;

    // Versioned newline-delimited JSON: a header record, then one tree per
    // line. Output is byte-stable for a fixed forest.
    void save(std::ostream& os) const;
    std::string to_ndjson() const;
    static Forest load(std::istream& is);
    static Forest from_ndjson(const std::string& text);

  private:
    DescriptorSchema schema_;
    std::size_t label_count_ = 0;
    ForestConfig config_;
    std::vector<Tree> trees_;
};

// Trains tree_count trees on bootstrap resamples; splits minimize Gini
// impurity over a random subset of features. Deterministic in (data, config).
Forest train_forest(const TrainingSet& data, const ForestConfig& config);

// train_forest on the rows not originating from item_k.
Forest train_excluding(const TrainingSet& data, const ForestConfig& config,
                       const std::string& item_k);

// Elementwise max(epsilon, q). No renormalization: the result is used as a
// score denominator, not as a distribution.
std::vector<double> regularize(std::vector<double> q, double epsilon);

// Validates 0 < value <= 1/label_count.
double validated_epsilon(double value, std::size_t label_count);

}  // namespace peertruth

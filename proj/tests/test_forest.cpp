#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "peertruth/forest.hpp"
#include "peertruth/rng.hpp"

using namespace peertruth;

namespace {

DescriptorSchema cat_schema(std::vector<int> cards) {
    DescriptorSchema schema;
    schema.categorical_cardinalities = std::move(cards);
    return schema;
}

DescriptorVector cat_point(std::vector<int> values) {
    DescriptorVector d;
    d.categorical = std::move(values);
    return d;
}

// Known conditional distribution over 3 labels for a 3x3 categorical grid.
std::vector<double> true_cell_probs(int a, int b) {
    std::vector<double> w(3);
    double sum = 0.0;
    for (int k = 0; k < 3; ++k) {
        w[k] = 1.0 + static_cast<double>((a * 3 + b + k) % 3);
        sum += w[k];
    }
    for (double& v : w) v /= sum;
    return w;
}

TrainingSet grid_training_set(int rows, std::uint64_t seed) {
    TrainingSet data;
    data.schema = cat_schema({3, 3});
    data.label_count = 3;
    Rng rng(seed);
    for (int i = 0; i < rows; ++i) {
        const int a = static_cast<int>(rng.index(3));
        const int b = static_cast<int>(rng.index(3));
        const int label = static_cast<int>(rng.categorical(true_cell_probs(a, b)));
        data.rows.push_back(TrainingRow{cat_point({a, b}), label, "i" + std::to_string(i % 40)});
    }
    return data;
}

double l1(const std::vector<double>& a, const std::vector<double>& b) {
    double out = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) out += std::abs(a[i] - b[i]);
    return out;
}

ForestConfig small_config(int trees = 100, std::uint64_t seed = 1) {
    ForestConfig config;
    config.tree_count = trees;
    config.seed = seed;
    return config;
}

}  // namespace

TEST_CASE("single-class corpus propagates pure leaves") {
    TrainingSet data;
    data.schema = cat_schema({4});
    data.label_count = 3;
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        data.rows.push_back(TrainingRow{cat_point({static_cast<int>(rng.index(4))}), 1, ""});
    }
    const Forest forest = train_forest(data, small_config());
    const auto proba = forest.predict_proba(cat_point({2}));
    CHECK(proba[0] == 0.0);
    CHECK(proba[1] == 1.0);
    CHECK(proba[2] == 0.0);
}

TEST_CASE("empty training set is rejected") {
    TrainingSet data;
    data.schema = cat_schema({3});
    data.label_count = 3;
    CHECK_THROWS_AS(train_forest(data, small_config()), EmptyTrainingSet);
}

TEST_CASE("recovers a known conditional distribution within 0.05 L1") {
    const auto data = grid_training_set(10000, 2024);
    const Forest forest = train_forest(data, small_config(150, 7));
    double total = 0.0;
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            total += l1(forest.predict_proba(cat_point({a, b})), true_cell_probs(a, b));
        }
    }
    CHECK(total / 9.0 < 0.05);
}

TEST_CASE("descriptor-free schema predicts the training marginal") {
    TrainingSet data;
    data.label_count = 3;
    // 150 of label 0, 90 of label 1, 60 of label 2
    for (int i = 0; i < 300; ++i) {
        data.rows.push_back(TrainingRow{{}, i < 150 ? 0 : (i < 240 ? 1 : 2), ""});
    }
    const Forest forest = train_forest(data, small_config(400, 3));
    const auto proba = forest.predict_proba({});
    CHECK(proba[0] == doctest::Approx(0.5).epsilon(0.05));
    CHECK(proba[1] == doctest::Approx(0.3).epsilon(0.07));
    CHECK(proba[2] == doctest::Approx(0.2).epsilon(0.1));
}

TEST_CASE("threshold splits recover an xor pattern on numeric features") {
    TrainingSet data;
    data.schema.numeric_count = 2;
    data.label_count = 2;
    Rng rng(11);
    for (int i = 0; i < 10000; ++i) {
        const double x = rng.real01();
        const double y = rng.real01();
        const bool hot = (x < 0.5) != (y < 0.5);
        const int label = rng.bernoulli(hot ? 0.9 : 0.1) ? 1 : 0;
        DescriptorVector d;
        d.numeric = {x, y};
        data.rows.push_back(TrainingRow{std::move(d), label, ""});
    }
    ForestConfig config = small_config(150, 13);
    config.features_per_split = 2;
    const Forest forest = train_forest(data, config);

    const double centers[2] = {0.25, 0.75};
    for (double cx : centers) {
        for (double cy : centers) {
            DescriptorVector d;
            d.numeric = {cx, cy};
            const bool hot = (cx < 0.5) != (cy < 0.5);
            const auto proba = forest.predict_proba(d);
            const double expected = hot ? 0.9 : 0.1;
            CHECK(std::abs(proba[1] - expected) < 0.05);
        }
    }
}

TEST_CASE("train_excluding equals training on the reduced row set") {
    TrainingSet data;
    data.schema = cat_schema({2});
    data.label_count = 2;
    Rng rng(17);
    for (int i = 0; i < 60; ++i) {
        const int cell = static_cast<int>(rng.index(2));
        data.rows.push_back(TrainingRow{cat_point({cell}), cell, i % 2 == 0 ? "A" : "B"});
    }
    TrainingSet only_a = data;
    only_a.rows.clear();
    for (const auto& row : data.rows) {
        if (row.origin_item == "A") only_a.rows.push_back(row);
    }
    const auto config = small_config(50, 23);
    CHECK(train_excluding(data, config, "B").to_ndjson() ==
          train_forest(only_a, config).to_ndjson());
}

TEST_CASE("excluding every row is rejected") {
    TrainingSet data;
    data.schema = cat_schema({2});
    data.label_count = 2;
    data.rows.push_back(TrainingRow{cat_point({0}), 0, "only"});
    CHECK_THROWS_AS(train_excluding(data, small_config(), "only"), EmptyTrainingSet);
}

TEST_CASE("excluding an item with a unique cell reverts that cell to other data") {
    TrainingSet data;
    data.schema = cat_schema({3, 3});
    data.label_count = 3;
    Rng rng(31);
    // item X owns cell (2,2) with pure label 2; other cells carry labels 0/1
    for (int i = 0; i < 120; ++i) data.rows.push_back(TrainingRow{cat_point({2, 2}), 2, "X"});
    for (int i = 0; i < 600; ++i) {
        const int a = static_cast<int>(rng.index(3));
        const int b = static_cast<int>(rng.index(3));
        if (a == 2 && b == 2) continue;
        data.rows.push_back(
            TrainingRow{cat_point({a, b}), static_cast<int>(rng.index(2)), "other"});
    }
    const auto config = small_config(150, 37);
    const auto full = train_forest(data, config).predict_proba(cat_point({2, 2}));
    const auto reduced = train_excluding(data, config, "X").predict_proba(cat_point({2, 2}));
    CHECK(full[2] > 0.9);
    CHECK(reduced[2] < 0.3);
}

TEST_CASE("regularize clamps from below without renormalizing") {
    const auto a = regularize({0.0, 1.0, 0.0}, 0.05);
    CHECK(a == std::vector<double>{0.05, 1.0, 0.05});
    const auto b = regularize({0.3, 0.3, 0.4}, 0.05);
    CHECK(b == std::vector<double>{0.3, 0.3, 0.4});
    const auto c = regularize({0.01, 0.99, 0.0}, 0.05);
    CHECK(c == std::vector<double>{0.05, 0.99, 0.05});
}

TEST_CASE("epsilon must lie in (0, 1/m]") {
    CHECK(validated_epsilon(0.05, 3) == 0.05);
    CHECK_THROWS_AS(validated_epsilon(0.0, 3), ConfigError);
    CHECK_THROWS_AS(validated_epsilon(0.4, 3), ConfigError);
}

TEST_CASE("property: predictions are valid distributions") {
    Rng meta(404);
    for (int trial = 0; trial < 10; ++trial) {
        TrainingSet data;
        data.schema = cat_schema({3, 4});
        data.schema.numeric_count = 1;
        data.label_count = 2 + meta.index(3);
        const int rows = 30 + static_cast<int>(meta.index(200));
        for (int i = 0; i < rows; ++i) {
            DescriptorVector d;
            d.numeric = {meta.real01() * 10.0};
            d.categorical = {static_cast<int>(meta.index(3)), static_cast<int>(meta.index(4))};
            data.rows.push_back(
                TrainingRow{std::move(d), static_cast<int>(meta.index(data.label_count)), ""});
        }
        const Forest forest = train_forest(data, small_config(40, trial));
        for (int probe = 0; probe < 20; ++probe) {
            DescriptorVector d;
            d.numeric = {meta.real01() * 12.0 - 1.0};
            d.categorical = {static_cast<int>(meta.index(3)), static_cast<int>(meta.index(4))};
            const auto proba = forest.predict_proba(d);
            double sum = 0.0;
            for (double v : proba) {
                CHECK(v >= 0.0);
                sum += v;
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("schema mismatches are rejected") {
    auto data = grid_training_set(50, 1);
    const Forest forest = train_forest(data, small_config(10, 1));
    CHECK_THROWS_AS(forest.predict_proba(cat_point({0})), SchemaMismatch);
    CHECK_THROWS_AS(forest.predict_proba(cat_point({0, 5})), SchemaMismatch);

    data.rows.push_back(TrainingRow{cat_point({9, 9}), 0, ""});
    CHECK_THROWS_AS(train_forest(data, small_config(10, 1)), SchemaMismatch);
}

TEST_CASE("same data and config give a byte-identical serialized forest") {
    const auto data = grid_training_set(800, 55);
    const auto config = small_config(30, 99);
    const std::string first = train_forest(data, config).to_ndjson();
    const std::string second = train_forest(data, config).to_ndjson();
    CHECK(first == second);

    ForestConfig reseeded = config;
    reseeded.seed = 100;
    CHECK(train_forest(data, reseeded).to_ndjson() != first);
}

TEST_CASE("serialization round-trips bit for bit") {
    const auto data = grid_training_set(500, 67);
    const Forest forest = train_forest(data, small_config(25, 3));
    const std::string text = forest.to_ndjson();
    const Forest loaded = Forest::from_ndjson(text);
    CHECK(loaded.to_ndjson() == text);
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            CHECK(loaded.predict_proba(cat_point({a, b})) ==
                  forest.predict_proba(cat_point({a, b})));
        }
    }
}

TEST_CASE("forest files with bad headers are rejected") {
    std::istringstream empty("");
    CHECK_THROWS_AS(Forest::load(empty), ConfigError);
    std::istringstream junk("{\"format\":\"something-else\"}\n");
    CHECK_THROWS_AS(Forest::load(junk), ConfigError);
}

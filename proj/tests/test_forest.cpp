#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "radiation/error.hpp"
#include "radiation/forest.hpp"
#include "radiation/rng.hpp"
#include "test_support.hpp"

using namespace radiation;

namespace {

TrainingRow row(std::vector<double> features, DeletionTruth label, const std::string& id) {
    return {std::move(features), label, id};
}

RfConfig cart_config() {
    // Single deterministic tree: no bootstrap, all features at every split.
    RfConfig config;
    config.n_trees = 1;
    config.bootstrap = false;
    config.features_per_split = 6;
    config.seed = 1;
    return config;
}

std::vector<TrainingRow> random_rows(Rng& rng, int n) {
    std::vector<TrainingRow> rows;
    for (int i = 0; i < n; ++i) {
        std::vector<double> f;
        for (int k = 0; k < 6; ++k) f.push_back(rng.next_double() * 4.0 - 2.0);
        rows.push_back(row(f, rng.next_below(2) == 0 ? DeletionTruth::deleted
                                                     : DeletionTruth::not_deleted,
                           "row" + std::to_string(i)));
    }
    // Ensure both classes exist.
    rows[0].label = DeletionTruth::deleted;
    rows[1].label = DeletionTruth::not_deleted;
    return rows;
}

// ---- exhaustive-split CART oracle ------------------------------------------
//
// Independent reimplementation used to cross-check the production trees on
// small instances: enumerates every (feature, midpoint) split recursively.

struct OracleNode {
    bool leaf = true;
    int feature = -1;
    double threshold = 0.0;
    double p = 0.0;
    std::unique_ptr<OracleNode> left, right;
};

struct OracleWeights {
    double w_del, w_not;
};

double oracle_gini(double pos, double total) {
    if (total <= 0.0) return 0.0;
    const double p = pos / total;
    return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

std::unique_ptr<OracleNode> oracle_build(const std::vector<TrainingRow>& rows,
                                         const std::vector<std::size_t>& ids,
                                         const OracleWeights& weights) {
    auto node = std::make_unique<OracleNode>();
    double total = 0.0, pos = 0.0;
    for (std::size_t i : ids) {
        const double w =
            rows[i].label == DeletionTruth::deleted ? weights.w_del : weights.w_not;
        total += w;
        if (rows[i].label == DeletionTruth::deleted) pos += w;
    }
    const double parent = oracle_gini(pos, total);

    double best_gain = 0.0;
    int best_feature = -1;
    double best_threshold = 0.0;
    if (parent > 0.0) {
        const std::size_t n_features = rows[ids[0]].features.size();
        for (std::size_t f = 0; f < n_features; ++f) {
            // Candidate thresholds: midpoints between consecutive distinct
            // sorted values.
            std::vector<double> values;
            for (std::size_t i : ids) values.push_back(rows[i].features[f]);
            std::sort(values.begin(), values.end());
            values.erase(std::unique(values.begin(), values.end()), values.end());
            for (std::size_t v = 0; v + 1 < values.size(); ++v) {
                const double threshold = values[v] + (values[v + 1] - values[v]) / 2.0;
                if (!(values[v] < threshold)) continue;
                double lt = 0.0, lp = 0.0;
                for (std::size_t i : ids) {
                    if (rows[i].features[f] >= threshold) continue;
                    const double w = rows[i].label == DeletionTruth::deleted ? weights.w_del
                                                                             : weights.w_not;
                    lt += w;
                    if (rows[i].label == DeletionTruth::deleted) lp += w;
                }
                const double rt = total - lt, rp = pos - lp;
                const double gain = parent - (lt / total) * oracle_gini(lp, lt) -
                                    (rt / total) * oracle_gini(rp, rt);
                if (gain > 0.0 && (best_feature < 0 || gain > best_gain)) {
                    best_gain = gain;
                    best_feature = static_cast<int>(f);
                    best_threshold = threshold;
                }
            }
        }
    }

    if (best_feature < 0) {
        node->p = total > 0.0 ? pos / total : 0.0;
        return node;
    }
    std::vector<std::size_t> left, right;
    for (std::size_t i : ids)
        (rows[i].features[best_feature] < best_threshold ? left : right).push_back(i);
    node->leaf = false;
    node->feature = best_feature;
    node->threshold = best_threshold;
    node->left = oracle_build(rows, left, weights);
    node->right = oracle_build(rows, right, weights);
    return node;
}

double oracle_predict(const OracleNode& node, const std::vector<double>& x) {
    if (node.leaf) return node.p;
    return x[node.feature] < node.threshold ? oracle_predict(*node.left, x)
                                            : oracle_predict(*node.right, x);
}

} // namespace

TEST_CASE("a single unrestricted tree fits consistent data exactly") {
    Rng rng(11);
    auto rows = random_rows(rng, 10);
    const Forest forest = Forest::train(rows, cart_config());
    for (const auto& r : rows) {
        const double p = forest.predict(r.features);
        if (r.label == DeletionTruth::deleted) CHECK(p == doctest::Approx(1.0));
        else CHECK(p == doctest::Approx(0.0));
    }
}

TEST_CASE("a forest learns a single-feature rule") {
    // Separable by polarity < -0.3 alone (feature index 3).
    std::vector<TrainingRow> rows;
    for (int i = 0; i < 10; ++i)
        rows.push_back(row({10.0 + i, 2.0, 1.0, -0.5 - 0.01 * i, 0.3, 1.0},
                           DeletionTruth::deleted, "d" + std::to_string(i)));
    for (int i = 0; i < 10; ++i)
        rows.push_back(row({12.0 + i, 4.0, 0.0, -0.1 + 0.01 * i, 0.3, 0.0},
                           DeletionTruth::not_deleted, "k" + std::to_string(i)));
    RfConfig config;
    config.n_trees = 30;
    config.seed = 5;
    const Forest forest = Forest::train(rows, config);
    for (const auto& r : rows) {
        const bool predicted = forest.predict(r.features) >= 0.5;
        CHECK(predicted == (r.label == DeletionTruth::deleted));
    }
}

TEST_CASE("identical features with mixed labels fall back to the weighted prior") {
    std::vector<TrainingRow> rows;
    for (int i = 0; i < 9; ++i)
        rows.push_back(row({1, 1, 1, 1, 1, 1},
                           i < 3 ? DeletionTruth::deleted : DeletionTruth::not_deleted,
                           "r" + std::to_string(i)));
    const Forest forest = Forest::train(rows, cart_config());
    // Balanced class weights make the weighted prior exactly 1/2 regardless
    // of the 3:6 imbalance.
    CHECK(forest.predict({1, 1, 1, 1, 1, 1}) == doctest::Approx(0.5));
}

TEST_CASE("forest probability is the mean of per-tree outputs") {
    Rng rng(21);
    const auto rows = random_rows(rng, 40);
    RfConfig config;
    config.n_trees = 15;
    config.seed = 9;
    const Forest forest = Forest::train(rows, config);
    for (int probe = 0; probe < 100; ++probe) {
        std::vector<double> x;
        for (int k = 0; k < 6; ++k) x.push_back(rng.next_double() * 4.0 - 2.0);
        const auto per_tree = forest.tree_probabilities(x);
        REQUIRE(per_tree.size() == 15);
        double sum = 0.0, lo = 1.0, hi = 0.0;
        for (double p : per_tree) {
            sum += p;
            lo = std::min(lo, p);
            hi = std::max(hi, p);
        }
        const double prediction = forest.predict(x);
        CHECK(prediction == doctest::Approx(sum / 15.0).epsilon(1e-12));
        CHECK(prediction >= lo - 1e-12);
        CHECK(prediction <= hi + 1e-12);
        CHECK(prediction >= 0.0);
        CHECK(prediction <= 1.0);
    }
}

TEST_CASE("no-bootstrap single tree equals the exhaustive-split oracle") {
    Rng rng(3131);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 4 + static_cast<int>(rng.next_below(9)); // up to 12 rows
        auto rows = random_rows(rng, n);
        const Forest forest = Forest::train(rows, cart_config());

        const double n_del = static_cast<double>(
            std::count_if(rows.begin(), rows.end(),
                          [](const TrainingRow& r) { return r.label == DeletionTruth::deleted; }));
        const OracleWeights weights{rows.size() / (2.0 * n_del),
                                    rows.size() / (2.0 * (rows.size() - n_del))};
        std::vector<std::size_t> ids(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) ids[i] = i;
        const auto oracle = oracle_build(rows, ids, weights);

        for (const auto& r : rows)
            CHECK(forest.predict(r.features) ==
                  doctest::Approx(oracle_predict(*oracle, r.features)).epsilon(1e-12));
        // And on fresh probe points.
        for (int probe = 0; probe < 20; ++probe) {
            std::vector<double> x;
            for (int k = 0; k < 6; ++k) x.push_back(rng.next_double() * 4.0 - 2.0);
            CHECK(forest.predict(x) ==
                  doctest::Approx(oracle_predict(*oracle, x)).epsilon(1e-12));
        }
    }
}

TEST_CASE("permuting feature columns with their names leaves predictions unchanged") {
    // Checked on the training rows: with full-feature splits, no bootstrap
    // and unit leaves, both forests drive every row into a pure leaf, so the
    // probabilities must match exactly. Off-training points may fall on a
    // different but equally good boundary when two splits tie on gain, which
    // the lowest-feature-index tie-break resolves by column position.
    Rng rng(515);
    const auto rows = random_rows(rng, 30);
    RfConfig config;
    config.n_trees = 7;
    config.features_per_split = 6;
    config.bootstrap = false;
    config.seed = 44;
    const Forest forest = Forest::train(rows, config);

    const std::vector<int> perm = {3, 0, 5, 1, 4, 2};
    auto permuted_rows = rows;
    for (auto& r : permuted_rows) {
        std::vector<double> f(6);
        for (int k = 0; k < 6; ++k) f[k] = r.features[perm[k]];
        r.features = std::move(f);
    }
    const Forest permuted_forest = Forest::train(permuted_rows, config);

    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(forest.predict(rows[i].features) ==
              doctest::Approx(permuted_forest.predict(permuted_rows[i].features))
                  .epsilon(1e-12));
    }
}

TEST_CASE("training validations") {
    CHECK_THROWS_AS(Forest::train({row({1, 1, 1, 1, 1, 1}, DeletionTruth::deleted, "a")},
                                  cart_config()),
                    ValidationError);
    CHECK_THROWS_AS(
        Forest::train({row({1, 1, 1, 1, 1, 1}, DeletionTruth::deleted, "a"),
                       row({2, 2, 2, 2, 2, 2}, DeletionTruth::deleted, "b")},
                      cart_config()),
        ValidationError);
    CHECK_THROWS_WITH_AS(
        Forest::train({row({1, 1, 1, 1, 1, std::nan("")}, DeletionTruth::deleted, "nan_row"),
                       row({2, 2, 2, 2, 2, 2}, DeletionTruth::not_deleted, "b")},
                      cart_config()),
        doctest::Contains("nan_row"), ValidationError);
    RfConfig bad;
    bad.n_trees = 0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("prediction rejects non-finite inputs") {
    Rng rng(61);
    const Forest forest = Forest::train(random_rows(rng, 8), cart_config());
    CHECK_THROWS_AS(forest.predict({1, 2, 3, 4, 5, std::nan("")}), ValidationError);
}

TEST_CASE("training is deterministic given seed and row order") {
    Rng rng(77);
    const auto rows = random_rows(rng, 25);
    RfConfig config;
    config.n_trees = 11;
    config.seed = 1234;
    const Forest a = Forest::train(rows, config);
    const Forest b = Forest::train(rows, config);
    for (int probe = 0; probe < 30; ++probe) {
        std::vector<double> x;
        for (int k = 0; k < 6; ++k) x.push_back(rng.next_double() * 4.0 - 2.0);
        CHECK(a.predict(x) == b.predict(x)); // bitwise
    }
}

TEST_CASE("model serialization round-trips") {
    Rng rng(88);
    const auto rows = random_rows(rng, 20);
    RfConfig config;
    config.n_trees = 5;
    config.seed = 3;
    const Forest forest = Forest::train(rows, config);
    const Forest reloaded = Forest::from_json_string(forest.to_json_string());
    for (int probe = 0; probe < 20; ++probe) {
        std::vector<double> x;
        for (int k = 0; k < 6; ++k) x.push_back(rng.next_double() * 4.0 - 2.0);
        CHECK(forest.predict(x) == reloaded.predict(x));
    }
}

TEST_CASE("recommend thresholds and sorts") {
    std::vector<TrainingRow> rows;
    for (int i = 0; i < 8; ++i)
        rows.push_back(row({1.0 * i, 0, 0, i < 4 ? -1.0 : 1.0, 0, i < 4 ? 1.0 : 0.0},
                           i < 4 ? DeletionTruth::deleted : DeletionTruth::not_deleted,
                           "t" + std::to_string(i)));
    RfConfig config;
    config.n_trees = 20;
    config.seed = 6;
    const Forest forest = Forest::train(rows, config);

    CHECK(recommend(forest, {}, 0.5).empty());

    std::vector<ClusterFeatures> features;
    ClusterFeatures angry;
    angry.app_id = "app";
    angry.element_key = "id:angry";
    angry.n_reviews = 2;
    angry.polarity = -1.0;
    angry.uninstall = 1.0;
    ClusterFeatures happy = angry;
    happy.element_key = "id:happy";
    happy.polarity = 1.0;
    happy.uninstall = 0.0;
    happy.n_reviews = 6;
    features.push_back(happy);
    features.push_back(angry);

    const auto recs = recommend(forest, features, 0.5);
    REQUIRE(recs.size() == 2);
    // Sorted by descending probability: the angry cluster first.
    CHECK(recs[0].element_key == "id:angry");
    CHECK(recs[0].delete_candidate);
    CHECK(!recs[1].delete_candidate);
    // Decisions equal thresholding of predict row-wise.
    for (const auto& rec : recs) {
        const auto& source = rec.element_key == "id:angry" ? angry : happy;
        CHECK(rec.probability == doctest::Approx(forest.predict(source.row())));
        CHECK(rec.delete_candidate == (rec.probability >= 0.5));
    }
}

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "radiation/sentiment.hpp"

namespace radiation {

enum class DeletionTruth { deleted, not_deleted };

const char* to_string(DeletionTruth label);
DeletionTruth deletion_truth_from_string(const std::string& s);

struct RfConfig {
    int n_trees = 100;
    int max_depth = 0;          // 0 = unlimited
    int min_samples_leaf = 1;
    int features_per_split = 3; // ceil(sqrt(6))
    bool bootstrap = true;
    double decision_threshold = 0.5;
    std::uint64_t seed = 0;

    void validate() const;
};

struct TrainingRow {
    std::vector<double> features;
    DeletionTruth label = DeletionTruth::not_deleted;
    std::string id; // reported in error messages
};

/// Random forest of axis-aligned CART trees, class imbalance handled by
/// balanced class weights in the Gini criterion and in leaf probabilities.
/// Deterministic: the same rows in the same order with the same seed yield
/// an identical forest.
class Forest {
public:
    static Forest train(const std::vector<TrainingRow>& rows, const RfConfig& config);

    /// Mean of the per-tree leaf probabilities for class `deleted`.
    double predict(const std::vector<double>& features) const;

    /// Per-tree probabilities, in tree order; predict() is their mean.
    std::vector<double> tree_probabilities(const std::vector<double>& features) const;

    int n_trees() const { return static_cast<int>(trees_.size()); }
    const RfConfig& config() const { return config_; }

    std::string to_json_string() const;
    static Forest from_json_string(const std::string& text);

    struct Node {
        bool is_leaf = true;
        int feature = -1;
        double threshold = 0.0;
        int left = -1;  // feature value < threshold
        int right = -1; // feature value >= threshold
        double p_deleted = 0.0;
    };

private:
    RfConfig config_;
    std::vector<std::string> feature_names_;
    std::vector<std::vector<Node>> trees_;
};

struct Recommendation {
    std::string app_id;
    std::string element_key;
    int release_ordinal = 0;
    int topic = 0;
    double probability = 0.0;
    bool delete_candidate = false; // probability >= decision threshold
};

/// One recommendation per feature row, sorted by descending probability
/// (ties by app, element key, ordinal, topic for stable reports).
std::vector<Recommendation> recommend(const Forest& forest,
                                      const std::vector<ClusterFeatures>& rows,
                                      double decision_threshold);

} // namespace radiation

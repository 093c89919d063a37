#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "radiation/linker.hpp"

namespace radiation {

struct HdpConfig {
    double gamma = 1.0;      // top-level concentration
    double alpha = 1.0;      // group-level concentration
    double eta = 0.5;        // symmetric word-Dirichlet
    int iterations = 500;    // Gibbs sweeps
    int burn_in = 300;       // reserved for averaging estimators; validated only
    std::uint64_t seed = 0;

    void validate() const;
};

/// Point estimate from the final Gibbs sweep: the number of topics is
/// inferred, never fixed up front.
struct TopicModel {
    int n_topics = 0;
    std::vector<std::string> vocabulary;           // word id -> token
    std::vector<std::vector<double>> topic_word;   // [topic][word], rows sum to 1
    std::vector<std::vector<double>> theta;        // [doc][topic], rows sum to 1

    /// Topic with the highest theta for a document; ties to the lowest id.
    int argmax_topic(std::size_t doc) const;

    /// The `count` highest-probability words of a topic, ties broken
    /// lexicographically.
    std::vector<std::string> top_words(int topic, std::size_t count = 10) const;
};

/// Collapsed Gibbs sampling in the direct-assignment representation of the
/// hierarchical Dirichlet process. Deterministic given config.seed.
TopicModel fit_hdp(const std::vector<std::vector<std::string>>& docs, const HdpConfig& config);

/// A topic-coherent group of reviews linked to one UI element.
struct Cluster {
    std::string app_id;
    std::string element_key;
    int release_ordinal = 0;
    int topic = 0;
    std::vector<std::string> members;   // review ids, argmax topic == `topic`
    std::vector<std::string> top_words;
    std::map<int, double> mean_theta;   // centroid of member thetas per topic
};

/// Groups linked reviews per (element key, release ordinal) and clusters
/// each group by topic. Groups below `min_group_size` become one cluster.
/// Each group runs with seed derived from config.seed, the element key and
/// the ordinal, so results do not depend on group scheduling.
std::vector<Cluster> cluster_element_reviews(
    const std::vector<Link>& links,
    const std::map<std::string, std::vector<std::string>>& review_tokens,
    const std::string& app_id, const HdpConfig& config, int min_group_size = 3);

} // namespace radiation

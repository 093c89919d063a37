#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "radiation/corpus.hpp"
#include "radiation/hdp.hpp"

namespace radiation {

/// Lemma -> (polarity in [-1,1], subjectivity in [0,1]) plus the negation
/// words that dampen a following sentiment hit.
struct SentimentLexicon {
    struct Entry {
        double polarity = 0.0;
        double subjectivity = 0.0;
    };
    std::map<std::string, Entry> entries;
    std::set<std::string> negations;

    /// Loads lexicon.tsv (lemma\tpolarity\tsubjectivity). Values outside
    /// their ranges are rejected.
    static SentimentLexicon load(const std::filesystem::path& path);
    static SentimentLexicon from_entries(const std::vector<std::pair<std::string, Entry>>& list);
};

/// Note the field name follows the upstream convention: 0 is fully
/// objective, 1 fully opinionated.
struct SentimentScore {
    double polarity = 0.0;   // [-1, 1]
    double objectivity = 0.0; // [0, 1]
};

/// polarity = mean matched-lemma polarity, scaled by -0.5 when a negation
/// word occurs within the 2 preceding tokens; objectivity = mean matched
/// subjectivity. No matches yield (0, 0). Results are clamped.
SentimentScore score_sentiment(const std::vector<std::string>& tokens,
                               const SentimentLexicon& lex);

/// True when the lemma sequence mentions "uninstall" or "refund", or has
/// "remove"/"delete" within 3 tokens of "app".
bool mentions_uninstall(const std::vector<std::string>& tokens);

/// The six recommender inputs for one cluster.
struct ClusterFeatures {
    std::string app_id;
    std::string element_key;
    int release_ordinal = 0;
    int topic = 0;

    double n_reviews = 0;
    double rating = 0.0;       // mean member rating
    double delta_rating = 0.0; // release mean - cluster mean
    double polarity = 0.0;
    double objectivity = 0.0;
    double uninstall = 0;      // count of members mentioning uninstall/refund

    std::vector<double> row() const {
        return {n_reviews, rating, delta_rating, polarity, objectivity, uninstall};
    }
    static const std::vector<std::string>& feature_names();
};

/// Computes features from member reviews. `release_mean_rating` is the mean
/// rating over all informative reviews in the cluster's window. A member id
/// without a review is fatal (index corruption).
ClusterFeatures extract_features(const Cluster& cluster,
                                 const std::map<std::string, const Review*>& reviews,
                                 const std::map<std::string, std::vector<std::string>>& tokens,
                                 double release_mean_rating, const SentimentLexicon& lex);

} // namespace radiation

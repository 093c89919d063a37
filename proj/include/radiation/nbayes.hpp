#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "radiation/textprep.hpp"

namespace radiation {

enum class ReviewLabel { informative, non_informative };

const char* to_string(ReviewLabel label);
ReviewLabel review_label_from_string(const std::string& s);

struct LabeledReview {
    std::string review_id;
    std::vector<std::string> tokens;
    ReviewLabel label = ReviewLabel::informative;
};

/// Multinomial Naive Bayes over unigram lemma counts with Laplace smoothing.
/// Immutable once trained.
class NbModel {
public:
    /// Both classes must be present and the vocabulary non-empty.
    static NbModel train(const std::vector<LabeledReview>& data, double alpha = 1.0);

    struct Classification {
        ReviewLabel label;
        double posterior; // probability of the winning class
    };

    /// Argmax of log-prior + sum of log-likelihoods over known tokens.
    /// Unknown tokens are ignored; an exact tie goes to informative so
    /// borderline reviews flow downstream.
    Classification classify(const std::vector<std::string>& tokens) const;

    /// Posterior probability of `informative`, normalized over both classes.
    double informative_posterior(const std::vector<std::string>& tokens) const;

    double alpha() const { return alpha_; }
    std::size_t vocabulary_size() const { return vocabulary_.size(); }
    double prior(ReviewLabel label) const;

    std::string to_json_string() const;
    static NbModel from_json_string(const std::string& text);

private:
    NbModel() = default;

    double alpha_ = 1.0;
    std::map<std::string, int> vocabulary_; // word -> index
    // Indexed [class][word index]; class 0 = informative, 1 = non_informative.
    std::vector<std::vector<double>> log_likelihood_;
    std::vector<double> log_prior_;
};

struct NbCvReport {
    double mean_f1_informative = 0.0;
    double mean_f1_non_informative = 0.0;
    double stdev_f1_informative = 0.0;
    double stdev_f1_non_informative = 0.0;
    std::vector<double> per_run_f1_informative;
    std::vector<double> per_run_f1_non_informative;
};

/// Repeated stratified k-fold cross-validation of the classifier. A fold
/// whose training part lacks a class triggers a refold with a new derived
/// seed, at most 5 times, then fails.
NbCvReport evaluate_nb_cv(const std::vector<LabeledReview>& data, int k, int runs,
                          std::uint64_t seed, double alpha = 1.0);

} // namespace radiation

#include "radiation/nbayes.hpp"

#include <algorithm>
#include <cmath>

#include "radiation/error.hpp"
#include "radiation/jsonl.hpp"
#include "radiation/rng.hpp"

namespace radiation {

namespace {
constexpr int kInformative = 0;
constexpr int kNonInformative = 1;

int class_index(ReviewLabel label) {
    return label == ReviewLabel::informative ? kInformative : kNonInformative;
}
} // namespace

const char* to_string(ReviewLabel label) {
    return label == ReviewLabel::informative ? "informative" : "non_informative";
}

ReviewLabel review_label_from_string(const std::string& s) {
    if (s == "informative") return ReviewLabel::informative;
    if (s == "non_informative") return ReviewLabel::non_informative;
    throw ValidationError("unknown review label '" + s + "'");
}

NbModel NbModel::train(const std::vector<LabeledReview>& data, double alpha) {
    if (alpha <= 0.0) throw ValidationError("nb: smoothing alpha must be > 0");
    std::size_t class_docs[2] = {0, 0};
    for (const auto& d : data) ++class_docs[class_index(d.label)];
    if (class_docs[0] == 0 || class_docs[1] == 0)
        throw ValidationError("nb: training data must contain both classes");

    NbModel model;
    model.alpha_ = alpha;
    for (const auto& d : data)
        for (const auto& tok : d.tokens) model.vocabulary_.emplace(tok, 0);
    if (model.vocabulary_.empty()) throw ValidationError("nb: empty vocabulary");
    int index = 0;
    for (auto& [word, idx] : model.vocabulary_) idx = index++;

    const std::size_t vocab = model.vocabulary_.size();
    std::vector<std::vector<std::int64_t>> counts(2, std::vector<std::int64_t>(vocab, 0));
    std::int64_t totals[2] = {0, 0};
    for (const auto& d : data) {
        const int c = class_index(d.label);
        for (const auto& tok : d.tokens) {
            ++counts[c][model.vocabulary_.at(tok)];
            ++totals[c];
        }
    }

    model.log_prior_ = {std::log(static_cast<double>(class_docs[0]) / data.size()),
                        std::log(static_cast<double>(class_docs[1]) / data.size())};
    model.log_likelihood_.assign(2, std::vector<double>(vocab));
    for (int c = 0; c < 2; ++c) {
        const double denom = static_cast<double>(totals[c]) + alpha * static_cast<double>(vocab);
        for (std::size_t w = 0; w < vocab; ++w)
            model.log_likelihood_[c][w] = std::log((counts[c][w] + alpha) / denom);
    }
    return model;
}

NbModel::Classification NbModel::classify(const std::vector<std::string>& tokens) const {
    double score[2] = {log_prior_[0], log_prior_[1]};
    for (const auto& tok : tokens) {
        auto it = vocabulary_.find(tok);
        if (it == vocabulary_.end()) continue;
        score[0] += log_likelihood_[0][it->second];
        score[1] += log_likelihood_[1][it->second];
    }
    // Normalize via log-sum-exp to report a proper posterior.
    const double m = std::max(score[0], score[1]);
    const double z = std::exp(score[0] - m) + std::exp(score[1] - m);
    const double p_informative = std::exp(score[0] - m) / z;
    if (score[0] >= score[1]) return {ReviewLabel::informative, p_informative};
    return {ReviewLabel::non_informative, 1.0 - p_informative};
}

double NbModel::informative_posterior(const std::vector<std::string>& tokens) const {
    const Classification c = classify(tokens);
    return c.label == ReviewLabel::informative ? c.posterior : 1.0 - c.posterior;
}

double NbModel::prior(ReviewLabel label) const {
    return std::exp(log_prior_[class_index(label)]);
}

std::string NbModel::to_json_string() const {
    Json j;
    j["format"] = "radiation.nb/1";
    j["alpha"] = alpha_;
    j["log_prior"] = {{"informative", log_prior_[0]}, {"non_informative", log_prior_[1]}};
    Json words = Json::object();
    for (const auto& [word, idx] : vocabulary_)
        words[word] = {log_likelihood_[0][idx], log_likelihood_[1][idx]};
    j["log_likelihood"] = std::move(words);
    return j.dump(2);
}

NbModel NbModel::from_json_string(const std::string& text) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded() || j.value("format", "") != "radiation.nb/1")
        throw ValidationError("nb: unrecognized model document");
    NbModel model;
    model.alpha_ = j.at("alpha").get<double>();
    model.log_prior_ = {j.at("log_prior").at("informative").get<double>(),
                        j.at("log_prior").at("non_informative").get<double>()};
    model.log_likelihood_.assign(2, {});
    int index = 0;
    for (const auto& [word, pair] : j.at("log_likelihood").items()) {
        model.vocabulary_[word] = index++;
        model.log_likelihood_[0].push_back(pair.at(0).get<double>());
        model.log_likelihood_[1].push_back(pair.at(1).get<double>());
    }
    if (model.vocabulary_.empty()) throw ValidationError("nb: model has empty vocabulary");
    return model;
}

namespace {

/// Stratified fold ids: per class, shuffled then dealt round-robin with a
/// fold counter that rolls across classes so totals stay balanced.
std::vector<int> stratified_folds(const std::vector<LabeledReview>& data, int k,
                                  std::uint64_t seed) {
    std::vector<int> fold(data.size(), 0);
    int next_fold = 0;
    for (int c = 0; c < 2; ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < data.size(); ++i)
            if (class_index(data[i].label) == c) members.push_back(i);
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
        rng.shuffle(members);
        for (std::size_t i = 0; i < members.size(); ++i) {
            fold[members[i]] = next_fold;
            next_fold = (next_fold + 1) % k;
        }
    }
    return fold;
}

bool training_parts_have_both_classes(const std::vector<LabeledReview>& data,
                                      const std::vector<int>& fold, int k) {
    for (int f = 0; f < k; ++f) {
        bool has[2] = {false, false};
        for (std::size_t i = 0; i < data.size(); ++i)
            if (fold[i] != f) has[class_index(data[i].label)] = true;
        if (!has[0] || !has[1]) return false;
    }
    return true;
}

double f1_for_class(int tp, int fp, int fn) {
    const double p = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    const double r = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    return (p + r) > 0 ? 2.0 * p * r / (p + r) : 0.0;
}

} // namespace

NbCvReport evaluate_nb_cv(const std::vector<LabeledReview>& data, int k, int runs,
                          std::uint64_t seed, double alpha) {
    if (static_cast<int>(data.size()) < k)
        throw ValidationError("nb cv: need at least k=" + std::to_string(k) + " examples");
    NbCvReport report;
    for (int run = 0; run < runs; ++run) {
        std::uint64_t run_seed = derive_seed(seed, 1000 + static_cast<std::uint64_t>(run));
        std::vector<int> fold;
        int attempts = 0;
        for (;;) {
            fold = stratified_folds(data, k, run_seed);
            if (training_parts_have_both_classes(data, fold, k)) break;
            if (++attempts > 5)
                throw ValidationError("nb cv: could not form folds with both classes present");
            run_seed = derive_seed(run_seed, static_cast<std::uint64_t>(attempts));
        }
        // Pool predictions across folds, then score per class.
        int tp[2] = {0, 0}, fp[2] = {0, 0}, fn[2] = {0, 0};
        for (int f = 0; f < k; ++f) {
            std::vector<LabeledReview> train;
            for (std::size_t i = 0; i < data.size(); ++i)
                if (fold[i] != f) train.push_back(data[i]);
            const NbModel model = NbModel::train(train, alpha);
            for (std::size_t i = 0; i < data.size(); ++i) {
                if (fold[i] != f) continue;
                const int truth = class_index(data[i].label);
                const int pred = class_index(model.classify(data[i].tokens).label);
                if (pred == truth) {
                    ++tp[truth];
                } else {
                    ++fp[pred];
                    ++fn[truth];
                }
            }
        }
        report.per_run_f1_informative.push_back(f1_for_class(tp[0], fp[0], fn[0]));
        report.per_run_f1_non_informative.push_back(f1_for_class(tp[1], fp[1], fn[1]));
    }
    auto mean_std = [](const std::vector<double>& v, double& mean, double& stdev) {
        mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        stdev = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
    };
    mean_std(report.per_run_f1_informative, report.mean_f1_informative,
             report.stdev_f1_informative);
    mean_std(report.per_run_f1_non_informative, report.mean_f1_non_informative,
             report.stdev_f1_non_informative);
    return report;
}

} // namespace radiation

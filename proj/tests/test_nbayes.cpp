#include <doctest.h>

#include <cmath>

#include "radiation/corpus.hpp"
#include "radiation/error.hpp"
#include "radiation/nbayes.hpp"
#include "radiation/rng.hpp"
#include "test_support.hpp"

using namespace radiation;

namespace {

LabeledReview labeled(const std::string& id, std::vector<std::string> tokens, ReviewLabel label) {
    return {id, std::move(tokens), label};
}

std::vector<LabeledReview> separable_corpus(int per_class) {
    std::vector<LabeledReview> data;
    for (int i = 0; i < per_class; ++i) {
        data.push_back(labeled("i" + std::to_string(i),
                               {"crash", "save", "page", "token" + std::to_string(i % 5)},
                               ReviewLabel::informative));
        data.push_back(labeled("n" + std::to_string(i),
                               {"love", "awesome", "word" + std::to_string(i % 5)},
                               ReviewLabel::non_informative));
    }
    return data;
}

} // namespace

TEST_CASE("disjoint vocabularies are perfectly separated") {
    const auto data = separable_corpus(2);
    const NbModel model = NbModel::train(data);
    for (const auto& d : data) CHECK(model.classify(d.tokens).label == d.label);
}

TEST_CASE("posterior matches hand-computed Bayes arithmetic") {
    // informative doc: [crash save page], non-informative doc: [app nice].
    // Vocabulary size 5, alpha 1.
    //   p([save crash] | inf)  = (2/8)*(2/8),  prior 1/2
    //   p([save crash] | non) = (1/7)*(1/7),  prior 1/2
    //   posterior(inf) = 0.03125 / (0.03125 + 1/98) = 0.7538461538...
    const std::vector<LabeledReview> data = {
        labeled("n", {"app", "nice"}, ReviewLabel::non_informative),
        labeled("i", {"crash", "save", "page"}, ReviewLabel::informative),
    };
    const NbModel model = NbModel::train(data, 1.0);
    const auto result = model.classify({"save", "crash"});
    CHECK(result.label == ReviewLabel::informative);
    CHECK(result.posterior == doctest::Approx(0.7538461538).epsilon(1e-9));
}

TEST_CASE("balanced labels give exact 0.5 priors") {
    const auto data = separable_corpus(5);
    const NbModel model = NbModel::train(data);
    CHECK(model.prior(ReviewLabel::informative) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(model.prior(ReviewLabel::non_informative) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("walkthrough praise and emotion reviews are non-informative") {
    const auto reviews = load_reviews(testsupport::data_dir() /
                                      "fixtures/wikipedia/nb_reviews.jsonl");
    std::vector<LabeledReview> data;
    for (const auto& r : reviews) {
        data.push_back(labeled(r.id,
                               preprocess(r.text, testsupport::lemmas(), testsupport::stops()),
                               r.id[2] == 'I' ? ReviewLabel::informative
                                              : ReviewLabel::non_informative));
    }
    const NbModel model = NbModel::train(data);
    const auto hate = preprocess("I hate this app!", testsupport::lemmas(), testsupport::stops());
    const auto awesome =
        preprocess("The app is awesome", testsupport::lemmas(), testsupport::stops());
    CHECK(model.classify(hate).label == ReviewLabel::non_informative);
    CHECK(model.classify(awesome).label == ReviewLabel::non_informative);
}

TEST_CASE("tie goes to informative") {
    const std::vector<LabeledReview> data = {
        labeled("i", {"crash"}, ReviewLabel::informative),
        labeled("n", {"love"}, ReviewLabel::non_informative),
    };
    const NbModel model = NbModel::train(data);
    // Unknown tokens are ignored; equal priors leave an exact tie.
    const auto result = model.classify({"unseen", "tokens"});
    CHECK(result.label == ReviewLabel::informative);
    CHECK(result.posterior == doctest::Approx(0.5));
}

TEST_CASE("posteriors of the two classes sum to one") {
    const auto data = separable_corpus(4);
    const NbModel model = NbModel::train(data);
    const std::vector<std::vector<std::string>> probes = {
        {"crash"}, {"love", "page"}, {"token0", "word3", "save"}, {"unknown"}};
    for (const auto& probe : probes) {
        const double p_inf = model.informative_posterior(probe);
        const auto c = model.classify(probe);
        const double p_win = c.posterior;
        const double p_lose = 1.0 - p_win;
        CHECK(p_win + p_lose == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(p_inf == doctest::Approx(c.label == ReviewLabel::informative ? p_win : p_lose));
    }
}

TEST_CASE("duplicating every training document keeps decisions unchanged") {
    const auto data = separable_corpus(3);
    auto doubled = data;
    doubled.insert(doubled.end(), data.begin(), data.end());
    const NbModel a = NbModel::train(data);
    const NbModel b = NbModel::train(doubled);
    const std::vector<std::vector<std::string>> probes = {
        {"crash", "love"}, {"save", "page", "awesome"}, {"token1"}, {"word2", "word2"}};
    for (const auto& probe : probes)
        CHECK(a.classify(probe).label == b.classify(probe).label);
}

TEST_CASE("smoothing leaves no zero likelihoods") {
    const auto data = separable_corpus(2);
    const NbModel model = NbModel::train(data);
    // A word seen only in one class still yields a finite score for both.
    const auto result = model.classify({"crash", "crash", "crash", "awesome"});
    CHECK(std::isfinite(result.posterior));
    CHECK(result.posterior > 0.0);
    CHECK(result.posterior < 1.0);
}

TEST_CASE("training rejects single-class and empty-vocabulary data") {
    CHECK_THROWS_AS(NbModel::train({labeled("a", {"x"}, ReviewLabel::informative)}),
                    ValidationError);
    CHECK_THROWS_AS(NbModel::train({labeled("a", {}, ReviewLabel::informative),
                                    labeled("b", {}, ReviewLabel::non_informative)}),
                    ValidationError);
    CHECK_THROWS_AS(NbModel::train(separable_corpus(2), 0.0), ValidationError);
}

TEST_CASE("model serialization round-trips") {
    const auto data = separable_corpus(3);
    const NbModel model = NbModel::train(data);
    const NbModel reloaded = NbModel::from_json_string(model.to_json_string());
    const std::vector<std::vector<std::string>> probes = {
        {"crash"}, {"love"}, {"save", "awesome"}, {"unknown"}};
    for (const auto& probe : probes) {
        CHECK(model.classify(probe).label == reloaded.classify(probe).label);
        CHECK(model.classify(probe).posterior ==
              doctest::Approx(reloaded.classify(probe).posterior).epsilon(1e-12));
    }
}

TEST_CASE("cross-validation on a separable corpus is perfect") {
    const auto report = evaluate_nb_cv(separable_corpus(20), 10, 2, 99);
    CHECK(report.mean_f1_informative == doctest::Approx(1.0));
    CHECK(report.mean_f1_non_informative == doctest::Approx(1.0));
}

TEST_CASE("shuffled labels score near chance") {
    auto data = separable_corpus(50); // 100 docs
    Rng rng(123);
    // Random relabeling, half and half.
    std::vector<ReviewLabel> labels;
    for (std::size_t i = 0; i < data.size(); ++i)
        labels.push_back(i % 2 == 0 ? ReviewLabel::informative : ReviewLabel::non_informative);
    rng.shuffle(labels);
    for (std::size_t i = 0; i < data.size(); ++i) data[i].label = labels[i];
    const auto report = evaluate_nb_cv(data, 10, 3, 77);
    CHECK(report.mean_f1_informative > 0.35);
    CHECK(report.mean_f1_informative < 0.65);
}

TEST_CASE("bundled labeled fixture reaches F1 >= 0.8") {
    const auto reviews = load_reviews(testsupport::data_dir() /
                                      "fixtures/wikipedia/nb_reviews.jsonl");
    std::vector<LabeledReview> data;
    for (const auto& r : reviews)
        data.push_back(labeled(r.id,
                               preprocess(r.text, testsupport::lemmas(), testsupport::stops()),
                               r.id[2] == 'I' ? ReviewLabel::informative
                                              : ReviewLabel::non_informative));
    REQUIRE(data.size() == 200);
    const auto report = evaluate_nb_cv(data, 10, 10, 4242);
    CHECK(report.mean_f1_informative >= 0.8);
    CHECK(report.mean_f1_non_informative >= 0.8);
}

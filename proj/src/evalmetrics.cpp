#include "radiation/evalmetrics.hpp"

#include <algorithm>
#include <cmath>

#include "radiation/error.hpp"
#include "radiation/rng.hpp"

namespace radiation {

Prf1 prf1(const ConfusionMatrix& m) {
    if (m.tp < 0 || m.fp < 0 || m.fn < 0 || m.tn < 0)
        throw ValidationError("metrics: negative confusion counts");
    if (m.total() == 0) throw ValidationError("metrics: all-zero confusion matrix");
    Prf1 r;
    r.precision = (m.tp + m.fp) > 0 ? static_cast<double>(m.tp) / (m.tp + m.fp) : 0.0;
    r.recall = (m.tp + m.fn) > 0 ? static_cast<double>(m.tp) / (m.tp + m.fn) : 0.0;
    r.f1 = (r.precision + r.recall) > 0.0
               ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
               : 0.0;
    return r;
}

EvalReport evaluate_predictions(const std::vector<EvalRow>& rows) {
    EvalReport report;
    for (const auto& row : rows) {
        ConfusionMatrix& m = report.per_app[row.app_id];
        if (row.recommended && row.deleted) ++m.tp;
        else if (row.recommended && !row.deleted) ++m.fp;
        else if (!row.recommended && row.deleted) ++m.fn;
        else ++m.tn;
    }
    double f1_sum = 0.0;
    for (const auto& [app, m] : report.per_app) {
        report.overall += m;
        const Prf1 metrics = prf1(m);
        report.per_app_metrics[app] = metrics;
        f1_sum += metrics.f1;
    }
    if (!report.per_app.empty()) {
        report.pooled = prf1(report.overall);
        report.macro_f1 = f1_sum / static_cast<double>(report.per_app.size());
    }
    return report;
}

namespace {

std::vector<int> stratified_folds(const std::vector<CvRow>& rows, int k, std::uint64_t seed) {
    // Deal each class round-robin with a fold counter that rolls across
    // classes, so per-fold totals stay balanced too.
    std::vector<int> fold(rows.size(), 0);
    int next_fold = 0;
    for (int c = 0; c < 2; ++c) {
        const DeletionTruth label = c == 0 ? DeletionTruth::deleted : DeletionTruth::not_deleted;
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (rows[i].label == label) members.push_back(i);
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
        rng.shuffle(members);
        for (std::size_t i = 0; i < members.size(); ++i) {
            fold[members[i]] = next_fold;
            next_fold = (next_fold + 1) % k;
        }
    }
    return fold;
}

bool folds_trainable(const std::vector<CvRow>& rows, const std::vector<int>& fold, int k) {
    for (int f = 0; f < k; ++f) {
        bool has_del = false, has_not = false;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (fold[i] == f) continue;
            (rows[i].label == DeletionTruth::deleted ? has_del : has_not) = true;
        }
        if (!has_del || !has_not) return false;
    }
    return true;
}

} // namespace

CvReport kfold_cv(const std::vector<CvRow>& rows, int k, const RfConfig& config,
                  std::uint64_t seed) {
    if (k < 2) throw ValidationError("cv: k must be >= 2");
    if (static_cast<int>(rows.size()) < k)
        throw ValidationError("cv: need at least k=" + std::to_string(k) + " rows");
    bool has_del = false, has_not = false;
    for (const auto& row : rows)
        (row.label == DeletionTruth::deleted ? has_del : has_not) = true;
    if (!has_del || !has_not) throw ValidationError("cv: both classes must be present");

    std::vector<int> fold;
    std::uint64_t fold_seed = seed;
    int attempts = 0;
    for (;;) {
        fold = stratified_folds(rows, k, fold_seed);
        if (folds_trainable(rows, fold, k)) break;
        if (++attempts > 5)
            throw ValidationError("cv: could not form folds with both classes in training parts");
        fold_seed = derive_seed(fold_seed, static_cast<std::uint64_t>(attempts));
    }

    CvReport report;
    report.per_fold.resize(k);
    for (int f = 0; f < k; ++f) {
        std::vector<TrainingRow> train;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (fold[i] == f) continue;
            train.push_back({rows[i].features, rows[i].label, rows[i].id});
        }
        RfConfig fold_config = config;
        fold_config.seed = derive_seed(seed, 0xF01D0000ULL + static_cast<std::uint64_t>(f));
        const Forest forest = Forest::train(train, fold_config);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (fold[i] != f) continue;
            const bool recommended =
                forest.predict(rows[i].features) >= config.decision_threshold;
            const bool deleted = rows[i].label == DeletionTruth::deleted;
            ConfusionMatrix& m = report.per_fold[f];
            ConfusionMatrix& a = report.per_app[rows[i].app_id];
            if (recommended && deleted) ++m.tp, ++a.tp;
            else if (recommended && !deleted) ++m.fp, ++a.fp;
            else if (!recommended && deleted) ++m.fn, ++a.fn;
            else ++m.tn, ++a.tn;
        }
    }
    for (const auto& m : report.per_fold) report.pooled += m;
    report.pooled_metrics = prf1(report.pooled);
    double f1_sum = 0.0;
    std::size_t apps = 0;
    for (const auto& [app, m] : report.per_app) {
        if (m.total() == 0) continue;
        f1_sum += prf1(m).f1;
        ++apps;
    }
    report.macro_f1 = apps > 0 ? f1_sum / static_cast<double>(apps) : 0.0;
    return report;
}

TloReport tlo(const std::vector<IntrusionJudgment>& judgments) {
    constexpr double kEpsilon = 1e-12;
    TloReport report;
    if (judgments.empty()) throw ValidationError("tlo: no judgments");
    double sum = 0.0;
    for (const auto& j : judgments) {
        if (j.selections.empty())
            throw ValidationError("tlo: document '" + j.doc_id + "' has no selections");
        auto theta_of = [&](int topic) {
            auto it = j.theta.find(topic);
            if (it == j.theta.end())
                throw ValidationError("tlo: document '" + j.doc_id + "': topic " +
                                      std::to_string(topic) + " not among presented topics");
            return std::max(it->second, kEpsilon);
        };
        const double log_intruder = std::log(theta_of(j.true_intruder));
        double acc = 0.0;
        for (int selected : j.selections) acc += log_intruder - std::log(theta_of(selected));
        const double value = acc / static_cast<double>(j.selections.size());
        report.per_doc[j.doc_id] = value;
        sum += value;
    }
    report.mean = sum / static_cast<double>(judgments.size());
    return report;
}

} // namespace radiation

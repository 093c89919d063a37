#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "radiation/forest.hpp"

namespace radiation {

struct ConfusionMatrix {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t tn = 0;

    std::int64_t total() const { return tp + fp + fn + tn; }
    ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        tn += o.tn;
        return *this;
    }
};

struct Prf1 {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// precision = tp/(tp+fp) (0 when no positive predictions), recall =
/// tp/(tp+fn) (0 when no positives exist), f1 = harmonic mean (0 when
/// p+r = 0). An all-zero matrix is fatal.
Prf1 prf1(const ConfusionMatrix& m);

/// A prediction joined with its truth label.
struct EvalRow {
    std::string app_id;
    std::string key; // element key + ordinal + topic, for error messages
    bool recommended = false;
    bool deleted = false;
};

struct EvalReport {
    std::map<std::string, ConfusionMatrix> per_app;
    ConfusionMatrix overall;
    std::map<std::string, Prf1> per_app_metrics;
    Prf1 pooled;     // micro: metrics of the summed matrix
    double macro_f1 = 0.0; // mean of per-app F1
};

/// TP = recommended and deleted, TN = neither, FP = recommended only,
/// FN = deleted only; aggregated per app and overall.
EvalReport evaluate_predictions(const std::vector<EvalRow>& rows);

struct CvReport {
    std::vector<ConfusionMatrix> per_fold;
    ConfusionMatrix pooled;
    std::map<std::string, ConfusionMatrix> per_app;
    Prf1 pooled_metrics;
    double macro_f1 = 0.0;
};

struct CvRow {
    std::string app_id;
    std::string id;
    std::vector<double> features;
    DeletionTruth label = DeletionTruth::not_deleted;
};

/// Stratified k-fold cross-validation of the recommender: train a forest on
/// k-1 folds, predict the held-out fold at the config decision threshold.
/// Fold membership is deterministic given the seed; a fold whose training
/// part lacks a class triggers a refold (max 5 retries).
CvReport kfold_cv(const std::vector<CvRow>& rows, int k, const RfConfig& config,
                  std::uint64_t seed);

/// One topic-intrusion judgment round for one document.
struct IntrusionJudgment {
    std::string doc_id;
    std::map<int, double> theta;  // presented topics -> probability
    int true_intruder = 0;        // must have strictly minimal theta
    std::vector<int> selections;  // one chosen topic per judge
};

struct TloReport {
    std::map<std::string, double> per_doc;
    double mean = 0.0;
};

/// TLO(d) = (1/S) * sum_s [ln theta(true intruder) - ln theta(selected_s)],
/// with theta clipped at 1e-12 before the logs. 0 means every judge found
/// the intruder; values are never positive for valid judgments.
TloReport tlo(const std::vector<IntrusionJudgment>& judgments);

} // namespace radiation

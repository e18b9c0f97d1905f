#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "gpmfs/dataset.hpp"
#include "gpmfs/selection.hpp"
#include "gpmfs/solver.hpp"
#include "gpmfs/structures.hpp"

namespace gpmfs {

struct PredictionResult {
  Eigen::MatrixXd scores;     // n_test x L, in [0, 1]
  Eigen::MatrixXd decisions;  // n_test x L, entries 0 or 1
};

/// Two-stage neighbor predictor. Stage 1 keeps the candidate_k nearest
/// training rows in the global feature subspace; stage 2 re-ranks that pool
/// per label in the label's complete subspace, keeps final_k, and scores the
/// label by its positive fraction among the kept rows. Ties always break to
/// the lower training-row index; decisions use a strict 0.5 threshold.
PredictionResult two_stage_knn_predict(const Dataset& train, const Dataset& test,
                                       const FeatureSelection& selection,
                                       int candidate_k, int final_k);

/// ML-KNN baseline over the given feature subset: Laplace-smoothed label
/// priors plus neighborhood-count posteriors; scores are normalized
/// posteriors.
PredictionResult mlknn_predict(const Dataset& train, const Dataset& test,
                               const std::vector<int>& features, int k,
                               double smoothing);

struct MetricsReport {
  double hamming_loss = 0.0;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  double one_error = 0.0;
  double average_precision = 0.0;
  int skipped_instances = 0;  // empty-truth rows excluded from the ranking metrics
};

double hamming_loss(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& decisions);
/// Zero-denominator micro/macro conventions: an empty confusion (no positives
/// anywhere in truth or prediction) counts as a perfect 1.
double micro_f1(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& decisions);
double macro_f1(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& decisions);
/// Ranking metrics skip instances with empty truth; `skipped` (optional)
/// receives the skip count. Score ties rank the lower label index first.
double one_error(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& scores,
                 int* skipped = nullptr);
double average_precision(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& scores,
                         int* skipped = nullptr);

MetricsReport compute_metrics(const Eigen::MatrixXd& truth,
                              const Eigen::MatrixXd& scores,
                              const Eigen::MatrixXd& decisions);

enum class PredictorKind { kTwoStageKnn, kMlKnn };

struct EvalOptions {
  int candidate_k = 20;
  int final_k = 10;
  PredictorKind predictor = PredictorKind::kTwoStageKnn;
  int workers = 1;
};

struct FoldResult {
  int fold = 0;
  MetricsReport metrics;
  SelectionStats selection;
};

struct CvReport {
  int folds = 0;
  std::uint64_t seed = 0;
  std::vector<FoldResult> per_fold;
  MetricsReport mean;  // metric means; skipped_instances is the fold total
  double mean_global_size = 0.0;
  double mean_personalized = 0.0;
  double mean_personalized_proportion = 0.0;
};

/// Seeded k-fold protocol: per fold, standardize on the training split, build
/// the train-side structures, solve, select, predict on the held-out split,
/// and score. Neighbor counts are clamped to what small folds can support.
/// Folds may run concurrently (options.workers); reported order is by fold.
CvReport cross_validate(const Dataset& dataset, const HyperParams& params, int folds,
                        std::uint64_t seed, const EvalOptions& options = {});

/// Full-data pipeline used by selection/trace workflows: standardize on all
/// rows, build structures, solve, select.
struct PipelineResult {
  Dataset standardized;
  StandardizationParams standardizer;
  PearsonMatrix correlation;
  AffinityGraph graph;
  LaplacianMatrix lap;
  SolverState state;
  FeatureSelection selection;
};

PipelineResult run_pipeline(const Dataset& dataset, const HyperParams& params);

}  // namespace gpmfs

#include "gpmfs/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gpmfs/concurrency.hpp"
#include "gpmfs/errors.hpp"

namespace gpmfs {
namespace {

// Squared distance between two rows restricted to the given columns.
double subspace_d2(const Eigen::MatrixXd& a, Eigen::Index ra, const Eigen::MatrixXd& b,
                   Eigen::Index rb, const std::vector<int>& cols) {
  double acc = 0.0;
  for (int c : cols) {
    double d = a(ra, c) - b(rb, c);
    acc += d * d;
  }
  return acc;
}

// Indices of the k nearest rows of `train` to row `r` of `query` in the given
// subspace, nearest first, ties to the lower training index. `skip` excludes
// one training row (-1 keeps all).
std::vector<int> nearest_rows(const Eigen::MatrixXd& train, const Eigen::MatrixXd& query,
                              Eigen::Index r, const std::vector<int>& cols, int k,
                              int skip = -1) {
  std::vector<std::pair<double, int>> dist;
  dist.reserve(static_cast<std::size_t>(train.rows()));
  for (Eigen::Index i = 0; i < train.rows(); ++i) {
    if (static_cast<int>(i) == skip) continue;
    dist.emplace_back(subspace_d2(query, r, train, i, cols), static_cast<int>(i));
  }
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int m = 0; m < k; ++m) out.push_back(dist[static_cast<std::size_t>(m)].second);
  return out;
}

void check_same_feature_space(const Dataset& train, const Dataset& test) {
  if (train.feature_count() != test.feature_count())
    throw ArgumentError("train and test feature counts disagree");
  if (train.label_count() != test.label_count())
    throw ArgumentError("train and test label counts disagree");
}

void check_shapes(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& other,
                  const char* what) {
  if (truth.rows() != other.rows() || truth.cols() != other.cols())
    throw ArgumentError(std::string("metric shapes disagree: truth vs ") + what);
}

// Labels ordered best-first by score, ties to the lower index.
std::vector<int> score_ranking(const Eigen::MatrixXd& scores, Eigen::Index row) {
  std::vector<int> order(static_cast<std::size_t>(scores.cols()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores(row, a) != scores(row, b)) return scores(row, a) > scores(row, b);
    return a < b;
  });
  return order;
}

}  // namespace

PredictionResult two_stage_knn_predict(const Dataset& train, const Dataset& test,
                                       const FeatureSelection& selection,
                                       int candidate_k, int final_k) {
  check_same_feature_space(train, test);
  const int n_train = static_cast<int>(train.instance_count());
  if (candidate_k < 1 || candidate_k > n_train)
    throw ArgumentError("candidate_k must be in [1, training size]");
  if (final_k < 1 || final_k > candidate_k)
    throw ArgumentError("final_k must be in [1, candidate_k]");
  if (selection.global.empty()) throw ArgumentError("selection has no global features");
  const Eigen::Index l = train.label_count();
  if (static_cast<Eigen::Index>(selection.complete.size()) != l)
    throw ArgumentError("selection label count disagrees with dataset");
  for (int g : selection.global) {
    if (g < 0 || g >= train.feature_count())
      throw ArgumentError("selection feature index out of range");
  }

  PredictionResult result;
  result.scores.resize(test.instance_count(), l);
  result.decisions.resize(test.instance_count(), l);
  std::vector<std::pair<double, int>> pool(static_cast<std::size_t>(candidate_k));
  for (Eigen::Index t = 0; t < test.instance_count(); ++t) {
    std::vector<int> candidates = nearest_rows(train.features, test.features, t,
                                               selection.global, candidate_k);
    for (Eigen::Index label = 0; label < l; ++label) {
      const std::vector<int>& cols = selection.complete[static_cast<std::size_t>(label)];
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        int i = candidates[c];
        pool[c] = {subspace_d2(test.features, t, train.features, i, cols), i};
      }
      std::sort(pool.begin(), pool.end());
      int keep = final_k;
      int positives = 0;
      for (int m = 0; m < keep; ++m) {
        positives += train.labels(pool[static_cast<std::size_t>(m)].second, label) == 1.0;
      }
      double score = static_cast<double>(positives) / static_cast<double>(keep);
      result.scores(t, label) = score;
      result.decisions(t, label) = score > 0.5 ? 1.0 : 0.0;
    }
  }
  return result;
}

PredictionResult mlknn_predict(const Dataset& train, const Dataset& test,
                               const std::vector<int>& features, int k,
                               double smoothing) {
  check_same_feature_space(train, test);
  const int n_train = static_cast<int>(train.instance_count());
  if (k < 1 || k >= n_train)
    throw ArgumentError("mlknn k must satisfy 1 <= k < training size");
  if (!(smoothing >= 0.0)) throw ArgumentError("smoothing must be nonnegative");
  if (features.empty()) throw ArgumentError("mlknn feature subset is empty");
  for (int f : features) {
    if (f < 0 || f >= train.feature_count())
      throw ArgumentError("mlknn feature index out of range");
  }

  const Eigen::Index l = train.label_count();
  const double s = smoothing;

  Eigen::VectorXd prior1(l);
  for (Eigen::Index label = 0; label < l; ++label) {
    prior1(label) =
        (s + train.labels.col(label).sum()) / (2.0 * s + static_cast<double>(n_train));
  }

  // Neighborhood positive-counts on the training set itself (self excluded),
  // then the frequency arrays for each count value 0..k.
  Eigen::MatrixXd count1 = Eigen::MatrixXd::Zero(l, k + 1);  // truth positive
  Eigen::MatrixXd count0 = Eigen::MatrixXd::Zero(l, k + 1);  // truth negative
  for (int i = 0; i < n_train; ++i) {
    std::vector<int> nb =
        nearest_rows(train.features, train.features, i, features, k, i);
    for (Eigen::Index label = 0; label < l; ++label) {
      int c = 0;
      for (int j : nb) c += train.labels(j, label) == 1.0;
      if (train.labels(i, label) == 1.0) {
        count1(label, c) += 1.0;
      } else {
        count0(label, c) += 1.0;
      }
    }
  }
  Eigen::MatrixXd cond1(l, k + 1), cond0(l, k + 1);
  for (Eigen::Index label = 0; label < l; ++label) {
    double total1 = count1.row(label).sum();
    double total0 = count0.row(label).sum();
    for (int c = 0; c <= k; ++c) {
      cond1(label, c) = (s + count1(label, c)) / (s * (k + 1) + total1);
      cond0(label, c) = (s + count0(label, c)) / (s * (k + 1) + total0);
    }
  }

  PredictionResult result;
  result.scores.resize(test.instance_count(), l);
  result.decisions.resize(test.instance_count(), l);
  for (Eigen::Index t = 0; t < test.instance_count(); ++t) {
    std::vector<int> nb = nearest_rows(train.features, test.features, t, features, k);
    for (Eigen::Index label = 0; label < l; ++label) {
      int c = 0;
      for (int j : nb) c += train.labels(j, label) == 1.0;
      double w1 = prior1(label) * cond1(label, c);
      double w0 = (1.0 - prior1(label)) * cond0(label, c);
      double score = (w1 + w0 > 0.0) ? w1 / (w1 + w0) : 0.5;
      result.scores(t, label) = score;
      result.decisions(t, label) = score > 0.5 ? 1.0 : 0.0;
    }
  }
  return result;
}

double hamming_loss(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& decisions) {
  check_shapes(truth, decisions, "decisions");
  if (truth.size() == 0) throw ArgumentError("hamming_loss: empty matrices");
  double mismatches = 0.0;
  for (Eigen::Index i = 0; i < truth.rows(); ++i) {
    for (Eigen::Index j = 0; j < truth.cols(); ++j) {
      mismatches += truth(i, j) != decisions(i, j);
    }
  }
  return mismatches / static_cast<double>(truth.size());
}

double micro_f1(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& decisions) {
  check_shapes(truth, decisions, "decisions");
  double tp = 0.0, fp = 0.0, fn = 0.0;
  for (Eigen::Index i = 0; i < truth.rows(); ++i) {
    for (Eigen::Index j = 0; j < truth.cols(); ++j) {
      bool t = truth(i, j) == 1.0;
      bool d = decisions(i, j) == 1.0;
      tp += t && d;
      fp += !t && d;
      fn += t && !d;
    }
  }
  double denom = 2.0 * tp + fp + fn;
  return denom > 0.0 ? 2.0 * tp / denom : 1.0;
}

double macro_f1(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& decisions) {
  check_shapes(truth, decisions, "decisions");
  if (truth.cols() == 0) throw ArgumentError("macro_f1: no labels");
  double total = 0.0;
  for (Eigen::Index j = 0; j < truth.cols(); ++j) {
    double tp = 0.0, fp = 0.0, fn = 0.0;
    for (Eigen::Index i = 0; i < truth.rows(); ++i) {
      bool t = truth(i, j) == 1.0;
      bool d = decisions(i, j) == 1.0;
      tp += t && d;
      fp += !t && d;
      fn += t && !d;
    }
    double denom = 2.0 * tp + fp + fn;
    total += denom > 0.0 ? 2.0 * tp / denom : 1.0;
  }
  return total / static_cast<double>(truth.cols());
}

double one_error(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& scores,
                 int* skipped) {
  check_shapes(truth, scores, "scores");
  int counted = 0;
  int skip = 0;
  double errors = 0.0;
  for (Eigen::Index i = 0; i < truth.rows(); ++i) {
    if (truth.row(i).sum() == 0.0) {
      ++skip;
      continue;
    }
    Eigen::Index top = 0;
    for (Eigen::Index j = 1; j < scores.cols(); ++j) {
      if (scores(i, j) > scores(i, top)) top = j;  // ties keep the lower index
    }
    errors += truth(i, top) == 0.0;
    ++counted;
  }
  if (skipped != nullptr) *skipped = skip;
  return counted > 0 ? errors / static_cast<double>(counted) : 0.0;
}

double average_precision(const Eigen::MatrixXd& truth, const Eigen::MatrixXd& scores,
                         int* skipped) {
  check_shapes(truth, scores, "scores");
  int counted = 0;
  int skip = 0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < truth.rows(); ++i) {
    if (truth.row(i).sum() == 0.0) {
      ++skip;
      continue;
    }
    std::vector<int> order = score_ranking(scores, i);
    double instance = 0.0;
    int seen_positives = 0;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
      if (truth(i, order[rank]) == 1.0) {
        ++seen_positives;
        instance += static_cast<double>(seen_positives) / static_cast<double>(rank + 1);
      }
    }
    total += instance / static_cast<double>(seen_positives);
    ++counted;
  }
  if (skipped != nullptr) *skipped = skip;
  return counted > 0 ? total / static_cast<double>(counted) : 0.0;
}

MetricsReport compute_metrics(const Eigen::MatrixXd& truth,
                              const Eigen::MatrixXd& scores,
                              const Eigen::MatrixXd& decisions) {
  MetricsReport report;
  report.hamming_loss = hamming_loss(truth, decisions);
  report.micro_f1 = micro_f1(truth, decisions);
  report.macro_f1 = macro_f1(truth, decisions);
  int skipped = 0;
  report.one_error = one_error(truth, scores, &skipped);
  report.average_precision = average_precision(truth, scores);
  report.skipped_instances = skipped;
  return report;
}

CvReport cross_validate(const Dataset& dataset, const HyperParams& params, int folds,
                        std::uint64_t seed, const EvalOptions& options) {
  validate(dataset);
  params.validate();
  if (options.candidate_k < 1) throw ArgumentError("candidate_k must be at least 1");
  if (options.final_k < 1 || options.final_k > options.candidate_k)
    throw ArgumentError("final_k must be in [1, candidate_k]");
  if (options.workers < 1) throw ArgumentError("workers must be at least 1");

  const int n = static_cast<int>(dataset.instance_count());
  FoldAssignment fa = kfold_split(n, folds, seed);

  CvReport report;
  report.folds = folds;
  report.seed = seed;
  report.per_fold.resize(static_cast<std::size_t>(folds));

  auto run_fold = [&](int f) {
    std::vector<int> train_rows = fa.train_rows(f);
    std::vector<int> test_rows = fa.test_rows(f);
    const int n_train = static_cast<int>(train_rows.size());

    StandardizationParams standardizer = fit_standardizer(dataset, train_rows);
    Dataset train = apply_standardizer(select_rows(dataset, train_rows), standardizer);
    Dataset test = apply_standardizer(select_rows(dataset, test_rows), standardizer);

    HyperParams fold_params = params;
    fold_params.graph_k = std::min(params.graph_k, n_train - 1);

    PearsonMatrix correlation = pearson_matrix(train.features);
    AffinityGraph graph =
        knn_affinity(train.features, fold_params.graph_k, fold_params.sigma);
    LaplacianMatrix lap = laplacian(graph);
    SolverState state = solve(train, correlation, lap, fold_params);
    FeatureSelection selection = select_features(state.W, fold_params);

    PredictionResult prediction;
    if (options.predictor == PredictorKind::kTwoStageKnn) {
      int ck = std::min(options.candidate_k, n_train);
      int fk = std::min(options.final_k, ck);
      prediction = two_stage_knn_predict(train, test, selection, ck, fk);
    } else {
      int k = std::min(options.final_k, n_train - 1);
      prediction = mlknn_predict(train, test, selection.global, k, 1.0);
    }

    FoldResult& out = report.per_fold[static_cast<std::size_t>(f)];
    out.fold = f;
    out.metrics = compute_metrics(test.labels, prediction.scores, prediction.decisions);
    out.selection = selection_stats(selection, dataset.feature_count());
  };

  parallel_for_indexed(folds, options.workers, [&](int f) {
    try {
      run_fold(f);
    } catch (const ParseError& e) {
      throw ParseError("fold " + std::to_string(f) + ": " + e.raw(), e.line());
    } catch (const NumericError& e) {
      throw NumericError("fold " + std::to_string(f) + ": " + e.raw(), e.iteration());
    } catch (const ArgumentError& e) {
      throw ArgumentError("fold " + std::to_string(f) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("fold " + std::to_string(f) + ": " + e.what());
    } catch (const IoError& e) {
      throw IoError("fold " + std::to_string(f) + ": " + e.what());
    }
  });

  for (const FoldResult& fr : report.per_fold) {
    report.mean.hamming_loss += fr.metrics.hamming_loss;
    report.mean.micro_f1 += fr.metrics.micro_f1;
    report.mean.macro_f1 += fr.metrics.macro_f1;
    report.mean.one_error += fr.metrics.one_error;
    report.mean.average_precision += fr.metrics.average_precision;
    report.mean.skipped_instances += fr.metrics.skipped_instances;
    report.mean_global_size += fr.selection.global_size;
    report.mean_personalized += fr.selection.mean_personalized;
    report.mean_personalized_proportion += fr.selection.personalized_proportion;
  }
  const double fcount = static_cast<double>(folds);
  report.mean.hamming_loss /= fcount;
  report.mean.micro_f1 /= fcount;
  report.mean.macro_f1 /= fcount;
  report.mean.one_error /= fcount;
  report.mean.average_precision /= fcount;
  report.mean_global_size /= fcount;
  report.mean_personalized /= fcount;
  report.mean_personalized_proportion /= fcount;
  return report;
}

PipelineResult run_pipeline(const Dataset& dataset, const HyperParams& params) {
  validate(dataset);
  params.validate();
  PipelineResult result;
  std::vector<int> all_rows(static_cast<std::size_t>(dataset.instance_count()));
  std::iota(all_rows.begin(), all_rows.end(), 0);
  result.standardizer = fit_standardizer(dataset, all_rows);
  result.standardized = apply_standardizer(dataset, result.standardizer);
  result.correlation = pearson_matrix(result.standardized.features);
  result.graph = knn_affinity(result.standardized.features, params.graph_k, params.sigma);
  result.lap = laplacian(result.graph);
  result.state = solve(result.standardized, result.correlation, result.lap, params);
  result.selection = select_features(result.state.W, params);
  return result;
}

}  // namespace gpmfs

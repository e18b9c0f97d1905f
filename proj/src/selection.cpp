#include "gpmfs/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gpmfs/errors.hpp"

namespace gpmfs {

std::vector<int> rank_global(const Eigen::MatrixXd& W, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw ArgumentError("global_fraction must be in (0, 1]");
  const Eigen::Index f = W.rows();
  if (f < 1) throw ArgumentError("rank_global: W has no rows");

  Eigen::VectorXd norms = W.rowwise().norm();
  std::vector<int> order(static_cast<std::size_t>(f));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (norms(a) != norms(b)) return norms(a) > norms(b);
    return a < b;
  });

  long count = std::lround(fraction * static_cast<double>(f));
  count = std::clamp(count, 1L, static_cast<long>(f));
  order.resize(static_cast<std::size_t>(count));
  return order;
}

std::vector<std::vector<int>> personalized_features(const Eigen::MatrixXd& W,
                                                    const std::vector<int>& global,
                                                    double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw ArgumentError("q must be in [0, 1]");
  if (global.empty()) throw ArgumentError("personalized_features: global set is empty");
  const Eigen::Index f = W.rows();
  const Eigen::Index l = W.cols();
  std::vector<char> in_global(static_cast<std::size_t>(f), 0);
  for (int g : global) {
    if (g < 0 || g >= f)
      throw ArgumentError("personalized_features: global index out of range");
    in_global[static_cast<std::size_t>(g)] = 1;
  }

  // Per-label magnitude each global row would have if its norm were spread
  // evenly across labels.
  std::vector<double> thresholds;
  thresholds.reserve(global.size());
  const double root_l = std::sqrt(static_cast<double>(l));
  for (int g : global) thresholds.push_back(W.row(g).norm() / root_l);

  const double needed = q * static_cast<double>(global.size());
  std::vector<std::vector<int>> result(static_cast<std::size_t>(l));
  for (Eigen::Index label = 0; label < l; ++label) {
    for (Eigen::Index j = 0; j < f; ++j) {
      if (in_global[static_cast<std::size_t>(j)]) continue;
      const double magnitude = std::abs(W(j, label));
      int beaten = 0;
      for (double t : thresholds) {
        if (t < magnitude) ++beaten;
      }
      if (static_cast<double>(beaten) > needed) {
        result[static_cast<std::size_t>(label)].push_back(static_cast<int>(j));
      }
    }
  }
  return result;
}

FeatureSelection select_features(const Eigen::MatrixXd& W, const HyperParams& params) {
  FeatureSelection sel;
  sel.q = params.q;
  sel.global_fraction = params.global_fraction;
  sel.row_norms = W.rowwise().norm();
  sel.global = rank_global(W, params.global_fraction);
  sel.personalized = personalized_features(W, sel.global, params.q);
  sel.complete.reserve(sel.personalized.size());
  for (const std::vector<int>& pf : sel.personalized) {
    std::vector<int> complete = sel.global;
    complete.insert(complete.end(), pf.begin(), pf.end());
    sel.complete.push_back(std::move(complete));
  }
  return sel;
}

SelectionStats selection_stats(const FeatureSelection& selection,
                               Eigen::Index feature_count) {
  SelectionStats stats;
  stats.global_size = static_cast<int>(selection.global.size());
  if (!selection.personalized.empty()) {
    double total = 0.0;
    for (const auto& pf : selection.personalized)
      total += static_cast<double>(pf.size());
    stats.mean_personalized = total / static_cast<double>(selection.personalized.size());
  }
  if (feature_count > 0)
    stats.personalized_proportion =
        stats.mean_personalized / static_cast<double>(feature_count);
  return stats;
}

}  // namespace gpmfs

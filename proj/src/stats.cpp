#include "gpmfs/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "gpmfs/errors.hpp"

namespace gpmfs {

RankTable make_rank_table(const Eigen::MatrixXd& scores, bool higher_is_better) {
  const Eigen::Index k = scores.rows();
  const Eigen::Index c = scores.cols();
  if (k < 1) throw ArgumentError("make_rank_table: need at least one dataset row");
  if (c < 2) throw ArgumentError("make_rank_table: need at least two methods");

  RankTable table;
  table.higher_is_better = higher_is_better;
  table.ranks.resize(k, c);
  std::vector<int> order(static_cast<std::size_t>(c));
  for (Eigen::Index row = 0; row < k; ++row) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      double sa = scores(row, a), sb = scores(row, b);
      if (sa != sb) return higher_is_better ? sa > sb : sa < sb;
      return a < b;
    });
    // Walk runs of equal scores and give each member the run's mean position.
    std::size_t i = 0;
    while (i < order.size()) {
      std::size_t j = i;
      while (j + 1 < order.size() &&
             scores(row, order[j + 1]) == scores(row, order[i])) {
        ++j;
      }
      double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
      for (std::size_t m = i; m <= j; ++m) table.ranks(row, order[m]) = mean_rank;
      i = j + 1;
    }
  }
  return table;
}

Eigen::VectorXd average_ranks(const RankTable& table) {
  if (table.ranks.rows() < 1 || table.ranks.cols() < 2)
    throw ArgumentError("average_ranks: rank table is too small");
  return table.ranks.colwise().mean();
}

FriedmanResult friedman_statistic(const RankTable& table) {
  const double k = static_cast<double>(table.ranks.rows());  // datasets
  const double c = static_cast<double>(table.ranks.cols());  // methods
  if (k < 1 || c < 2) throw ArgumentError("friedman_statistic: rank table is too small");

  // R_j = mean rank of method j; chi^2 = 12k/(c(c+1)) [sum_j R_j^2 - c(c+1)^2/4].
  Eigen::VectorXd mean_ranks = table.ranks.colwise().mean();
  double sum_sq = mean_ranks.squaredNorm();
  double chi = 12.0 * k / (c * (c + 1.0)) * (sum_sq - c * (c + 1.0) * (c + 1.0) / 4.0);

  FriedmanResult result;
  result.chi_squared = chi;
  double denom = k * (c - 1.0) - chi;
  if (denom > 0.0) {
    result.f_statistic = (k - 1.0) * chi / denom;
    result.degenerate = false;
  } else {
    result.f_statistic = std::numeric_limits<double>::infinity();
    result.degenerate = true;
  }
  return result;
}

double bonferroni_dunn_cd(double q_alpha, int methods, int datasets) {
  if (!(q_alpha >= 0.0)) throw ArgumentError("q_alpha must be nonnegative");
  if (methods < 2) throw ArgumentError("bonferroni_dunn_cd: need at least two methods");
  if (datasets < 1) throw ArgumentError("bonferroni_dunn_cd: need at least one dataset");
  const double c = static_cast<double>(methods);
  const double k = static_cast<double>(datasets);
  return q_alpha * std::sqrt(c * (c + 1.0) / (6.0 * k));
}

}  // namespace gpmfs

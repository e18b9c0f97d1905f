#pragma once

#include <Eigen/Dense>

namespace gpmfs {

/// Per-dataset method ranks (1 = best) with ties averaged.
struct RankTable {
  Eigen::MatrixXd ranks;  // datasets x methods
  bool higher_is_better = true;
};

/// scores is datasets x methods.
RankTable make_rank_table(const Eigen::MatrixXd& scores, bool higher_is_better);

/// Column means of the rank table.
Eigen::VectorXd average_ranks(const RankTable& table);

struct FriedmanResult {
  double chi_squared = 0.0;
  double f_statistic = 0.0;
  bool degenerate = false;  // chi-squared reached its ceiling k(c-1)
};

/// Friedman chi-squared plus its F-distributed refinement. When the
/// refinement's denominator is not positive the F statistic is reported as
/// +infinity and flagged degenerate.
FriedmanResult friedman_statistic(const RankTable& table);

/// Critical difference q_alpha * sqrt(c (c + 1) / (6 k)) for c methods over
/// k datasets.
double bonferroni_dunn_cd(double q_alpha, int methods, int datasets);

}  // namespace gpmfs

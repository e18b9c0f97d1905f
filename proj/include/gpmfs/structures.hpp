#pragma once

#include <Eigen/Dense>

namespace gpmfs {

/// Absolute Pearson correlation between feature columns. Pairs involving a
/// zero-variance column are 0, including that column's diagonal entry.
struct PearsonMatrix {
  Eigen::MatrixXd values;  // F x F, entries in [0, 1]
};

PearsonMatrix pearson_matrix(const Eigen::MatrixXd& features);

/// Symmetric kNN affinity over instances with Gaussian weights
/// exp(-d^2 / sigma^2); i~j are connected when either is among the other's k
/// nearest neighbors (distance ties broken by lower row index). sigma holds
/// the width actually used (auto = sqrt of the mean squared distance over
/// connected pairs, or 1 when that mean is 0).
struct AffinityGraph {
  Eigen::MatrixXd weights;  // n x n, zero diagonal
  int k = 0;
  double sigma = 0.0;
};

/// sigma <= 0 requests the automatic width.
AffinityGraph knn_affinity(const Eigen::MatrixXd& features, int k, double sigma);

/// Unnormalized graph Laplacian diag(row sums) - W.
struct LaplacianMatrix {
  Eigen::MatrixXd values;  // n x n, symmetric PSD
};

LaplacianMatrix laplacian(const AffinityGraph& graph);

}  // namespace gpmfs

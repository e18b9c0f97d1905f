#include "gpmfs/structures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "gpmfs/errors.hpp"

namespace gpmfs {

PearsonMatrix pearson_matrix(const Eigen::MatrixXd& features) {
  const Eigen::Index n = features.rows();
  const Eigen::Index f = features.cols();
  if (n < 2) throw ArgumentError("pearson_matrix: need at least 2 instances");
  if (f < 1) throw ArgumentError("pearson_matrix: need at least 1 feature");

  Eigen::MatrixXd centered = features.rowwise() - features.colwise().mean();
  Eigen::VectorXd norms = centered.colwise().norm();
  Eigen::MatrixXd cross = centered.transpose() * centered;

  PearsonMatrix result;
  result.values.resize(f, f);
  for (Eigen::Index i = 0; i < f; ++i) {
    for (Eigen::Index j = 0; j < f; ++j) {
      if (norms(i) == 0.0 || norms(j) == 0.0) {
        result.values(i, j) = 0.0;  // zero-variance columns correlate with nothing
      } else {
        double r = std::abs(cross(i, j)) / (norms(i) * norms(j));
        result.values(i, j) = std::min(r, 1.0);
      }
    }
  }
  return result;
}

AffinityGraph knn_affinity(const Eigen::MatrixXd& features, int k, double sigma) {
  const Eigen::Index n = features.rows();
  if (n < 2) throw ArgumentError("knn_affinity: need at least 2 instances");
  if (k < 1 || k >= n)
    throw ArgumentError("knn_affinity: k must satisfy 1 <= k < instance count");

  // Squared pairwise distances via the Gram expansion, cleaned up so exact
  // zeros survive.
  Eigen::VectorXd sq = features.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = sq.replicate(1, n) + sq.transpose().replicate(n, 1) -
                       2.0 * (features * features.transpose());
  d2 = d2.cwiseMax(0.0);
  d2.diagonal().setZero();

  // connected(i,j): i is one of j's k nearest (ties to the lower row index),
  // or vice versa.
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> connected(n, n);
  connected.setConstant(false);
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n) - 1);
  for (Eigen::Index j = 0; j < n; ++j) {
    order.clear();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i != j) order.push_back(static_cast<int>(i));  // never a neighbor of itself
    }
    std::partial_sort(order.begin(), order.begin() + k, order.end(),
                      [&](int a, int b) {
                        double da = d2(a, j), db = d2(b, j);
                        if (da != db) return da < db;
                        return a < b;
                      });
    for (int m = 0; m < k; ++m) {
      int i = order[static_cast<std::size_t>(m)];
      connected(i, j) = true;
      connected(j, i) = true;
    }
  }

  double sigma_sq;
  if (sigma > 0.0) {
    sigma_sq = sigma * sigma;
  } else {
    double total = 0.0;
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        if (connected(i, j)) {
          total += d2(i, j);
          ++count;
        }
      }
    }
    sigma_sq = (count > 0 && total > 0.0) ? total / static_cast<double>(count) : 1.0;
  }

  AffinityGraph graph;
  graph.k = k;
  graph.sigma = std::sqrt(sigma_sq);
  graph.weights = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && connected(i, j)) {
        graph.weights(i, j) = std::exp(-d2(i, j) / sigma_sq);
      }
    }
  }
  return graph;
}

LaplacianMatrix laplacian(const AffinityGraph& graph) {
  LaplacianMatrix lap;
  lap.values = -graph.weights;
  lap.values.diagonal() += graph.weights.rowwise().sum();
  return lap;
}

}  // namespace gpmfs

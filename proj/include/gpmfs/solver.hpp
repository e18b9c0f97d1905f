#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "gpmfs/dataset.hpp"
#include "gpmfs/structures.hpp"

namespace gpmfs {

/// Everything the pipeline can be tuned with. sigma <= 0 means "choose the
/// graph width automatically".
struct HyperParams {
  double alpha = 1.0;            // label-relaxation fit weight
  double beta = 1.0;             // manifold-regularization weight
  double gamma = 1.0;            // feature-redundancy penalty weight
  double lambda = 1.0;           // row-sparsity weight
  double p = 0.8;                // row-sparsity exponent, in (0, 2]
  double q = 0.5;                // personalization strictness, in [0, 1]
  double global_fraction = 0.2;  // share of features in the global set, in (0, 1]
  int graph_k = 5;               // affinity-graph neighbor count
  double sigma = 0.0;            // graph width; <= 0 selects it automatically
  int max_iter = 20;
  double rel_tol = 1e-5;         // relative objective-change stop threshold
  double epsilon_norm = 1e-6;    // row-norm floor in the reweighting step
  double ridge_jitter = 1e-8;    // diagonal added when a system is not SPD

  /// Throws ArgumentError naming the offending field.
  void validate() const;
};

/// Solver variables. W maps features to the relaxed label space, V is the
/// relaxed label matrix, U the nonnegative relaxation magnitudes, and B the
/// +1/-1 relaxation directions derived once from the labels.
struct SolverState {
  Eigen::MatrixXd W;          // F x L
  Eigen::MatrixXd V;          // n x L
  Eigen::MatrixXd U;          // n x L, nonnegative
  Eigen::MatrixXd B;          // n x L, +1 where the label is 1, else -1
  std::vector<double> trace;  // objective after each completed iteration
};

/// V = Y, U = 0, B from Y, and W from the jittered least-squares fit of the
/// labels.
SolverState init_state(const Dataset& dataset, const HyperParams& params);

/// Diagonal reweighting terms for the redundancy penalty (first) and the
/// row-sparsity penalty (second), from the previous iterate's row norms
/// floored at epsilon_norm.
std::pair<Eigen::VectorXd, Eigen::VectorXd> reweight_diagonals(
    const Eigen::MatrixXd& W, const PearsonMatrix& correlation, double p,
    double epsilon_norm);

/// Solves (X'X + gamma diag(M) + lambda diag(N)) W = X'V, where M and N come
/// from W_prev. The jitter is added only if the plain system fails its
/// Cholesky factorization.
Eigen::MatrixXd update_weights(const Eigen::MatrixXd& X, const Eigen::MatrixXd& V,
                               const PearsonMatrix& correlation,
                               const HyperParams& params,
                               const Eigen::MatrixXd& W_prev, int iteration);

/// Solves ((1 + alpha) I + beta L) V = X W + alpha (Y + B .* U).
Eigen::MatrixXd update_pseudo_labels(const Eigen::MatrixXd& X,
                                     const Eigen::MatrixXd& W,
                                     const Eigen::MatrixXd& Y,
                                     const Eigen::MatrixXd& B,
                                     const Eigen::MatrixXd& U,
                                     const LaplacianMatrix& lap, double alpha,
                                     double beta);

/// U = max(B .* (V - Y), 0), elementwise.
Eigen::MatrixXd update_relaxation(const Eigen::MatrixXd& V, const Eigen::MatrixXd& Y,
                                  const Eigen::MatrixXd& B);

/// Full objective: regression fit + relaxed-label fit + manifold term +
/// redundancy penalty + row-sparsity penalty.
double objective_value(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                       const SolverState& state, const LaplacianMatrix& lap,
                       const PearsonMatrix& correlation, const HyperParams& params);

/// Alternating optimization on a standardized dataset. Stops after max_iter
/// iterations or when the relative objective change drops below rel_tol.
/// trace holds one objective value per completed iteration.
SolverState solve(const Dataset& dataset, const PearsonMatrix& correlation,
                  const LaplacianMatrix& lap, const HyperParams& params);

}  // namespace gpmfs

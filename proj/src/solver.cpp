#include "gpmfs/solver.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <string>

#include "gpmfs/errors.hpp"

namespace gpmfs {
namespace {

void check_positive(double v, const char* name) {
  if (!(v > 0.0)) throw ArgumentError(std::string(name) + " must be positive");
}

void check_nonnegative(double v, const char* name) {
  if (!(v >= 0.0)) throw ArgumentError(std::string(name) + " must be nonnegative");
}

// Cholesky solve with a one-shot jitter retry; `what` names the system in the
// error message.
Eigen::MatrixXd solve_spd(const Eigen::MatrixXd& A, const Eigen::MatrixXd& rhs,
                          double jitter, int iteration, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() == Eigen::Success) return llt.solve(rhs);
  if (jitter > 0.0) {
    Eigen::MatrixXd jittered = A;
    jittered.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> retry(jittered);
    if (retry.info() == Eigen::Success) return retry.solve(rhs);
  }
  throw NumericError(std::string(what) + " system is not positive definite", iteration);
}

}  // namespace

void HyperParams::validate() const {
  check_nonnegative(alpha, "alpha");
  check_nonnegative(beta, "beta");
  check_nonnegative(gamma, "gamma");
  check_nonnegative(lambda, "lambda");
  if (!(p > 0.0 && p <= 2.0)) throw ArgumentError("p must be in (0, 2]");
  if (!(q >= 0.0 && q <= 1.0)) throw ArgumentError("q must be in [0, 1]");
  if (!(global_fraction > 0.0 && global_fraction <= 1.0))
    throw ArgumentError("global_fraction must be in (0, 1]");
  if (graph_k < 1) throw ArgumentError("graph_k must be at least 1");
  // sigma <= 0 means auto, any positive value is taken literally
  if (max_iter < 1) throw ArgumentError("max_iter must be at least 1");
  check_nonnegative(rel_tol, "rel_tol");
  check_positive(epsilon_norm, "epsilon_norm");
  check_nonnegative(ridge_jitter, "ridge_jitter");
}

SolverState init_state(const Dataset& dataset, const HyperParams& params) {
  params.validate();
  const Eigen::MatrixXd& X = dataset.features;
  const Eigen::MatrixXd& Y = dataset.labels;

  SolverState state;
  state.V = Y;
  state.U = Eigen::MatrixXd::Zero(Y.rows(), Y.cols());
  state.B = (Y.array() == 1.0).select(Eigen::MatrixXd::Constant(Y.rows(), Y.cols(), 1.0),
                                      Eigen::MatrixXd::Constant(Y.rows(), Y.cols(), -1.0));

  Eigen::MatrixXd gram = X.transpose() * X;
  gram.diagonal().array() += params.ridge_jitter;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() == Eigen::Success) {
    state.W = llt.solve(X.transpose() * Y);
  } else {
    // Normal equations are consistent even when X'X is singular; fall back to
    // a pivoted factorization rather than failing on jitter == 0.
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success)
      throw NumericError("initial weight system could not be factorized", 0);
    state.W = ldlt.solve(X.transpose() * Y);
  }
  return state;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> reweight_diagonals(
    const Eigen::MatrixXd& W, const PearsonMatrix& correlation, double p,
    double epsilon_norm) {
  const Eigen::Index f = W.rows();
  if (correlation.values.rows() != f || correlation.values.cols() != f)
    throw ArgumentError("reweight_diagonals: correlation size disagrees with W rows");
  if (!(epsilon_norm > 0.0)) throw ArgumentError("epsilon_norm must be positive");
  if (!(p > 0.0 && p <= 2.0)) throw ArgumentError("p must be in (0, 2]");

  Eigen::VectorXd r = W.rowwise().norm().cwiseMax(epsilon_norm);
  Eigen::VectorXd m(f);
  Eigen::VectorXd n(f);
  for (Eigen::Index i = 0; i < f; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < f; ++j) {
      if (j != i) acc += r(j) * correlation.values(i, j);
    }
    m(i) = acc / (2.0 * r(i));
    n(i) = p / (2.0 * std::pow(r(i), 2.0 - p));
  }
  return {m, n};
}

Eigen::MatrixXd update_weights(const Eigen::MatrixXd& X, const Eigen::MatrixXd& V,
                               const PearsonMatrix& correlation,
                               const HyperParams& params,
                               const Eigen::MatrixXd& W_prev, int iteration) {
  auto [m, n] = reweight_diagonals(W_prev, correlation, params.p, params.epsilon_norm);
  Eigen::MatrixXd A = X.transpose() * X;
  A.diagonal() += params.gamma * m + params.lambda * n;
  return solve_spd(A, X.transpose() * V, params.ridge_jitter, iteration, "weight");
}

Eigen::MatrixXd update_pseudo_labels(const Eigen::MatrixXd& X,
                                     const Eigen::MatrixXd& W,
                                     const Eigen::MatrixXd& Y,
                                     const Eigen::MatrixXd& B,
                                     const Eigen::MatrixXd& U,
                                     const LaplacianMatrix& lap, double alpha,
                                     double beta) {
  Eigen::MatrixXd A = beta * lap.values;
  A.diagonal().array() += 1.0 + alpha;
  Eigen::MatrixXd rhs = X * W + alpha * (Y + B.cwiseProduct(U));
  // (1 + alpha) I + beta L is SPD by construction, so no jitter path here.
  return solve_spd(A, rhs, 0.0, 0, "pseudo-label");
}

Eigen::MatrixXd update_relaxation(const Eigen::MatrixXd& V, const Eigen::MatrixXd& Y,
                                  const Eigen::MatrixXd& B) {
  return B.cwiseProduct(V - Y).cwiseMax(0.0);
}

double objective_value(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                       const SolverState& state, const LaplacianMatrix& lap,
                       const PearsonMatrix& correlation, const HyperParams& params) {
  const Eigen::MatrixXd& W = state.W;
  const Eigen::MatrixXd& V = state.V;
  double fit = (X * W - V).squaredNorm();
  double relax =
      params.alpha * (V - (Y + state.B.cwiseProduct(state.U))).squaredNorm();
  double manifold = params.beta * (V.cwiseProduct(lap.values * V)).sum();

  Eigen::VectorXd r = W.rowwise().norm();
  // Redundancy penalty over ordered pairs i != j: r' P r minus the diagonal.
  double quad = r.dot(correlation.values * r);
  double diag = (r.array().square() * correlation.values.diagonal().array()).sum();
  double redundancy = params.gamma * (quad - diag);

  double sparsity = params.lambda * r.array().pow(params.p).sum();
  return fit + relax + manifold + redundancy + sparsity;
}

SolverState solve(const Dataset& dataset, const PearsonMatrix& correlation,
                  const LaplacianMatrix& lap, const HyperParams& params) {
  params.validate();
  const Eigen::MatrixXd& X = dataset.features;
  const Eigen::MatrixXd& Y = dataset.labels;
  if (correlation.values.rows() != X.cols())
    throw ArgumentError("solve: correlation size disagrees with feature count");
  if (lap.values.rows() != X.rows())
    throw ArgumentError("solve: Laplacian size disagrees with instance count");

  SolverState state = init_state(dataset, params);

  const Eigen::MatrixXd gram = X.transpose() * X;
  // The pseudo-label system never changes across iterations; factor it once.
  Eigen::MatrixXd vsys = params.beta * lap.values;
  vsys.diagonal().array() += 1.0 + params.alpha;
  Eigen::LLT<Eigen::MatrixXd> vllt(vsys);
  if (vllt.info() != Eigen::Success)
    throw NumericError("pseudo-label system is not positive definite", 0);

  double previous = objective_value(X, Y, state, lap, correlation, params);
  for (int iter = 1; iter <= params.max_iter; ++iter) {
    auto [m, n] = reweight_diagonals(state.W, correlation, params.p, params.epsilon_norm);
    Eigen::MatrixXd A = gram;
    A.diagonal() += params.gamma * m + params.lambda * n;
    state.W = solve_spd(A, X.transpose() * state.V, params.ridge_jitter, iter, "weight");

    state.V = vllt.solve(X * state.W +
                         params.alpha * (Y + state.B.cwiseProduct(state.U)));
    state.U = update_relaxation(state.V, Y, state.B);

    double current = objective_value(X, Y, state, lap, correlation, params);
    if (!std::isfinite(current))
      throw NumericError("objective is not finite", iter);
    state.trace.push_back(current);

    double scale = std::max(std::abs(previous), 1e-12);
    if (std::abs(previous - current) / scale < params.rel_tol) break;
    previous = current;
  }
  return state;
}

}  // namespace gpmfs

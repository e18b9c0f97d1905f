#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gpmfs/solver.hpp"

namespace gpmfs {

struct FeatureSelection {
  std::vector<int> global;                        // ranked, best first
  std::vector<std::vector<int>> personalized;     // per label, ascending indices
  std::vector<std::vector<int>> complete;         // per label: global order + personalized
  Eigen::VectorXd row_norms;                      // l2 norm of each weight row
  double q = 0.0;
  double global_fraction = 0.0;
};

/// Indices of the round(fraction * F) largest weight rows by l2 norm (at
/// least one), best first; ties go to the lower index.
std::vector<int> rank_global(const Eigen::MatrixXd& W, double fraction);

/// Label-specific features: j (outside the global set) belongs to label i's
/// personalized set when strictly more than q * |global| of the global rows'
/// per-label magnitudes ||w_g|| / sqrt(L) fall strictly below |W(j, i)|.
std::vector<std::vector<int>> personalized_features(const Eigen::MatrixXd& W,
                                                    const std::vector<int>& global,
                                                    double q);

/// Bundles global, personalized, and complete (global-then-personalized)
/// sets for a solved weight matrix.
FeatureSelection select_features(const Eigen::MatrixXd& W, const HyperParams& params);

struct SelectionStats {
  int global_size = 0;
  double mean_personalized = 0.0;       // |personalized| averaged over labels
  double personalized_proportion = 0.0; // mean_personalized / F
};

SelectionStats selection_stats(const FeatureSelection& selection,
                               Eigen::Index feature_count);

}  // namespace gpmfs

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdlib>
#include <string>

#include "gpmfs/dataset.hpp"
#include "gpmfs/rng.hpp"

#ifndef GPMFS_DATA_DIR
#define GPMFS_DATA_DIR "data"
#endif
#ifndef GPMFS_CLI_PATH
#define GPMFS_CLI_PATH "gpmfs"
#endif

namespace testutil {

inline std::string data_dir() {
  const char* env = std::getenv("GPMFS_DATA_DIR");
  return (env != nullptr && env[0] != '\0') ? env : GPMFS_DATA_DIR;
}

inline std::string cli_path() {
  const char* env = std::getenv("GPMFS_CLI");
  return (env != nullptr && env[0] != '\0') ? env : GPMFS_CLI_PATH;
}

inline double normal(gpmfs::SeededRng& rng) {
  double u1 = rng.unit();
  while (u1 <= 0.0) u1 = rng.unit();
  double u2 = rng.unit();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

inline Eigen::MatrixXd random_matrix(gpmfs::SeededRng& rng, Eigen::Index rows,
                                     Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  }
  return m;
}

inline Eigen::MatrixXd random_binary(gpmfs::SeededRng& rng, Eigen::Index rows,
                                     Eigen::Index cols, double positive_rate = 0.4) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = rng.unit() < positive_rate ? 1.0 : 0.0;
    }
  }
  return m;
}

inline gpmfs::Dataset random_dataset(gpmfs::SeededRng& rng, Eigen::Index n,
                                     Eigen::Index f, Eigen::Index l,
                                     double positive_rate = 0.4) {
  gpmfs::Dataset ds;
  ds.features = random_matrix(rng, n, f);
  ds.labels = random_binary(rng, n, l, positive_rate);
  for (Eigen::Index i = 0; i < f; ++i)
    ds.feature_names.push_back("feature_" + std::to_string(i + 1));
  for (Eigen::Index i = 0; i < l; ++i)
    ds.label_names.push_back("label_" + std::to_string(i + 1));
  ds.source = "synthetic";
  return ds;
}

}  // namespace testutil

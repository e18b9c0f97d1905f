#include <cmath>

#include "doctest.h"
#include "gpmfs/errors.hpp"
#include "gpmfs/structures.hpp"
#include "helpers.hpp"

using namespace gpmfs;

TEST_CASE("pearson matrix matches a hand-computed example") {
  // three features over four instances: col1 = col0 shifted/scaled (r = 1),
  // col2 correlates with col0 at exactly -1/sqrt(2)
  Eigen::MatrixXd x(4, 3);
  x << 1, 2, 4,
       2, 4, 1,
       3, 6, 3,
       4, 8, 0;
  Eigen::MatrixXd p = pearson_matrix(x).values;
  REQUIRE(p.rows() == 3);
  CHECK(p(0, 0) == doctest::Approx(1.0));
  CHECK(p(0, 1) == doctest::Approx(1.0));
  CHECK(p(1, 0) == p(0, 1));
  CHECK(p(0, 2) == doctest::Approx(std::sqrt(0.5)));  // |r| of -1/sqrt(2)
  CHECK((p - p.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("pearson matrix zeroes constant features") {
  Eigen::MatrixXd x(3, 2);
  x << 1, 7, 2, 7, 3, 7;
  Eigen::MatrixXd p = pearson_matrix(x).values;
  CHECK(p(0, 0) == doctest::Approx(1.0));  // general formula, rounding allowed
  CHECK(p(1, 1) == 0.0);  // constant feature: whole row/col is zero
  CHECK(p(0, 1) == 0.0);
  CHECK(p(1, 0) == 0.0);
  CHECK_THROWS_AS(pearson_matrix(Eigen::MatrixXd::Zero(1, 2)), ArgumentError);
}

TEST_CASE("pearson entries stay within [0,1] on random data") {
  SeededRng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd x = testutil::random_matrix(rng, 8, 5);
    Eigen::MatrixXd p = pearson_matrix(x).values;
    CHECK(p.minCoeff() >= 0.0);
    CHECK(p.maxCoeff() <= 1.0);
    CHECK((p - p.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("knn affinity on a hand-built line graph") {
  // four points on a line; k = 1 links each to its nearest neighbour
  Eigen::MatrixXd x(4, 1);
  x << 0.0, 1.0, 3.0, 6.0;
  AffinityGraph g = knn_affinity(x, 1, 0.0);
  // nearest: 0->1 (d2=1), 1->0 (d2=1), 2->1 (d2=4), 3->2 (d2=9)
  // union edges: (0,1), (1,2), (2,3); sigma^2 = mean(1,4,9) = 14/3
  double s2 = 14.0 / 3.0;
  CHECK(g.sigma == doctest::Approx(std::sqrt(s2)));
  CHECK(g.weights(0, 1) == doctest::Approx(std::exp(-1.0 / s2)));
  CHECK(g.weights(1, 2) == doctest::Approx(std::exp(-4.0 / s2)));
  CHECK(g.weights(2, 3) == doctest::Approx(std::exp(-9.0 / s2)));
  CHECK(g.weights(0, 2) == 0.0);
  CHECK(g.weights(0, 3) == 0.0);
  CHECK((g.weights - g.weights.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(g.weights.diagonal().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("knn affinity breaks distance ties by lower index") {
  // point 0 is equidistant from 1 and 2; with k = 1 it must pick index 1
  Eigen::MatrixXd x(3, 2);
  x << 0, 0,
       1, 0,
       -1, 0;
  AffinityGraph g = knn_affinity(x, 1, 1.0);
  CHECK(g.weights(0, 1) > 0.0);
  // edge (0,2) exists only because 2's own nearest neighbour is 0
  CHECK(g.weights(2, 0) > 0.0);
  CHECK(g.weights(1, 2) == 0.0);
}

TEST_CASE("explicit sigma overrides the automatic bandwidth") {
  Eigen::MatrixXd x(3, 1);
  x << 0.0, 1.0, 5.0;
  AffinityGraph g = knn_affinity(x, 1, 2.0);
  CHECK(g.sigma == 2.0);
  CHECK(g.weights(0, 1) == doctest::Approx(std::exp(-1.0 / 4.0)));
}

TEST_CASE("coincident points fall back to unit bandwidth") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 2);
  AffinityGraph g = knn_affinity(x, 1, 0.0);
  CHECK(g.sigma == 1.0);
  CHECK(g.weights(0, 1) == doctest::Approx(1.0));  // exp(0)
}

TEST_CASE("knn affinity validates its arguments") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(4, 2);
  CHECK_THROWS_AS(knn_affinity(x, 0, 0.0), ArgumentError);
  CHECK_THROWS_AS(knn_affinity(x, 4, 0.0), ArgumentError);  // k must be < n
  CHECK_THROWS_AS(knn_affinity(Eigen::MatrixXd::Zero(1, 2), 1, 0.0), ArgumentError);
}

TEST_CASE("laplacian rows sum to zero and the quadratic form is nonnegative") {
  SeededRng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd x = testutil::random_matrix(rng, 7, 3);
    AffinityGraph g = knn_affinity(x, 2, 0.0);
    Eigen::MatrixXd lap = laplacian(g).values;
    CHECK(lap.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
    CHECK((lap - lap.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
    Eigen::VectorXd v = testutil::random_matrix(rng, 7, 1);
    CHECK(v.dot(lap * v) >= -1e-12);
  }
}

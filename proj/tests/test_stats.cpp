#include <cmath>
#include <limits>

#include "doctest.h"
#include "gpmfs/errors.hpp"
#include "gpmfs/stats.hpp"
#include "helpers.hpp"

using namespace gpmfs;

TEST_CASE("rank table averages ties and respects the direction") {
  Eigen::MatrixXd scores(3, 3);
  scores << 0.9, 0.8, 0.7,
            0.5, 0.5, 0.1,
            0.2, 0.6, 0.6;

  RankTable high = make_rank_table(scores, true);
  CHECK(high.ranks(0, 0) == 1.0);
  CHECK(high.ranks(0, 1) == 2.0);
  CHECK(high.ranks(0, 2) == 3.0);
  // row 1: methods 0 and 1 tie for ranks 1-2
  CHECK(high.ranks(1, 0) == 1.5);
  CHECK(high.ranks(1, 1) == 1.5);
  CHECK(high.ranks(1, 2) == 3.0);
  // row 2: methods 1 and 2 tie for ranks 1-2, method 0 is last
  CHECK(high.ranks(2, 0) == 3.0);
  CHECK(high.ranks(2, 1) == 1.5);
  CHECK(high.ranks(2, 2) == 1.5);

  RankTable low = make_rank_table(scores, false);
  CHECK(low.ranks(0, 0) == 3.0);
  CHECK(low.ranks(0, 2) == 1.0);
  CHECK(low.ranks(1, 0) == 2.5);
  CHECK(low.ranks(1, 2) == 1.0);

  Eigen::VectorXd avg = average_ranks(high);
  CHECK(avg(0) == doctest::Approx((1.0 + 1.5 + 3.0) / 3.0));
  CHECK(avg(1) == doctest::Approx((2.0 + 1.5 + 1.5) / 3.0));

  CHECK_THROWS_AS(make_rank_table(Eigen::MatrixXd::Zero(0, 3), true), ArgumentError);
  CHECK_THROWS_AS(make_rank_table(Eigen::MatrixXd::Zero(3, 1), true), ArgumentError);
}

TEST_CASE("every row of a rank table sums to c(c+1)/2") {
  SeededRng rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd scores = testutil::random_matrix(rng, 6, 5);
    if (trial % 3 == 0) scores(0, 1) = scores(0, 2);  // inject some ties
    RankTable table = make_rank_table(scores, trial % 2 == 0);
    for (Eigen::Index i = 0; i < table.ranks.rows(); ++i) {
      CHECK(table.ranks.row(i).sum() == doctest::Approx(15.0));  // 5*6/2
    }
  }
}

TEST_CASE("friedman statistic matches a hand-worked table") {
  // three methods, three datasets, no ties; method 0 always best
  Eigen::MatrixXd scores(3, 3);
  scores << 0.9, 0.8, 0.7,
            0.9, 0.8, 0.7,
            0.8, 0.9, 0.7;
  RankTable table = make_rank_table(scores, true);
  FriedmanResult result = friedman_statistic(table);
  // average ranks: (1+1+2)/3, (2+2+1)/3, 3 -> 4/3, 5/3, 3
  // chi2 = 12*3/(3*4) * (16/9 + 25/9 + 9 - 3*4*4/4) = 3 * (122/9 - 12) = 14/3
  CHECK(result.chi_squared == doctest::Approx(14.0 / 3.0).epsilon(1e-12));
  // F = (k-1) chi2 / (k(c-1) - chi2) = 2*(14/3) / (6 - 14/3) = 7
  CHECK(result.f_statistic == doctest::Approx(7.0).epsilon(1e-12));
  CHECK_FALSE(result.degenerate);
}

TEST_CASE("identical ranks across all datasets make the refinement degenerate") {
  // chi2 hits its ceiling k(c-1) when the same method order repeats everywhere
  Eigen::MatrixXd scores(4, 3);
  for (int i = 0; i < 4; ++i) {
    scores(i, 0) = 0.9;
    scores(i, 1) = 0.8;
    scores(i, 2) = 0.7;
  }
  FriedmanResult result = friedman_statistic(make_rank_table(scores, true));
  CHECK(result.chi_squared == doctest::Approx(8.0));  // k(c-1) = 4*2
  CHECK(result.degenerate);
  CHECK(std::isinf(result.f_statistic));
}

TEST_CASE("constant scores produce a zero statistic") {
  Eigen::MatrixXd scores = Eigen::MatrixXd::Constant(5, 4, 0.5);
  FriedmanResult result = friedman_statistic(make_rank_table(scores, true));
  CHECK(result.chi_squared == doctest::Approx(0.0));
  CHECK_FALSE(result.degenerate);
}

TEST_CASE("critical difference reproduces its closed form") {
  CHECK(bonferroni_dunn_cd(2.394, 7, 10) ==
        doctest::Approx(2.394 * std::sqrt(7.0 * 8.0 / 60.0)).epsilon(1e-15));
  CHECK(bonferroni_dunn_cd(0.0, 5, 3) == 0.0);
  CHECK_THROWS_AS(bonferroni_dunn_cd(-1.0, 5, 3), ArgumentError);
  CHECK_THROWS_AS(bonferroni_dunn_cd(2.0, 1, 3), ArgumentError);
  CHECK_THROWS_AS(bonferroni_dunn_cd(2.0, 5, 0), ArgumentError);
}

TEST_CASE("friedman agrees with a direct transcription on random tables") {
  SeededRng rng(88);
  for (int trial = 0; trial < 25; ++trial) {
    Eigen::MatrixXd scores = testutil::random_matrix(rng, 8, 5);
    RankTable table = make_rank_table(scores, true);
    const double k = 8.0, c = 5.0;
    Eigen::VectorXd avg = average_ranks(table);
    double sum_sq = avg.squaredNorm() * k * k;  // sum over columns of R_j^2
    double chi = 12.0 / (k * c * (c + 1.0)) * (sum_sq - k * k * c * (c + 1.0) * (c + 1.0) / 4.0);
    FriedmanResult result = friedman_statistic(table);
    CHECK(result.chi_squared == doctest::Approx(chi).epsilon(1e-9));
    if (!result.degenerate) {
      double f = (k - 1.0) * chi / (k * (c - 1.0) - chi);
      CHECK(result.f_statistic == doctest::Approx(f).epsilon(1e-9));
    }
  }
}

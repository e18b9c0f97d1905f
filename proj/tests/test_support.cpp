#include <atomic>
#include <numeric>
#include <set>
#include <vector>

#include "doctest.h"
#include "gpmfs/concurrency.hpp"
#include "gpmfs/errors.hpp"
#include "gpmfs/rng.hpp"

using namespace gpmfs;

TEST_CASE("seeded rng is reproducible and seed-sensitive") {
  SeededRng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    std::uint64_t v = a.next();
    CHECK(v == b.next());
  }
  bool differs = false;
  SeededRng a2(42);
  for (int i = 0; i < 100; ++i) differs |= a2.next() != c.next();
  CHECK(differs);
}

TEST_CASE("bounded draws stay in range") {
  SeededRng rng(7);
  for (int i = 0; i < 1000; ++i) {
    CHECK(rng.below(10) < 10);
  }
  CHECK(rng.below(1) == 0);
  CHECK_THROWS_AS(rng.below(0), ArgumentError);
}

TEST_CASE("unit draws cover [0, 1)") {
  SeededRng rng(11);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 5000; ++i) {
    double u = rng.unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);
}

TEST_CASE("shuffle permutes and is seed-deterministic") {
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  std::vector<int> w = v;
  SeededRng r1(5), r2(5);
  shuffle(v, r1);
  shuffle(w, r2);
  CHECK(v == w);
  std::set<int> seen(v.begin(), v.end());
  CHECK(seen.size() == 50);

  std::vector<int> x(50);
  std::iota(x.begin(), x.end(), 0);
  SeededRng r3(6);
  shuffle(x, r3);
  CHECK(x != v);
}

TEST_CASE("parallel loop touches every index exactly once") {
  for (int workers : {1, 2, 7}) {
    std::vector<std::atomic<int>> hits(100);
    for (auto& h : hits) h = 0;
    parallel_for_indexed(100, workers, [&](int i) { hits[static_cast<std::size_t>(i)]++; });
    for (auto& h : hits) CHECK(h == 1);
  }
  parallel_for_indexed(0, 4, [](int) { FAIL("must not be called"); });
}

TEST_CASE("parallel loop rethrows the lowest-index failure") {
  try {
    parallel_for_indexed(50, 8, [](int i) {
      if (i == 33 || i == 7 || i == 49) throw ArgumentError(std::to_string(i));
    });
    FAIL("expected ArgumentError");
  } catch (const ArgumentError& e) {
    CHECK(std::string(e.what()) == "7");
  }
}

TEST_CASE("error hierarchy keeps context fields") {
  ParseError parse("bad token", 12);
  CHECK(parse.line() == 12);
  CHECK(std::string(parse.what()).find("line 12") != std::string::npos);
  CHECK(parse.raw() == "bad token");

  NumericError numeric("diverged", 4);
  CHECK(numeric.iteration() == 4);
  CHECK(std::string(numeric.what()).find("iteration 4") != std::string::npos);
  CHECK(numeric.raw() == "diverged");

  // every domain error is catchable through the common base
  CHECK_THROWS_AS(throw ValidationError("x"), Error);
  CHECK_THROWS_AS(throw IoError("x"), Error);
  CHECK_THROWS_AS(throw ArgumentError("x"), Error);
}

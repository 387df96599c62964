#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "discround/baselines.hpp"
#include "discround/schedules.hpp"

using namespace discround;

TEST_CASE("randomized rounding keeps integral points") {
  VectorXd y(4);
  y << 1, 0, 0, 1;
  for (uint64_t seed = 0; seed < 25; ++seed)
    CHECK((randomized_round(y, seed) - y).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("randomized rounding marginal of a half") {
  VectorXd y(1);
  y << 0.5;
  double mean = 0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) mean += randomized_round(y, static_cast<uint64_t>(t))[0];
  mean /= trials;
  CHECK(std::abs(mean - 0.5) <= 0.02);
}

TEST_CASE("randomized rounding marginals across coordinates") {
  std::mt19937_64 rng(3);
  const int n = 50, trials = 4000;
  VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = static_cast<double>(rng() % 1000) / 1000.0;
  VectorXd mean = VectorXd::Zero(n);
  for (int t = 0; t < trials; ++t) mean += randomized_round(y, 1000 + static_cast<uint64_t>(t));
  mean /= trials;
  for (int i = 0; i < n; ++i) {
    double sigma = std::sqrt(std::max(y[i] * (1 - y[i]), 1e-12) / trials);
    CHECK(std::abs(mean[i] - y[i]) <= 4 * sigma + 1e-9);
  }
}

TEST_CASE("randomized rounding concentrates like a binomial") {
  // all-ones row at half weights: 4 standard deviations covers ~all trials
  const int n = 100, trials = 400;
  VectorXd y = VectorXd::Constant(n, 0.5);
  double b = y.sum();
  int bad = 0;
  for (int t = 0; t < trials; ++t) {
    VectorXd x = randomized_round(y, 777 + static_cast<uint64_t>(t));
    if (std::abs(x.sum() - b) > 4 * std::sqrt(b)) ++bad;
  }
  CHECK(bad <= trials / 100);
  VectorXd outside(1);
  outside << 1.2;
  CHECK_THROWS_AS(randomized_round(outside, 1), PreconditionError);
}

TEST_CASE("iterated rounding resolves a two-coordinate tie exactly") {
  VectorXd y(2);
  y << 0.5, 0.5;
  MatrixXd A(1, 2);
  A << 1, 1;
  VectorXd x = iterated_round(y, A);
  bool first = x[0] == 1.0 && x[1] == 0.0;
  bool second = x[0] == 0.0 && x[1] == 1.0;
  CHECK((first || second));
  CHECK(A.row(0).dot(x) == 1.0);  // held exactly, not approximately
}

TEST_CASE("iterated rounding trivial cases") {
  VectorXd y(3);
  y << 1, 0, 1;
  MatrixXd A(2, 3);
  A << 1, 2, 3, 0, 1, 0;
  CHECK((iterated_round(y, A) - y).lpNorm<Eigen::Infinity>() == 0.0);
  // no constraints: everything rounds to the nearest integer
  VectorXd z(3);
  z << 0.3, 0.5, 0.8;
  VectorXd r = iterated_round(z, MatrixXd(0, 3));
  CHECK(r[0] == 0.0);
  CHECK(r[1] == 1.0);
  CHECK(r[2] == 1.0);
}

TEST_CASE("iterated rounding keeps undropped rows exact") {
  const int n = 12;
  VectorXd y = VectorXd::Constant(n, 0.5);
  MatrixXd A(2, n);
  A.row(0) = VectorXd::Ones(n);
  A.row(1).setZero();
  for (int i = 0; i < 6; ++i) A(1, i) = 1.0;
  std::set<size_t> dropped;
  DropRule recording = [&](const MatrixXd& mat, const std::vector<size_t>& live,
                           const std::vector<char>& frac) {
    // fewest fractional entries, ties to the lowest index
    size_t pick = live.front();
    int best = -1;
    for (size_t r : live) {
      int s = 0;
      for (Eigen::Index i = 0; i < mat.cols(); ++i)
        if (mat(static_cast<Eigen::Index>(r), i) != 0.0 && frac[static_cast<size_t>(i)]) ++s;
      if (best < 0 || s < best) {
        best = s;
        pick = r;
      }
    }
    dropped.insert(pick);
    return pick;
  };
  VectorXd x = iterated_round(y, A, recording);
  for (Eigen::Index i = 0; i < n; ++i) CHECK((x[i] == 0.0 || x[i] == 1.0));
  CHECK(dropped.size() < 2);  // at least one row survives to the end
  for (size_t r = 0; r < 2; ++r) {
    if (dropped.count(r)) continue;
    double drift = std::abs(A.row(static_cast<Eigen::Index>(r)).dot(x) -
                            A.row(static_cast<Eigen::Index>(r)).dot(y));
    CHECK(drift <= 1e-8 * A.row(static_cast<Eigen::Index>(r)).norm());
  }
}

TEST_CASE("iterated rounding drift property on random instances") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 10 + static_cast<int>(rng() % 8);
    const int m = 1 + static_cast<int>(rng() % 3);
    VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = 0.05 + 0.9 * (static_cast<double>(rng() % 997) / 997.0);
    MatrixXd A(m, n);
    for (int r = 0; r < m; ++r)
      for (int i = 0; i < n; ++i) A(r, i) = (rng() % 2) ? 1.0 : 0.0;
    std::set<size_t> dropped;
    DropRule rule = [&](const MatrixXd&, const std::vector<size_t>& live,
                        const std::vector<char>&) {
      dropped.insert(live.front());
      return live.front();
    };
    VectorXd x = iterated_round(y, A, rule);
    for (Eigen::Index i = 0; i < n; ++i) CHECK((x[i] == 0.0 || x[i] == 1.0));
    for (size_t r = 0; r < static_cast<size_t>(m); ++r) {
      if (dropped.count(r)) continue;
      double drift = std::abs(A.row(static_cast<Eigen::Index>(r)).dot(x - y));
      CHECK(drift <= 1e-8 * (1 + A.row(static_cast<Eigen::Index>(r)).norm()));
    }
  }
}

TEST_CASE("violation profile arithmetic") {
  MatrixXd A(2, 3);
  A << 1, 1, 0, 0, 1, 1;
  VectorXd b(2);
  b << 1, 2;
  VectorXd x(3);
  x << 1, 1, 0;
  auto prof = violation_profile(A, b, x);
  CHECK(prof.violations[0] == doctest::Approx(1.0));
  CHECK(prof.violations[1] == doctest::Approx(1.0));
  CHECK(prof.max_violation == doctest::Approx(1.0));
  VectorXd bounds(2);
  bounds << 2, 4;
  auto scaled = violation_profile(A, b, x, &bounds);
  CHECK(scaled.ratios[0] == doctest::Approx(0.5));
  CHECK(scaled.ratios[1] == doctest::Approx(0.25));
  VectorXd bad(1);
  CHECK_THROWS_AS(violation_profile(A, bad, x), ValidationError);
}

TEST_CASE("brute force oracle on tiny systems") {
  MatrixXd A(1, 2);
  A << 1, 1;
  VectorXd b(1);
  b << 1;
  auto res = brute_force_best(A, b);
  CHECK(res.value == doctest::Approx(0.0));
  CHECK(res.witness.sum() == doctest::Approx(1.0));

  MatrixXd A1(1, 1);
  A1 << 1;
  VectorXd b1(1);
  b1 << 0.5;
  CHECK(brute_force_best(A1, b1).value == doctest::Approx(0.5));
}

TEST_CASE("brute force oracle over spanning trees of a triangle") {
  auto matroid = MatroidOracle::graphic(3, {{0, 1}, {0, 2}, {1, 2}});
  MatrixXd A(3, 3);  // degree rows: vertex by edge incidence
  A << 1, 1, 0, 1, 0, 1, 0, 1, 1;
  VectorXd b = VectorXd::Constant(3, 1.5);
  auto res = brute_force_best(A, b, matroid);
  // every spanning tree has degrees (2,1,1): max violation exactly one half
  CHECK(res.value == doctest::Approx(0.5));
  Subset s = 0;
  for (int i = 0; i < 3; ++i)
    if (res.witness[i] > 0.5) s |= Subset{1} << i;
  CHECK(subset_size(s) == 2);
  CHECK(matroid.rank(s) == 2);
}

TEST_CASE("brute force oracle rejects large instances") {
  MatrixXd A(1, 23);
  A.setOnes();
  VectorXd b(1);
  b << 1;
  CHECK_THROWS_AS(brute_force_best(A, b), PreconditionError);
}

TEST_CASE("engine violation never beats the exhaustive oracle") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 8 + static_cast<int>(rng() % 5);
    const int m = 1 + static_cast<int>(rng() % 2);
    VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = 0.1 + 0.8 * (static_cast<double>(rng() % 997) / 997.0);
    MatrixXd A(m, n);
    std::vector<LinearConstraint> cons;
    for (int r = 0; r < m; ++r) {
      for (int i = 0; i < n; ++i) A(r, i) = (rng() % 2) ? 1.0 : 0.0;
      LinearConstraint c;
      c.a = A.row(r);
      c.b = A.row(r).dot(y);
      cons.push_back(c);
    }
    VectorXd b = A * y;
    auto oracle = brute_force_best(A, b);
    auto res = round_full(y, cons, {}, RoundFullConfig{}, 100 + static_cast<uint64_t>(trial));
    double achieved = A.rows() ? (A * res.x - b).cwiseAbs().maxCoeff() : 0.0;
    CHECK(achieved >= oracle.value - 1e-9);
  }
}

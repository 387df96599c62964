#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "discround/schedules.hpp"

using namespace discround;

namespace {

VectorXd ones(int n) { return VectorXd::Ones(n); }

VectorXd indicator(int n, std::initializer_list<int> idx) {
  VectorXd v = VectorXd::Zero(n);
  for (int i : idx) v[i] = 1.0;
  return v;
}

LinearConstraint lc(VectorXd a, double b) {
  LinearConstraint c;
  c.a = std::move(a);
  c.b = b;
  return c;
}

bool is_integral(const VectorXd& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] != 0.0 && x[i] != 1.0) return false;
  return true;
}

}  // namespace

TEST_CASE("menu terms for a square dense instance") {
  // n = m = 100, first constraint, target 1e4, column sparsity 100
  const int n = 100, m = 100;
  std::vector<LinearConstraint> cons;
  for (int j = 0; j < m; ++j) cons.push_back(lc(ones(n), j == 0 ? 1e4 : 1.0));
  ScheduleParams params;
  params.delta = 100;
  auto labels = assign_parts(cons, n, params);
  REQUIRE(labels.size() == 100);
  CHECK(labels[0].menu[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(labels[0].menu[1] == doctest::Approx(10.48147073968205).epsilon(1e-12));
  CHECK(labels[0].menu[2] == doctest::Approx(749.0).epsilon(1e-12));
  CHECK(labels[0].menu[3] == doctest::Approx(46.05170185988092).epsilon(1e-12));
  CHECK(labels[0].part == Part::M1);
  CHECK(labels[0].bound_min == doctest::Approx(1.0));
  // the first constraint always gets the sqrt(j) term: sqrt(1) is minimal
  CHECK(part_name(labels[0].part) == std::string("M1"));
}

TEST_CASE("menu picks the sparsity term for late sparse constraints") {
  // n = 100, m = 4000, last constraint with target 1, column sparsity 2
  const int n = 100, m = 4000;
  std::vector<LinearConstraint> cons;
  for (int j = 0; j < m; ++j) cons.push_back(lc(indicator(n, {j % n, (j + 1) % n}), 1.0));
  ScheduleParams params;
  params.delta = 2;
  auto labels = assign_parts(cons, n, params);
  const auto& last = labels.back();
  CHECK(last.menu[0] == doctest::Approx(63.245553203367585).epsilon(1e-12));
  CHECK(last.menu[1] == doctest::Approx(19.33305360847936).epsilon(1e-12));
  CHECK(last.menu[2] == doctest::Approx(93.16515138991168).epsilon(1e-12));
  CHECK(last.menu[3] == doctest::Approx(6.512694134060588).epsilon(1e-12));
  CHECK(last.part == Part::M4);
  CHECK(last.bound_min == doctest::Approx(6.512694134060588));
  // early constraints still ride on sqrt(j)
  CHECK(labels[0].part == Part::M1);
  CHECK(labels[41].part == Part::M1);   // sqrt(42) = 6.48 < 6.51
  CHECK(labels[42].part == Part::M4);   // sqrt(43) = 6.56 > 6.51
}

TEST_CASE("schedule_L clamps its logarithm factors at one") {
  CHECK(schedule_L(1, 1) == doctest::Approx(1.0));
  CHECK(schedule_L(2, 2) == doctest::Approx(1.0));
  CHECK(schedule_L(1024, 1024) == doctest::Approx(100.0));
  CHECK(schedule_L(100, 4000) == doctest::Approx(84.0));
  CHECK(schedule_L(100, 100, 2.0) == doctest::Approx(98.0));
}

TEST_CASE("lambda_for frozen values") {
  ScheduleParams p;  // c1 = 1/200, c2 = 20, k1 = 40
  p.delta = 5;
  // below the index gate the width is zero
  CHECK(lambda_for(Part::M1, 1, 400, 0, 10, p) == 0.0);
  // exactly at the gate the log term vanishes
  CHECK(lambda_for(Part::M1, 1, 200, 0, 10, p) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(lambda_for(Part::M1, 2, 200, 0, 10, p) ==
        doctest::Approx(3.723297411059034).epsilon(1e-12));
  CHECK(lambda_for(Part::M2, 7, 400, 0, 10, p) ==
        doctest::Approx(5.0055228867629165).epsilon(1e-12));
  // value-part rows are held exactly
  CHECK(std::isinf(lambda_for(Part::M3, 3, 100, 50, 10, p)));
  // sparsity part: sqrt(k1 * delta / support)
  CHECK(lambda_for(Part::M4, 9, 100, 0, 5, p) == doctest::Approx(6.324555320336759));
  CHECK(lambda_for(Part::M4, 9, 100, 0, 10, p) == doctest::Approx(4.47213595499958));
  // a row with no live support cannot drift at all
  CHECK(std::isinf(lambda_for(Part::M4, 9, 100, 0, 0, p)));
  CHECK_THROWS_AS(lambda_for(Part::M1, 1, 0, 0, 1, p), PreconditionError);
}

TEST_CASE("lambda_for group-sparse refinement") {
  ScheduleParams p;
  p.delta = 100;
  p.group_of = {0, 0, 1};      // constraint 3 sits in group 1
  p.group_delta = {50.0, 2.0};  // group sparsities
  // scale k1 * (#groups) with the group's own sparsity
  double expect = std::sqrt(40.0 * 2 * 2.0 / 5);
  CHECK(lambda_for(Part::M4, 3, 100, 0, 5, p) == doctest::Approx(expect));
}

TEST_CASE("schedule parameter validation") {
  ScheduleParams p;
  CHECK_NOTHROW(p.validate());
  p.c1 = 1.0 / 100;  // too aggressive: breaks the width condition budget
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = ScheduleParams{};
  p.c2 = 5;  // needs c2 >= 2 * k0
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = ScheduleParams{};
  p.k1 = 0;
  CHECK_THROWS_AS(p.validate(), ValidationError);

  RoundFullConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.sched.k0 = 12;  // walk still believes k0 = 10
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = RoundFullConfig{};
  cfg.enum_threshold = 25;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("negative targets are rejected") {
  std::vector<LinearConstraint> cons{lc(ones(4), -1.0)};
  ScheduleParams p;
  p.delta = 1;
  CHECK_THROWS_AS(assign_parts(cons, 4, p), ValidationError);
}

TEST_CASE("assign_parts is deterministic") {
  std::mt19937_64 rng(7);
  std::vector<LinearConstraint> cons;
  for (int j = 0; j < 40; ++j) {
    VectorXd a = VectorXd::Zero(25);
    for (int i = 0; i < 25; ++i) a[i] = (rng() % 3 == 0) ? 1.0 : 0.0;
    cons.push_back(lc(a, static_cast<double>(rng() % 50)));
  }
  ScheduleParams p;
  p.delta = 12;
  auto l1 = assign_parts(cons, 25, p);
  auto l2 = assign_parts(cons, 25, p);
  REQUIRE(l1.size() == l2.size());
  for (size_t j = 0; j < l1.size(); ++j) {
    CHECK(l1[j].part == l2[j].part);
    CHECK(l1[j].bound_min == l2[j].bound_min);
  }
}

TEST_CASE("instance-derived widths satisfy the walk's width condition") {
  // the schedule never hands the walk an inadmissible width profile
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 32 + static_cast<int>(rng() % 96);
    int m = 1 + static_cast<int>(rng() % 300);
    std::vector<LinearConstraint> cons;
    for (int j = 0; j < m; ++j) {
      VectorXd a = VectorXd::Zero(n);
      for (int i = 0; i < n; ++i) a[i] = (rng() % 4 == 0) ? 1.0 : 0.0;
      cons.push_back(lc(a, 1.0 + static_cast<double>(rng() % 100)));
    }
    ScheduleParams p;
    p.L = schedule_L(n, m);
    p.delta = 1;
    for (const auto& c : cons) p.delta = std::max(p.delta, c.a.sum());
    auto labels = assign_parts(cons, n, p);
    std::vector<double> lambdas;
    for (int j = 0; j < m; ++j)
      lambdas.push_back(lambda_for(labels[static_cast<size_t>(j)].part, j + 1, n,
                                   cons[static_cast<size_t>(j)].b, n, p));
    CHECK(check_lambda_condition(lambdas, n, p.k0));
  }
}

TEST_CASE("round_full leaves an integral point untouched") {
  VectorXd y = indicator(6, {0, 2, 5});
  std::vector<LinearConstraint> cons{lc(ones(6), 3.0)};
  RoundFullConfig cfg;
  auto res = round_full(y, cons, {}, cfg, 99);
  CHECK((res.x - y).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(res.report.iterations == 0);
  CHECK(res.report.rows[0].violation == doctest::Approx(0.0));
  CHECK(res.report.max_ratio == doctest::Approx(0.0));
}

TEST_CASE("round_full on a dense counting constraint") {
  // ten half coordinates, one all-ones row with target 5: the class sums
  // conserve the total, so the final violation is at most a half
  const int n = 10;
  VectorXd y = VectorXd::Constant(n, 0.5);
  std::vector<LinearConstraint> cons{lc(ones(n), 5.0)};
  RoundFullConfig cfg;
  auto res = round_full(y, cons, {}, cfg, 3);
  CHECK(is_integral(res.x));
  CHECK(res.report.rows[0].violation <= 0.5 + 1e-9);
  CHECK(res.report.rows[0].ratio == doctest::Approx(res.report.rows[0].violation /
                                                    res.report.rows[0].bound_min));
  double recomputed = std::abs(cons[0].a.dot(res.x) - cons[0].b);
  CHECK(res.report.rows[0].violation == doctest::Approx(recomputed));
}

TEST_CASE("round_full pads small value-part targets") {
  // a tiny target on a value-part row is carried on a padded internal target
  VectorXd y(2);
  y << 0.3, 0.7;
  std::vector<LinearConstraint> cons{lc(ones(2), 1.0), lc(indicator(2, {0}), 0.01)};
  RoundFullConfig cfg;
  cfg.sched.delta = 9;  // keeps the sparsity term out of the running
  auto res = round_full(y, cons, {}, cfg, 11);
  CHECK(res.report.rows[0].part == Part::M1);
  CHECK(res.report.rows[1].part == Part::M3);
  bool noted = false;
  for (const auto& s : res.report.notes)
    if (s.find("bumped") != std::string::npos) noted = true;
  CHECK(noted);
}

TEST_CASE("round_full accounting and progress on a mid-size instance") {
  std::mt19937_64 rng(17);
  const int n = 40;
  VectorXd y(n);
  for (int i = 0; i < n; ++i)
    y[i] = 0.05 + 0.9 * (static_cast<double>(rng() % 1000) / 1000.0);
  std::vector<LinearConstraint> cons;
  for (int j = 0; j < 2; ++j) {
    VectorXd a = VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) a[i] = (rng() % 2 == 0) ? 1.0 : 0.0;
    cons.push_back(lc(a, a.dot(y)));
  }
  RoundFullConfig cfg;
  auto res = round_full(y, cons, {}, cfg, 23);
  CHECK(is_integral(res.x));
  CHECK(res.report.iterations >= 1);
  REQUIRE(!res.report.f_history.empty());
  CHECK(res.report.f_history.front() <= n);
  for (size_t t = 1; t < res.report.f_history.size(); ++t)
    CHECK(res.report.f_history[t] < res.report.f_history[t - 1]);
  // the recorded drifts dominate the end-to-end movement of every row
  for (int j = 0; j < 2; ++j) {
    double moved = std::abs(cons[static_cast<size_t>(j)].a.dot(res.x - y));
    CHECK(moved <= res.report.drift_sum[static_cast<size_t>(j)] + 1e-9);
    CHECK(res.report.rows[static_cast<size_t>(j)].violation <=
          res.report.drift_sum[static_cast<size_t>(j)] + 1e-9);
  }
  CHECK(res.report.total_steps > 0);
}

TEST_CASE("round_full respects matroid structure through completion") {
  // fifteen two-element parts, one item each; a dense row rides along
  const int n = 30;
  std::vector<Subset> parts;
  for (int p = 0; p < 15; ++p) parts.push_back(Subset{0b11} << (2 * p));
  auto matroid = MatroidOracle::partition(n, parts, std::vector<int>(15, 1));
  StructureSpec structure;
  structure.matroid = matroid;
  structure.base = true;
  VectorXd y = VectorXd::Constant(n, 0.5);
  std::vector<LinearConstraint> cons{lc(ones(n), 15.0)};
  RoundFullConfig cfg;
  auto res = round_full(y, cons, structure, cfg, 5);
  CHECK(is_integral(res.x));
  Subset chosen = 0;
  for (int i = 0; i < n; ++i)
    if (res.x[i] > 0.5) chosen |= Subset{1} << i;
  CHECK(subset_size(chosen) == 15);
  CHECK(matroid.rank(chosen) == 15);
  // every base hits the dense row exactly
  CHECK(res.report.rows[0].violation <= 1e-9);
}

TEST_CASE("round_full is deterministic for a fixed seed") {
  std::mt19937_64 rng(29);
  const int n = 24;
  VectorXd y(n);
  for (int i = 0; i < n; ++i)
    y[i] = 0.1 + 0.8 * (static_cast<double>(rng() % 997) / 997.0);
  std::vector<LinearConstraint> cons{lc(ones(n), y.sum()),
                                     lc(indicator(n, {0, 3, 5, 8, 13, 21}), 3.0)};
  RoundFullConfig cfg;
  auto r1 = round_full(y, cons, {}, cfg, 77);
  auto r2 = round_full(y, cons, {}, cfg, 77);
  CHECK((r1.x - r2.x).lpNorm<Eigen::Infinity>() == 0.0);
  REQUIRE(r1.report.rows.size() == r2.report.rows.size());
  for (size_t j = 0; j < r1.report.rows.size(); ++j) {
    CHECK(r1.report.rows[j].violation == r2.report.rows[j].violation);
    CHECK(r1.report.rows[j].lambda == r2.report.rows[j].lambda);
  }
  CHECK(r1.report.total_steps == r2.report.total_steps);
}

TEST_CASE("round_full input validation") {
  VectorXd y = VectorXd::Constant(3, 0.5);
  std::vector<LinearConstraint> cons{lc(ones(4), 2.0)};  // wrong width
  RoundFullConfig cfg;
  CHECK_THROWS_AS(round_full(y, cons, {}, cfg, 1), ValidationError);
  CHECK_THROWS_AS(round_full(VectorXd(), {}, {}, cfg, 1), ValidationError);
}

// ---- degree-bounded base driver ---------------------------------------------

TEST_CASE("degmat on an already integral point") {
  auto matroid = MatroidOracle::partition(2, {Subset{0b11}}, {1});
  VectorXd y(2);
  y << 1.0, 0.0;
  VectorXd d(2);
  d << 1.0, 3.0;
  std::vector<LinearConstraint> degree{lc(ones(2), 1.0)};
  RoundFullConfig cfg;
  auto res = degmat(d, degree, matroid, y, cfg, 2);
  CHECK(res.base == Subset{0b01});
  CHECK(res.cost == doctest::Approx(1.0));
  CHECK(res.cost_fractional == doctest::Approx(1.0));
  CHECK(res.report.rows[0].violation == doctest::Approx(0.0));
}

TEST_CASE("degmat picks the cheap base of a fractional point") {
  auto matroid = MatroidOracle::partition(2, {Subset{0b11}}, {1});
  VectorXd y = VectorXd::Constant(2, 0.5);
  VectorXd d(2);
  d << 1.0, 2.0;
  auto res = degmat(d, {}, matroid, y, RoundFullConfig{}, 4);
  CHECK(res.base == Subset{0b01});
  CHECK(res.cost == doctest::Approx(1.0));
  CHECK(res.cost <= res.cost_fractional + 1.0);
}

TEST_CASE("degmat on the complete graph with uniform half weights") {
  // K4: six edges at one half lie in the spanning tree polytope
  std::vector<std::pair<int, int>> edges{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  auto matroid = MatroidOracle::graphic(4, edges);
  VectorXd y = VectorXd::Constant(6, 0.5);
  VectorXd d(6);
  d << 1, 2, 3, 4, 5, 6;
  std::vector<LinearConstraint> degree;
  for (int v = 0; v < 4; ++v) {
    VectorXd a = VectorXd::Zero(6);
    for (int e = 0; e < 6; ++e)
      if (edges[static_cast<size_t>(e)].first == v || edges[static_cast<size_t>(e)].second == v)
        a[e] = 1.0;
    degree.push_back(lc(a, 2.0));
  }
  auto res = degmat(d, degree, matroid, y, RoundFullConfig{}, 8);
  CHECK(subset_size(res.base) == 3);
  CHECK(matroid.rank(res.base) == 3);
  CHECK(res.cost <= res.cost_fractional + 1.0);  // 10.5 + 1
  for (const auto& row : res.report.rows) CHECK(row.violation <= 1.0 + 1e-9);
}

TEST_CASE("degmat walks large instances before decomposing") {
  std::mt19937_64 rng(31);
  const int n = 60, k = 30;
  std::vector<Subset> parts;
  for (int p = 0; p < k; ++p) parts.push_back(Subset{0b11} << (2 * p));
  auto matroid = MatroidOracle::partition(n, parts, std::vector<int>(static_cast<size_t>(k), 1));
  VectorXd y = VectorXd::Constant(n, 0.5);
  VectorXd d(n);
  for (int i = 0; i < n; ++i) d[i] = static_cast<double>(rng() % 6);
  std::vector<LinearConstraint> degree;
  for (int j = 0; j < 4; ++j) {
    VectorXd a = VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) a[i] = (rng() % 2 == 0) ? 1.0 : 0.0;
    degree.push_back(lc(a, a.dot(y) + 1.0));
  }
  auto res = degmat(d, degree, matroid, y, RoundFullConfig{}, 12);
  CHECK(subset_size(res.base) == k);
  CHECK(matroid.rank(res.base) == k);
  CHECK(res.cost <= res.cost_fractional + 1.0);
  CHECK(res.report.iterations >= 1);
  REQUIRE(!res.report.f_history.empty());
  CHECK(res.report.f_history.front() == n);
  bool cost_note = false;
  for (const auto& s : res.report.notes)
    if (s.find("cost drift") != std::string::npos) cost_note = true;
  CHECK(cost_note);
}

TEST_CASE("degmat validates its inputs") {
  auto matroid = MatroidOracle::partition(2, {Subset{0b11}}, {1});
  VectorXd y = VectorXd::Constant(2, 0.5);
  VectorXd bad_cost(2);
  bad_cost << -1.0, 0.0;
  CHECK_THROWS_AS(degmat(bad_cost, {}, matroid, y, RoundFullConfig{}, 1), ValidationError);
  bad_cost << 0.5, 0.0;  // not integral
  CHECK_THROWS_AS(degmat(bad_cost, {}, matroid, y, RoundFullConfig{}, 1), ValidationError);
  VectorXd outside(2);
  outside << 0.9, 0.9;  // sums past the rank
  CHECK_THROWS_AS(degmat(VectorXd::Zero(2), {}, matroid, outside, RoundFullConfig{}, 1),
                  PreconditionError);
}

// ---- multi-budget base driver -------------------------------------------------

TEST_CASE("multicrit picks the affordable heavy element") {
  auto matroid = MatroidOracle::uniform(2, 1);
  std::vector<VectorXd> costs{(VectorXd(2) << 5.0, 6.0).finished()};
  auto res = multicrit(matroid, costs, {6.0}, 0.5, MulticritConfig{}, 1);
  REQUIRE(res.found);
  CHECK(res.base == Subset{0b01});
  CHECK(res.cost[0] == doctest::Approx(5.0));
  CHECK(res.max_ratio == doctest::Approx(5.0 / 6.0));
  CHECK(res.excess_constant == doctest::Approx(0.0));
}

TEST_CASE("multicrit with zero costs returns any base") {
  auto matroid =
      MatroidOracle::partition(4, {Subset{0b0011}, Subset{0b1100}}, {1, 1});
  std::vector<VectorXd> costs{VectorXd::Zero(4)};
  auto res = multicrit(matroid, costs, {1.0}, 0.5, MulticritConfig{}, 2);
  REQUIRE(res.found);
  CHECK(res.max_ratio == doctest::Approx(0.0));
  CHECK(subset_size(res.base) == 2);
  CHECK(matroid.rank(res.base) == 2);
}

TEST_CASE("multicrit reports failure when the budgets cannot cover a base") {
  auto matroid = MatroidOracle::uniform(2, 1);
  std::vector<VectorXd> costs{ones(2)};
  auto res = multicrit(matroid, costs, {0.1}, 0.5, MulticritConfig{}, 3);
  CHECK(!res.found);
  CHECK(res.branches >= 1);
}

TEST_CASE("multicrit finds a planted two-budget base") {
  auto matroid = MatroidOracle::partition(
      9, {Subset{0b000000111}, Subset{0b000111000}, Subset{0b111000000}}, {1, 1, 1});
  std::vector<VectorXd> costs{
      (VectorXd(9) << 10, 12, 14, 9, 13, 12, 10, 15, 12).finished(),
      (VectorXd(9) << 8, 11, 12, 9, 12, 14, 9, 13, 11).finished()};
  std::vector<double> budgets{29.0, 26.0};  // exactly the planted base {0, 3, 6}
  auto res = multicrit(matroid, costs, budgets, 0.5, MulticritConfig{}, 4);
  REQUIRE(res.found);
  CHECK(res.base == Subset{0b001001001});
  CHECK(res.max_ratio <= 1.0 + 1e-9);
  CHECK(res.cost[0] == doctest::Approx(29.0));
  CHECK(res.cost[1] == doctest::Approx(26.0));
}

TEST_CASE("multicrit input validation") {
  auto matroid = MatroidOracle::uniform(3, 2);
  std::vector<VectorXd> costs{ones(3)};
  CHECK_THROWS_AS(multicrit(matroid, costs, {}, 0.5, MulticritConfig{}, 1), ValidationError);
  CHECK_THROWS_AS(multicrit(matroid, costs, {1.0}, 0.0, MulticritConfig{}, 1), ValidationError);
  CHECK_THROWS_AS(multicrit(matroid, costs, {-2.0}, 0.5, MulticritConfig{}, 1),
                  ValidationError);
  std::vector<VectorXd> neg{(VectorXd(3) << 1, -1, 1).finished()};
  CHECK_THROWS_AS(multicrit(matroid, neg, {1.0}, 0.5, MulticritConfig{}, 1), ValidationError);
}

// ---- routing drivers ------------------------------------------------------------

namespace {

PathCatalog two_pair_disjoint() {
  PathCatalog cat;
  cat.n_edges = 4;
  cat.n_pairs = 2;
  cat.edges_of = {{0}, {1}, {2}, {3}};
  cat.pair_of = {0, 0, 1, 1};
  cat.weight = {0.5, 0.5, 0.5, 0.5};
  cat.capacity = {1, 1, 1, 1};
  return cat;
}

}  // namespace

TEST_CASE("rsp reduction normalizes pair masses") {
  PathCatalog cat;
  cat.n_edges = 2;
  cat.n_pairs = 1;
  cat.edges_of = {{0}, {1}};
  cat.pair_of = {0, 0};
  cat.weight = {0.6, 0.6};
  cat.capacity = {1, 1};
  auto red = rsp_reduce(cat);
  CHECK(red.y[0] == doctest::Approx(0.5));
  CHECK(red.y[1] == doctest::Approx(0.5));
  CHECK(red.matroid.full_rank() == 1);
  REQUIRE(red.degree.size() == 2);
  CHECK(red.degree[0].a[0] == 1.0);
  CHECK(red.degree[0].a[1] == 0.0);
  CHECK(red.degree[0].b == doctest::Approx(1.0));
}

TEST_CASE("rsp rejects underweight pairs and malformed catalogs") {
  PathCatalog cat;
  cat.n_edges = 1;
  cat.n_pairs = 1;
  cat.edges_of = {{0}};
  cat.pair_of = {0};
  cat.weight = {0.4};  // mass below one
  cat.capacity = {1};
  CHECK_THROWS_AS(rsp_reduce(cat), PreconditionError);
  cat.weight = {1.5};  // out of range
  CHECK_THROWS_AS(rsp_reduce(cat), ValidationError);
  cat.weight = {1.0};
  cat.pair_of = {3};  // bad pair id
  CHECK_THROWS_AS(rsp_reduce(cat), ValidationError);
  cat.pair_of = {0};
  cat.edges_of = {{7}};  // bad edge id
  CHECK_THROWS_AS(rsp_reduce(cat), ValidationError);
}

TEST_CASE("rsp picks one path per pair on disjoint supports") {
  auto cat = two_pair_disjoint();
  auto res = rsp_run(cat, RoundFullConfig{}, 6);
  REQUIRE(res.chosen.size() == 2);
  CHECK((res.chosen[0] == 0 || res.chosen[0] == 1));
  CHECK((res.chosen[1] == 2 || res.chosen[1] == 3));
  for (const auto& row : res.report.rows) CHECK(row.violation <= 1e-9);
  CHECK(res.report.driver == "rsp");
}

TEST_CASE("rsp tolerates a shared edge within the additive bound") {
  PathCatalog cat;
  cat.n_edges = 3;
  cat.n_pairs = 2;
  cat.edges_of = {{0}, {1}, {1}, {2}};  // middle edge shared across pairs
  cat.pair_of = {0, 0, 1, 1};
  cat.weight = {0.5, 0.5, 0.5, 0.5};
  cat.capacity = {1, 1, 1};
  auto res = rsp_run(cat, RoundFullConfig{}, 7);
  REQUIRE(res.chosen.size() == 2);
  CHECK((res.chosen[0] == 0 || res.chosen[0] == 1));
  CHECK((res.chosen[1] == 2 || res.chosen[1] == 3));
  for (const auto& row : res.report.rows) CHECK(row.violation <= 1.0 + 1e-9);
}

TEST_CASE("rsp reports the unavoidable overload of a forced edge") {
  PathCatalog cat;
  cat.n_edges = 1;
  cat.n_pairs = 2;
  cat.edges_of = {{0}, {0}};  // both pairs must use the one edge
  cat.pair_of = {0, 1};
  cat.weight = {1.0, 1.0};
  cat.capacity = {1};
  auto res = rsp_run(cat, RoundFullConfig{}, 8);
  CHECK(res.chosen[0] == 0);
  CHECK(res.chosen[1] == 1);
  CHECK(res.report.rows[0].violation == doctest::Approx(1.0));
}

TEST_CASE("laminar routing meets nested requirements") {
  PathCatalog cat;
  cat.n_edges = 3;
  cat.n_pairs = 2;
  cat.edges_of = {{0}, {1}, {1}, {2}};
  cat.pair_of = {0, 0, 1, 1};
  cat.weight = {0.5, 0.5, 0.5, 0.5};
  cat.capacity = {1, 1, 1};
  std::vector<LaminarRequirement> reqs{{{0}, 1.0}, {{0, 1}, 2.0}};
  auto res = laminar_rsp(cat, reqs, RoundFullConfig{}, 9);
  int pair0 = 0, total = static_cast<int>(res.chosen.size());
  for (int p : res.chosen)
    if (cat.pair_of[static_cast<size_t>(p)] == 0) ++pair0;
  CHECK(pair0 >= 1);
  CHECK(total >= 2);
  CHECK(res.report.max_ratio <= 1e-9);  // a zero-overload completion exists
  CHECK(res.report.driver == "laminar-rsp");
}

TEST_CASE("laminar routing validates requirements") {
  auto cat = two_pair_disjoint();
  std::vector<LaminarRequirement> heavy{{{0, 1}, 3.0}};  // mass is only 2
  CHECK_THROWS_AS(laminar_rsp(cat, heavy, RoundFullConfig{}, 1), PreconditionError);

  PathCatalog three = cat;
  three.n_pairs = 3;
  three.edges_of = {{0}, {1}, {2}, {3}, {0}, {2}};
  three.pair_of = {0, 0, 1, 1, 2, 2};
  three.weight = {0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
  std::vector<LaminarRequirement> crossing{{{0, 1}, 1.0}, {{1, 2}, 1.0}};
  CHECK_THROWS_AS(laminar_rsp(three, crossing, RoundFullConfig{}, 1), ValidationError);

  std::vector<LaminarRequirement> bad_pair{{{9}, 1.0}};
  CHECK_THROWS_AS(laminar_rsp(cat, bad_pair, RoundFullConfig{}, 1), ValidationError);
}

TEST_CASE("laminar routing without requirements rounds the weights") {
  PathCatalog cat;
  cat.n_edges = 2;
  cat.n_pairs = 2;
  cat.edges_of = {{0}, {1}};
  cat.pair_of = {0, 1};
  cat.weight = {1.0, 1.0};
  cat.capacity = {1, 1};
  auto res = laminar_rsp(cat, {}, RoundFullConfig{}, 10);
  REQUIRE(res.chosen.size() == 2);
  CHECK(res.report.max_ratio <= 1e-9);
}

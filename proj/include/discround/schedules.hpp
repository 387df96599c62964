#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "discround/walk.hpp"

namespace discround {

// Which of the four per-constraint error-bound menu terms is smallest decides
// the width policy used for that constraint:
//   M1: sqrt(j)   M2: sqrt(n log(2 + m/n))   M3: sqrt(L b_j) + L   M4: sqrt(delta) log n
enum class Part { M1, M2, M3, M4 };
const char* part_name(Part p);

struct LinearConstraint {
  VectorXd a;   // coefficients (indicator or scaled-indicator rows typically)
  double b = 0; // target value of <a, x>
  std::optional<double> lambda_override;  // fixed width multiplier for every iteration
};

// Width-schedule knobs plus the per-run quantities (L, column sparsity) the
// formulas need.  round_full fills L and delta from the instance when they
// are left at their defaults.
struct ScheduleParams {
  double c1 = 1.0 / 200;  // M1/M2: constraints with j < c1*f get width 0
  double c2 = 20.0;       // M1/M2 scale; needs c2 >= 2*k0
  double k0 = 10.0;       // must match the walk's width-condition constant
  double k1 = 40.0;       // M4 scale ("large enough constant")
  double c_L = 1.0;       // L = c_L * max(1, ceil(log2 m)) * max(1, ceil(log2 n))
  double L = 0;           // 0: computed from (n, m)
  double delta = 0;       // 0: computed as the instance's column sparsity
  // optional group-sparse refinement of M4: per-constraint group ids; group
  // sparsities are computed from the instance
  std::vector<int> group_of;
  std::vector<double> group_delta;

  void validate() const;  // c1 < 1/150, c2 >= 2*k0 and positivity
};

double schedule_L(int n, int m, double c_L = 1.0);

struct PartLabel {
  Part part = Part::M1;
  std::array<double, 4> menu{};  // the four bound terms, in the order above
  double bound_min = 0;
};

// Labels every constraint with the argmin menu term (ties toward the lower
// index).  j is the 1-based position of the constraint in `cons`.
std::vector<PartLabel> assign_parts(const std::vector<LinearConstraint>& cons, int n,
                                    const ScheduleParams& params);

// Width multiplier for one constraint in an iteration with f fractional
// coordinates.  support = number of nonzero coefficients among the still
// fractional coordinates (used by M4).
double lambda_for(Part part, int j, int f, double b_j, int support,
                  const ScheduleParams& params);

struct ConstraintReport {
  int id = 0;  // 1-based constraint index
  Part part = Part::M1;
  double b = 0;
  double lambda = 0;     // width multiplier in the last iteration it was active
  double violation = 0;  // |<a,x> - b|, or max(0, <a,x> - b) for one-sided runs
  std::array<double, 4> menu{};
  double bound_min = 0;
  double ratio = 0;  // violation / bound_min
};

struct RoundReport {
  std::vector<ConstraintReport> rows;
  int iterations = 0;
  uint64_t total_steps = 0;
  int total_truncations = 0;
  std::vector<int> f_history;        // fractional count entering each iteration
  std::vector<double> drift_sum;     // per constraint: accumulated per-iteration |drift|
  std::vector<std::string> notes;
  double max_ratio = 0;

  uint64_t seed = 0;
  std::string driver;  // "round", "degmat", ...
};

struct RoundFullConfig {
  WalkConfig walk = WalkConfig::practical();
  ScheduleParams sched;
  int enum_threshold = 8;           // finish by enumeration once f drops to this
  uint64_t enum_cap = uint64_t{1} << 20;
  int max_iterations = 200;
  bool one_sided = false;           // report max(0, <a,x> - b) instead of |.|
  // extra feasibility gate for the final integral completions (e.g. laminar
  // requirement floors); when empty, matroid runs demand an independent set /
  // base as appropriate
  std::function<bool(const VectorXd&)> completion_ok;

  void validate() const;
};

struct RoundFullResult {
  VectorXd x;
  RoundReport report;
};

// Iterative full rounding: walk, re-bucket, repeat, finish the last few
// fractional coordinates by enumeration.
RoundFullResult round_full(const VectorXd& y, const std::vector<LinearConstraint>& cons,
                           const StructureSpec& structure, const RoundFullConfig& cfg,
                           uint64_t seed);

struct DegmatResult {
  Subset base = 0;
  VectorXd x;            // indicator of base
  double cost = 0;           // <d, base>
  double cost_fractional = 0;  // <d, y>
  RoundReport report;
};

// Minimum-cost degree-bounded matroid base: the cost rides along as a
// zero-width row, degree rows follow the four-part schedule, and the endgame
// picks the cheapest base of the convex decomposition of the final point.
DegmatResult degmat(const VectorXd& costs, const std::vector<LinearConstraint>& degree,
                    const MatroidOracle& matroid, const VectorXd& y,
                    const RoundFullConfig& cfg, uint64_t seed);

struct MulticritConfig {
  RoundFullConfig round;
  uint64_t branch_cap = 1000000;  // enumeration budget over heavy-element guesses
  int lp_iters = 6000;            // multiplicative-weights budget per branch
  double lp_slack = 0.25;         // fraction of eps allowed as LP slack
};

struct MulticritResult {
  bool found = false;
  Subset base = 0;
  std::vector<double> cost;  // d_j(base)
  double max_ratio = 0;      // max_j d_j(base) / B_j
  double excess_constant = 0;  // C with max_ratio <= 1 + C * eps
  uint64_t branches = 0;
  RoundReport report;
};

// Multi-budget matroid base search: guess the heavy elements of a target
// basis by enumeration, contract them, satisfy the residual budgets
// fractionally, and round.
MulticritResult multicrit(const MatroidOracle& matroid, const std::vector<VectorXd>& costs,
                          const std::vector<double>& budgets, double eps,
                          const MulticritConfig& cfg, uint64_t seed);

// ---- path routing reductions ------------------------------------------------

// Support paths of a fractional routing solution.  Paths are the ground
// elements; pairs index the terminal pairs they serve.
struct PathCatalog {
  int n_edges = 0;
  int n_pairs = 0;
  std::vector<std::vector<int>> edges_of;  // per path: edge ids on it
  std::vector<int> pair_of;                // per path: its pair
  std::vector<double> weight;              // fractional path weight
  std::vector<double> capacity;            // per edge

  void validate() const;
};

struct RspReduction {
  MatroidOracle matroid;                  // partition matroid: one path per pair
  std::vector<LinearConstraint> degree;   // per edge: paths through it, bound b_e
  VectorXd y;                             // per-pair normalized weights
};

// Casts one-path-per-pair routing as a degree-bounded partition-matroid base
// problem: edge capacities become degree rows over the paths using the edge.
RspReduction rsp_reduce(const PathCatalog& cat);

struct RspResult {
  std::vector<int> chosen;  // one path id per pair
  RoundReport report;       // per-edge rows
};

RspResult rsp_run(const PathCatalog& cat, const RoundFullConfig& cfg, uint64_t seed);

struct LaminarRequirement {
  std::vector<int> pairs;  // pair ids of the set
  double require = 0;      // at least this many chosen paths among them
};

struct LaminarRspResult {
  std::vector<int> chosen;  // chosen path ids (several per pair allowed)
  RoundReport report;
};

// Multipath routing with nested at-least requirements over pair groups: the
// group totals are preserved exactly through the walk, the endgame picks a
// completion meeting every requirement.
LaminarRspResult laminar_rsp(const PathCatalog& cat,
                             const std::vector<LaminarRequirement>& reqs,
                             const RoundFullConfig& cfg, uint64_t seed);

}  // namespace discround

#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "discround/matroid.hpp"
#include "discround/numeric.hpp"
#include "discround/rng.hpp"

namespace discround {

inline constexpr double kUnboundedLambda = std::numeric_limits<double>::infinity();

// Dyadic scale classes of the fractional point.  Coordinates with y <= 1/2
// sit on the U side (bucketed by y), the rest on the V side (bucketed by
// 1-y); level k in [1, ell] means the bucket (2^-k-1, 2^-k], with level ell
// absorbing everything at or below 2^-ell.  Initially-integral coordinates
// are marked frozen and never move.
struct ScaleClasses {
  int n = 0;
  int ell = 0;
  VectorXd s;                 // per-coordinate scale 2^-level
  std::vector<int> level;     // 1..ell
  std::vector<int> side;      // +1 = U, -1 = V
  std::vector<char> frozen;   // initially integral
  int n_fractional = 0;
};

ScaleClasses classify_scales(const VectorXd& y, const ToleranceModel& tol = {});

struct SideConstraint {
  VectorXd a;
  double b = 0;       // reporting target for <a, x>
  double lambda = 0;  // width multiplier; kUnboundedLambda drops the band

  // filled in by build_polytope
  double w_scaled = 0;  // sum_i a_i^2 s_i^2
  double w_y = 0;       // sum_i a_i^2 min(y_i, 1-y_i)^2
  double slack = 0;     // ||a||_2 / n^c
  double width = 0;     // min(lambda, n) * sqrt(w_scaled) + slack
};

// Structure the walk must preserve exactly.
struct StructureSpec {
  std::optional<MatroidOracle> matroid;
  bool base = false;  // additionally pin x(ground) = rank(ground)
  std::optional<LaminarFamily> laminar;
};

struct WalkConfig {
  double gamma = 0.04;
  double alpha = 4.0;
  double k0 = 10.0;
  uint64_t max_steps = 0;           // 0: use ceil(10 * alpha^2 / gamma^2)
  double stop_fraction = 1.0 / 20;  // stop once this fraction of coordinates got pinned
  int min_new_integral = -1;        // success target; -1: max(1, ceil((stop_fraction - 1/alpha) * n_frac))
  int restarts = 5;
  int structure_check_every = 25;   // extra structure audit cadence
  int audit_every = 100;            // full feasibility audit cadence (every step in debug builds)
  double slack_exponent = 3.0;      // c in the additive width term ||a|| / n^c
  // Fold classes holding a single fractional coordinate into the nearest
  // nonempty class on the same side.  A lone coordinate is pinned by its
  // class-sum row, so a bucketing made of singletons leaves the walk no free
  // directions; merging preserves the (coarsened) class sums and restores
  // dimensions.  Off by default: the full-rounding loop switches it on when
  // a re-bucketing stalls with too many coordinates left to enumerate.
  bool merge_singleton_classes = false;
  ToleranceModel tol;
  std::function<void(const VectorXd& delta)> step_observer;  // applied increments (tests)

  static WalkConfig practical();
  static WalkConfig paper(int n);  // gamma = n^-6, alpha = 40; sanity scale only
  void validate() const;
  uint64_t effective_max_steps() const;
};

struct QPolytope {
  int n = 0;
  VectorXd y;
  ScaleClasses classes;
  VectorXd lower, upper;  // box with the alpha * 2^-k caps
  // permanent equalities: class sums, laminar members, base row
  MatrixXd eq_rows;
  VectorXd eq_rhs;
  std::vector<SideConstraint> side;
  std::optional<MatroidOracle> matroid;
  bool base_equality = false;
  std::optional<LaminarFamily> laminar;

  struct Counts {
    int structure = 0;
    int side = 0;
    int cls = 0;
    int box = 0;
  };
  Counts counts;  // formal constraint counts (2*ell class rows, 2n box rows)
};

QPolytope build_polytope(const VectorXd& y, std::vector<SideConstraint> side,
                         const StructureSpec& structure, const WalkConfig& cfg);

// sum_k 2^(2k) * (sum_{U_k} x_i^2 + sum_{V_k} (1 - x_i)^2); bounded by
// alpha^2 * n inside the capped box
double potential(const VectorXd& x, const ScaleClasses& classes);

// Sum_j exp(-lambda_j^2 / k0) < f / 16, the width condition the walk needs.
bool check_lambda_condition(const std::vector<double>& lambdas, int f, double k0);

enum class WalkStatus { VarTargetReached, DimensionExhausted, StepBudget };

struct WalkStats {
  uint64_t steps = 0;
  int truncations = 0;
  int var_registered = 0;   // coordinate faces registered during the walk
  int side_registered = 0;
  int rank_registered = 0;  // truncation-registered rank faces
  int rank_seeded = 0;      // tight chain rows present from the start
  WalkStatus status = WalkStatus::StepBudget;
};

// One walk attempt over Q.  The registries only grow; every registered
// constraint stays exactly tight because later directions are orthogonal.
class WalkState {
 public:
  WalkState(const QPolytope& q, const WalkConfig& cfg, uint64_t seed, uint64_t stream);

  int free_dimension();                 // dim of the scaled free subspace
  VectorXd random_direction();          // G-bar: s .* (orthonormal-basis mix of signs)
  double apply(const VectorXd& gbar);   // truncated step; returns applied fraction in [0,1]
  void audit() const;                   // full feasibility assertion (throws ConvergenceError)

  bool var_target_reached() const;
  const VectorXd& x() const { return x_; }
  const QPolytope& polytope() const { return *q_; }
  WalkStats stats;

 private:
  void rebuild_basis();
  void register_coordinate(int i, double bound_value);
  void register_side(int j);
  void register_rank(Subset s);
  void refresh_side_values();

  const QPolytope* q_;
  WalkConfig cfg_;
  CounterRng rng_;
  VectorXd x_;
  std::vector<char> pinned_;       // frozen-at-start or var-registered
  std::vector<char> side_tight_;
  std::vector<Subset> rank_rows_;
  VectorXd side_val_;              // <x - y, a_j>, maintained incrementally
  MatrixXd basis_;                 // scaled-space orthonormal basis, full-height
  bool basis_dirty_ = true;
  int var_stop_target_ = 0;
  uint64_t steps_since_refresh_ = 0;
};

struct PartialRoundResult {
  VectorXd x;
  bool success = false;
  int attempts = 0;  // attempts consumed (last one produced x)
  int new_integral = 0;
  int n_fractional_start = 0;
  WalkStats stats;
  std::vector<double> side_values;  // final <x - y, a_j>
};

// Runs walk attempts (fresh RNG stream per restart) until one pins at least
// the success target of new integral coordinates; keeps the best attempt
// otherwise and reports success = false.
PartialRoundResult partial_round(const VectorXd& y, std::vector<SideConstraint> side,
                                 const StructureSpec& structure, const WalkConfig& cfg,
                                 uint64_t seed);

}  // namespace discround

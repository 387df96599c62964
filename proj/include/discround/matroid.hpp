#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "discround/numeric.hpp"

namespace discround {

// Ground sets are capped at 64 elements so subsets are plain bitmasks.  Exact
// separation / tight-set enumeration for the kinds without a closed form
// additionally caps the ground at 20 elements (2^n scan).
using Subset = uint64_t;

inline int subset_size(Subset s) { return __builtin_popcountll(s); }
inline double subset_sum(const VectorXd& x, Subset s) {
  double acc = 0;
  while (s) {
    int i = __builtin_ctzll(s);
    acc += x[i];
    s &= s - 1;
  }
  return acc;
}

struct TightSet {
  Subset set;
  int rank;
};
// Nested, strictly increasing family whose indicators span every tight rank
// constraint at the queried point.
using TightChain = std::vector<TightSet>;

class MatroidOracle {
 public:
  enum class Kind { Uniform, Partition, Graphic, Explicit };

  static MatroidOracle uniform(int n, int rank);
  static MatroidOracle partition(int n, std::vector<Subset> parts, std::vector<int> caps);
  static MatroidOracle graphic(int n_vertices, std::vector<std::pair<int, int>> edges);
  static MatroidOracle explicit_bases(int n, std::vector<Subset> bases);

  Kind kind() const { return kind_; }
  int ground_size() const { return n_; }
  bool is_independent(Subset s) const;
  int rank(Subset s) const;
  int full_rank() const { return full_rank_; }

  // contraction by an independent set; surviving elements are reindexed in
  // increasing original order
  MatroidOracle contracted(Subset s) const;
  // restriction to a subset of the ground, reindexed the same way
  MatroidOracle restricted(Subset keep) const;

  struct Separation {
    bool inside;
    Subset set;        // maximally violated set (valid when !inside)
    double violation;  // max over sets of x(S) - rank(S)
  };
  // Exact separation for x >= 0 against {x : x(S) <= rank(S) for all S}.
  Separation separate(const VectorXd& x, const ToleranceModel& tol = {}) const;

  struct StepLimit {
    double mu;
    bool bounded;
    Subset tight_set;  // set that becomes tight at mu (valid when bounded)
  };
  // Largest mu in [0, mu_cap] with x + mu*d still in the polytope; x must be
  // feasible on entry (assume_feasible skips re-verifying that, for hot loops).
  StepLimit max_feasible_step(const VectorXd& x, const VectorXd& d, double mu_cap,
                              const ToleranceModel& tol = {},
                              bool assume_feasible = false) const;

  TightChain tight_chain(const VectorXd& x, const ToleranceModel& tol = {}) const;

  struct WeightedBase {
    Subset base;
    double weight;
  };
  // Writes a point of the base polytope as a convex combination of bases
  // (algorithmic Caratheodory, at most n+1 of them).
  std::vector<WeightedBase> base_decompose(const VectorXd& x,
                                           const ToleranceModel& tol = {}) const;

 private:
  MatroidOracle() = default;
  void finish_init();
  const std::vector<uint8_t>& rank_table() const;  // 2^n scan kinds only
  bool has_closed_form() const { return kind_ == Kind::Uniform || kind_ == Kind::Partition; }
  Separation separate_closed_form(const VectorXd& x) const;
  Separation separate_table(const VectorXd& x) const;

  Kind kind_ = Kind::Uniform;
  int n_ = 0;
  int full_rank_ = 0;
  // uniform
  int uniform_rank_ = 0;
  // partition (normalized so parts cover the ground)
  std::vector<Subset> parts_;
  std::vector<int> caps_;
  // graphic
  int n_vertices_ = 0;
  std::vector<std::pair<int, int>> edges_;
  // explicit
  std::vector<Subset> bases_;

  mutable std::vector<uint8_t> rank_table_;  // lazily built
};

struct LaminarMember {
  Subset set;
  double value;  // required x(set) == value
};

class LaminarFamily {
 public:
  LaminarFamily(int ground_size, std::vector<LaminarMember> members);

  int ground_size() const { return n_; }
  const std::vector<LaminarMember>& members() const { return members_; }

  // indices of members whose equality holds at x within eps_tight
  std::vector<int> tight_members(const VectorXd& x, const ToleranceModel& tol = {}) const;

 private:
  int n_ = 0;
  std::vector<LaminarMember> members_;  // sorted by (size, mask)
};

}  // namespace discround

#pragma once

#include <functional>
#include <optional>

#include "discround/matroid.hpp"
#include "discround/numeric.hpp"

namespace discround {

using MatrixXd = Eigen::MatrixXd;

// Reference rounders the engine is measured against, plus an exhaustive
// oracle for small instances.

// Independent per-coordinate rounding: x_i = 1 with probability y_i.
VectorXd randomized_round(const VectorXd& y, uint64_t seed);

// Given the live constraint rows and the fractional coordinate mask, name the
// row to drop when no nullspace direction is left.
using DropRule = std::function<size_t(const MatrixXd& A, const std::vector<size_t>& live,
                                      const std::vector<char>& fractional)>;

// Nullspace walking over the fractional coordinates: move to the nearest box
// face while all live rows of A are held exactly; drop a row (default: the
// one with the fewest remaining fractional entries) whenever the walk is
// stuck.  Ends fully integral.
VectorXd iterated_round(const VectorXd& y, const MatrixXd& A, const DropRule& drop = {});

struct ViolationProfile {
  VectorXd violations;       // |<a_j, x> - b_j| per row
  double max_violation = 0;
  VectorXd ratios;           // violations / bound, when bounds are supplied
};

ViolationProfile violation_profile(const MatrixXd& A, const VectorXd& b, const VectorXd& x,
                                   const VectorXd* bounds = nullptr);

struct BruteForceResult {
  double value = 0;   // smallest achievable max violation
  VectorXd witness;   // an argmin integral point
};

// Exhaustive search over integral points (bases of the matroid when one is
// given).  Only for small n.
BruteForceResult brute_force_best(const MatrixXd& A, const VectorXd& b,
                                  const std::optional<MatroidOracle>& matroid = std::nullopt);

}  // namespace discround

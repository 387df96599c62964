#include "discround/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "discround/rng.hpp"

namespace discround {

VectorXd randomized_round(const VectorXd& y, uint64_t seed) {
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y[i] < 0 || y[i] > 1) throw PreconditionError("randomized_round: y outside [0,1]");
  CounterRng rng(seed, 0);
  VectorXd x(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) x[i] = rng.next_unit() < y[i] ? 1.0 : 0.0;
  return x;
}

namespace {

constexpr double kEdge = 1e-9;  // box-face snap tolerance

std::vector<int> fractional_of(const VectorXd& x) {
  std::vector<int> idx;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] > kEdge && x[i] < 1 - kEdge) idx.push_back(static_cast<int>(i));
  return idx;
}

size_t default_drop(const MatrixXd& A, const std::vector<size_t>& live,
                    const std::vector<char>& fractional) {
  size_t pick = live.front();
  int best = -1;
  for (size_t r : live) {
    int support = 0;
    for (Eigen::Index i = 0; i < A.cols(); ++i)
      if (A(static_cast<Eigen::Index>(r), i) != 0.0 && fractional[static_cast<size_t>(i)])
        ++support;
    if (best < 0 || support < best) {
      best = support;
      pick = r;
    }
  }
  return pick;
}

}  // namespace

VectorXd iterated_round(const VectorXd& y, const MatrixXd& A, const DropRule& drop) {
  const Eigen::Index n = y.size();
  if (A.rows() > 0 && A.cols() != n)
    throw ValidationError("iterated_round: matrix width does not match the point");
  for (Eigen::Index i = 0; i < n; ++i)
    if (y[i] < 0 || y[i] > 1) throw PreconditionError("iterated_round: y outside [0,1]");

  VectorXd x = y;
  std::vector<size_t> live(static_cast<size_t>(A.rows()));
  for (size_t r = 0; r < live.size(); ++r) live[r] = r;
  ToleranceModel tol;

  while (true) {
    std::vector<int> frac = fractional_of(x);
    if (frac.empty()) break;
    const int f = static_cast<int>(frac.size());

    MatrixXd rows(static_cast<Eigen::Index>(live.size()), f);
    for (size_t r = 0; r < live.size(); ++r)
      for (int c = 0; c < f; ++c)
        rows(static_cast<Eigen::Index>(r), c) = A(static_cast<Eigen::Index>(live[r]), frac[static_cast<size_t>(c)]);

    MatrixXd basis = orthonormal_nullspace_basis(rows, tol);
    if (basis.cols() == 0) {
      // stuck: every fractional direction is pinned by the live rows
      std::vector<char> mask(static_cast<size_t>(n), 0);
      for (int i : frac) mask[static_cast<size_t>(i)] = 1;
      size_t victim = drop ? drop(A, live, mask) : default_drop(A, live, mask);
      auto it = std::find(live.begin(), live.end(), victim);
      if (it == live.end())
        throw PreconditionError("iterated_round: drop rule named a dead constraint");
      live.erase(it);
      continue;
    }

    VectorXd dir = basis.col(0);
    // nearest box face along +-dir
    double t_pos = std::numeric_limits<double>::infinity();
    double t_neg = std::numeric_limits<double>::infinity();
    for (int c = 0; c < f; ++c) {
      double v = x[frac[static_cast<size_t>(c)]];
      double d = dir[c];
      if (d == 0.0) continue;
      double up = (1 - v) / d, down = -v / d;
      if (d > 0) {
        t_pos = std::min(t_pos, up);
        t_neg = std::min(t_neg, -down);
      } else {
        t_pos = std::min(t_pos, down);
        t_neg = std::min(t_neg, -up);
      }
    }
    double t = t_pos <= t_neg ? t_pos : -t_neg;
    for (int c = 0; c < f; ++c) {
      int i = frac[static_cast<size_t>(c)];
      x[i] += t * dir[c];
      if (x[i] <= kEdge) x[i] = 0.0;
      if (x[i] >= 1 - kEdge) x[i] = 1.0;
    }
  }
  return x;
}

ViolationProfile violation_profile(const MatrixXd& A, const VectorXd& b, const VectorXd& x,
                                   const VectorXd* bounds) {
  if (A.rows() != b.size() || (A.rows() > 0 && A.cols() != x.size()))
    throw ValidationError("violation_profile: dimension mismatch");
  ViolationProfile out;
  out.violations = (A * x - b).cwiseAbs();
  out.max_violation = out.violations.size() ? out.violations.maxCoeff() : 0.0;
  if (bounds) {
    if (bounds->size() != b.size())
      throw ValidationError("violation_profile: one bound per constraint required");
    out.ratios = out.violations.cwiseQuotient(*bounds);
  } else {
    out.ratios = VectorXd::Zero(b.size());
  }
  return out;
}

BruteForceResult brute_force_best(const MatrixXd& A, const VectorXd& b,
                                  const std::optional<MatroidOracle>& matroid) {
  const int n = static_cast<int>(A.cols());
  if (A.rows() != b.size()) throw ValidationError("brute_force_best: dimension mismatch");
  if (n > 22) throw PreconditionError("brute_force_best: instance too large to enumerate");
  if (matroid && matroid->ground_size() != n)
    throw ValidationError("brute_force_best: matroid ground size mismatch");

  BruteForceResult out;
  bool have = false;
  const int r = matroid ? matroid->full_rank() : 0;
  for (uint64_t mask = 0; mask < (uint64_t{1} << n); ++mask) {
    if (matroid) {
      if (subset_size(mask) != r || matroid->rank(mask) != r) continue;
    }
    VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = (mask >> i) & 1u ? 1.0 : 0.0;
    double worst = A.rows() ? (A * x - b).cwiseAbs().maxCoeff() : 0.0;
    if (!have || worst < out.value) {
      out.value = worst;
      out.witness = x;
      have = true;
    }
  }
  if (!have) throw PreconditionError("brute_force_best: no admissible integral point");
  return out;
}

}  // namespace discround

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "discround/errors.hpp"

namespace discround {

template <typename Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Three-level tolerance model used throughout: eps_rank decides numerical
// rank, eps_tight decides when a constraint counts as tight, eps_feas is the
// hard feasibility slack audits enforce.
struct ToleranceModel {
  double eps_tight = 1e-9;
  double eps_rank = 1e-10;
  double eps_feas = 1e-8;

  void validate() const {
    if (!(eps_rank > 0 && eps_rank <= eps_tight && eps_tight <= eps_feas &&
          eps_feas < 1e-3))
      throw ValidationError("tolerance model must satisfy 0 < eps_rank <= eps_tight <= eps_feas < 1e-3");
  }
};

namespace detail {

// One modified-Gram-Schmidt sweep of the columns of B against themselves.
// Returns the smallest ratio (norm after / norm before) seen, so callers can
// detect collapse of a dependent column.
template <typename Scalar>
Scalar mgs_pass(MatX<Scalar>& B) {
  Scalar worst = Scalar(1);
  for (Eigen::Index j = 0; j < B.cols(); ++j) {
    Scalar before = B.col(j).norm();
    for (Eigen::Index i = 0; i < j; ++i)
      B.col(j) -= B.col(i).dot(B.col(j)) * B.col(i);
    Scalar after = B.col(j).norm();
    if (before > Scalar(0)) worst = std::min(worst, after / before);
    if (after > Scalar(0)) B.col(j) /= after;
  }
  return worst;
}

}  // namespace detail

// Orthonormal basis of the nullspace {v : rows * v = 0}, returned as columns.
// Rank is decided by column-pivoted QR of rows^T with pivots below
// eps_rank * (largest |entry| of rows) treated as zero; the Householder basis
// then gets one extra Gram-Schmidt sweep.  rows may be 0 x n (full space) and
// may contain zero or repeated rows.
template <typename Scalar>
MatX<Scalar> orthonormal_nullspace_basis(const MatX<Scalar>& rows,
                                         const ToleranceModel& tol = {}) {
  const Eigen::Index n = rows.cols();
  const Eigen::Index r = rows.rows();
  if (r == 0) return MatX<Scalar>::Identity(n, n);

  Scalar maxabs = rows.cwiseAbs().maxCoeff();
  if (!(maxabs > Scalar(0))) return MatX<Scalar>::Identity(n, n);

  Eigen::ColPivHouseholderQR<MatX<Scalar>> qr(rows.transpose());
  MatX<Scalar> R = qr.matrixR();
  Eigen::Index rank = 0;
  const Scalar cut = Scalar(tol.eps_rank) * maxabs;
  for (Eigen::Index i = 0; i < std::min(n, r); ++i)
    if (std::abs(R(i, i)) > cut) ++rank;

  // householderQ columns are ordered: the first `rank` span the row space
  MatX<Scalar> basis = (qr.householderQ() * MatX<Scalar>::Identity(n, n)).rightCols(n - rank);
  detail::mgs_pass(basis);
  return basis;
}

// Applies the positive diagonal scaling diag(d) to the columns of `basis` and
// re-orthonormalizes (two Gram-Schmidt sweeps).  The returned columns span
// diag(d) * span(basis).
template <typename Scalar>
MatX<Scalar> scale_and_orthonormalize(const MatX<Scalar>& basis,
                                      const VecX<Scalar>& d,
                                      const ToleranceModel& tol = {}) {
  if (d.size() != basis.rows())
    throw ValidationError("scale_and_orthonormalize: diagonal size mismatch");
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (!(d[i] > Scalar(0)))
      throw ValidationError("scale_and_orthonormalize: diagonal entries must be positive");

  MatX<Scalar> B = d.asDiagonal() * basis;
  Scalar worst = detail::mgs_pass(B);
  if (worst < Scalar(tol.eps_rank))
    throw PreconditionError("scale_and_orthonormalize: columns became dependent after scaling");
  detail::mgs_pass(B);
  return B;
}

// Cleans up a nearly-feasible point: coordinates within eps_feas outside
// [lb,ub] are clamped, coordinates within eps_tight inside a bound are pulled
// onto it, then equality residuals eqA*x = eqb are repaired by the least-norm
// correction over coordinates strictly between their bounds.  A violation
// beyond eps_feas means the caller's walk went wrong and raises.
inline VectorXd snap_to_feasible(const VectorXd& x, const VectorXd& lb,
                                 const VectorXd& ub, const MatrixXd& eqA,
                                 const VectorXd& eqb,
                                 const ToleranceModel& tol = {}) {
  const Eigen::Index n = x.size();
  VectorXd out = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (out[i] < lb[i] - tol.eps_feas || out[i] > ub[i] + tol.eps_feas)
      throw ConvergenceError("snap_to_feasible: coordinate " + std::to_string(i) +
                             " violates its bounds beyond eps_feas");
    if (out[i] < lb[i] + tol.eps_tight) out[i] = lb[i];
    if (out[i] > ub[i] - tol.eps_tight) out[i] = ub[i];
  }
  if (eqA.rows() == 0) return out;

  VectorXd resid = eqb - eqA * out;
  double scale = 1.0 + eqb.cwiseAbs().maxCoeff();
  if (resid.cwiseAbs().maxCoeff() <= 1e-14 * scale) return out;
  if (resid.cwiseAbs().maxCoeff() > tol.eps_feas * scale)
    throw ConvergenceError("snap_to_feasible: equality residual beyond eps_feas");

  std::vector<Eigen::Index> free_idx;
  for (Eigen::Index i = 0; i < n; ++i)
    if (out[i] > lb[i] && out[i] < ub[i]) free_idx.push_back(i);

  MatrixXd Af(eqA.rows(), static_cast<Eigen::Index>(free_idx.size()));
  for (size_t k = 0; k < free_idx.size(); ++k) Af.col(k) = eqA.col(free_idx[k]);
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(Af);
  VectorXd delta = cod.solve(resid);
  for (size_t k = 0; k < free_idx.size(); ++k) out[free_idx[k]] += delta[k];

  resid = eqb - eqA * out;
  if (resid.cwiseAbs().maxCoeff() > tol.eps_feas * scale)
    throw ConvergenceError("snap_to_feasible: equality repair failed");
  return out;
}

}  // namespace discround

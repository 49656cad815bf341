#pragma once

// Dense SVD by one-sided (Hestenes) Jacobi rotations.
//
// Jacobi orthogonalizes the columns of the working matrix directly, so small
// singular values keep full relative accuracy and the result depends only on
// the input (fixed sweep order, no random starts). Sizes here are those of a
// word-by-context matrix from a course corpus: thousands of rows, hundreds of
// columns at most.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "poselsa/error.hpp"

namespace poselsa {

struct SvdFactors {
  Eigen::MatrixXd u;      // m x r, orthonormal columns
  Eigen::VectorXd sigma;  // r, descending, >= 0
  Eigen::MatrixXd v;      // n x r, orthonormal columns

  Eigen::Index rank() const { return sigma.size(); }

  /// Leading k triplets.
  SvdFactors truncated(Eigen::Index k) const {
    if (k < 1 || k > rank()) {
      throw Error(ErrorKind::Validation, "cannot truncate rank-" + std::to_string(rank()) +
                                             " factors to k=" + std::to_string(k));
    }
    return {u.leftCols(k), sigma.head(k), v.leftCols(k)};
  }

  Eigen::MatrixXd reconstruct() const { return u * sigma.asDiagonal() * v.transpose(); }
};

namespace detail {

struct JacobiResult {
  Eigen::MatrixXd left;   // normalized columns, m x n
  Eigen::VectorXd sigma;  // n
  Eigen::MatrixXd right;  // n x n
  std::vector<bool> null; // columns whose left vector could not be normalized
};

// Requires a.rows() >= a.cols().
inline JacobiResult one_sided_jacobi(Eigen::MatrixXd a, int max_sweeps = 80) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double eps = std::numeric_limits<double>::epsilon();
  const double tol = eps * std::sqrt(static_cast<double>(std::max<Eigen::Index>(m, 1)));

  bool converged = n < 2;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double alpha = a.col(p).squaredNorm();
        const double beta = a.col(q).squaredNorm();
        const double gamma = a.col(p).dot(a.col(q));
        if (alpha == 0.0 || beta == 0.0) continue;
        if (std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::hypot(1.0, t);
        const double s = c * t;
        for (Eigen::Index i = 0; i < m; ++i) {
          const double ap = a(i, p);
          const double aq = a(i, q);
          a(i, p) = c * ap - s * aq;
          a(i, q) = s * ap + c * aq;
        }
        for (Eigen::Index i = 0; i < n; ++i) {
          const double vp = v(i, p);
          const double vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    converged = !rotated;
  }
  if (!converged) {
    throw Error(ErrorKind::Numeric, "Jacobi SVD did not converge in " + std::to_string(max_sweeps) + " sweeps");
  }

  Eigen::VectorXd norms(n);
  for (Eigen::Index j = 0; j < n; ++j) norms(j) = a.col(j).norm();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return norms(x) > norms(y); });

  JacobiResult r;
  r.left = Eigen::MatrixXd::Zero(m, n);
  r.sigma.resize(n);
  r.right.resize(n, n);
  r.null.assign(static_cast<std::size_t>(n), false);
  const double smax = n > 0 ? norms(order[0]) : 0.0;
  const double cutoff = smax * eps * static_cast<double>(std::max(m, n));
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index src = order[static_cast<std::size_t>(j)];
    r.sigma(j) = norms(src);
    r.right.col(j) = v.col(src);
    if (norms(src) > cutoff && norms(src) > 0.0) {
      r.left.col(j) = a.col(src) / norms(src);
    } else {
      r.null[static_cast<std::size_t>(j)] = true;
    }
  }
  return r;
}

// Fills flagged columns of `q` with unit vectors orthogonal to every other column.
inline void complete_orthonormal(Eigen::MatrixXd& q, const std::vector<bool>& missing) {
  const Eigen::Index m = q.rows();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    if (!missing[static_cast<std::size_t>(j)]) continue;
    q.col(j).setZero();
    Eigen::VectorXd best;
    double best_norm = -1.0;
    for (Eigen::Index e = 0; e < m; ++e) {
      Eigen::VectorXd cand = Eigen::VectorXd::Unit(m, e);
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index c = 0; c < q.cols(); ++c) {
          if (c == j) continue;
          cand -= q.col(c).dot(cand) * q.col(c);
        }
      }
      const double nrm = cand.norm();
      if (nrm > best_norm + 1e-12) {
        best_norm = nrm;
        best = cand;
      }
    }
    if (best_norm <= 0.0) throw Error(ErrorKind::Numeric, "cannot complete orthonormal basis");
    q.col(j) = best / best_norm;
  }
}

}  // namespace detail

/// Flips each singular pair so the largest-magnitude entry of its left vector
/// is positive (first such entry on ties).
inline void canonicalize_signs(SvdFactors& f) {
  for (Eigen::Index j = 0; j < f.u.cols(); ++j) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < f.u.rows(); ++i) {
      const double mag = std::abs(f.u(i, j));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    if (f.u.rows() > 0 && f.u(arg, j) < 0.0) {
      f.u.col(j) *= -1.0;
      f.v.col(j) *= -1.0;
    }
  }
}

/// Thin SVD with r = min(m, n) triplets, signs canonicalized.
inline SvdFactors full_svd(const Eigen::MatrixXd& a) {
  if (a.rows() == 0 || a.cols() == 0) throw Error(ErrorKind::Validation, "SVD of an empty matrix");
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (!std::isfinite(a(i, j))) throw Error(ErrorKind::Numeric, "SVD input has a non-finite cell");
    }
  }
  SvdFactors f;
  if (a.rows() >= a.cols()) {
    auto r = detail::one_sided_jacobi(a);
    detail::complete_orthonormal(r.left, r.null);
    f = {std::move(r.left), std::move(r.sigma), std::move(r.right)};
  } else {
    // A^T = U' S V'^T  =>  A = V' S U'^T
    auto r = detail::one_sided_jacobi(a.transpose());
    detail::complete_orthonormal(r.left, r.null);
    f = {std::move(r.right), std::move(r.sigma), std::move(r.left)};
  }
  canonicalize_signs(f);
  return f;
}

}  // namespace poselsa

#pragma once
//------------------------------------------------------------------------------
// Dense kernels: compact rank-revealing LU (P*A = L*U with unit-leading echelon
// U), Cholesky of symmetric positive definite matrices, triangular solves,
// projection onto a row space, minimum-norm least squares, the suspension of
// an echelon matrix and back substitution with free parameters.
//
// All routines are pure functions of their arguments.
//------------------------------------------------------------------------------

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "polyproj/error.hpp"

namespace polyproj {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using IndexList = std::vector<Index>;

/// Relative pivot threshold: an entry is a pivot iff |entry| > 1e-10 * max|A|.
inline constexpr double kPivotRelTol = 1e-10;

inline double max_abs(const Matrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

inline Matrix select_rows(const Matrix& a, std::span<const Index> rows) {
  Matrix out(static_cast<Index>(rows.size()), a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = a.row(rows[i]);
  return out;
}

inline Vector select_entries(const Vector& v, std::span<const Index> idx) {
  Vector out(static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Index>(i)) = v(idx[i]);
  return out;
}

namespace detail {

// Indices of 0..n-1 not in the sorted list gamma.
inline IndexList complement(std::span<const Index> gamma, Index n) {
  IndexList nu;
  std::size_t k = 0;
  for (Index j = 0; j < n; ++j) {
    if (k < gamma.size() && gamma[k] == j) {
      ++k;
    } else {
      nu.push_back(j);
    }
  }
  return nu;
}

}  // namespace detail

/// Row pivoting for rank_lu: column-wise max-abs partial pivoting, or a fixed
/// caller-supplied row order.
struct PivotPolicy {
  std::optional<IndexList> row_order;

  static PivotPolicy max_abs() { return {}; }
  static PivotPolicy explicit_order(IndexList order) { return {std::move(order)}; }

  bool is_explicit() const { return row_order.has_value(); }
};

/// P*A = L*U. `perm[i]` is the row of A placed at position i. L is m x r
/// truncated lower triangular, U is r x n echelon with U(i, gamma[i]) == 1.
struct RankLU {
  IndexList perm;
  Matrix l;
  Matrix u;
  IndexList gamma;
  Index rank = 0;

  Index rows() const { return static_cast<Index>(perm.size()); }
  Index cols() const { return u.cols(); }

  /// Complement of gamma in 0..cols()-1 (the free coordinates).
  IndexList free_columns() const { return detail::complement(gamma, cols()); }

  /// P*b.
  Vector permute(const Vector& b) const {
    if (b.size() != rows()) throw Error(ErrorCode::DimensionMismatch, "vector length does not match factored rows");
    return select_entries(b, perm);
  }

  /// L^T * P as an r x m matrix.
  Matrix lt_perm() const {
    Matrix out = Matrix::Zero(rank, rows());
    for (Index i = 0; i < rows(); ++i) out.col(perm[static_cast<std::size_t>(i)]) = l.row(i).transpose();
    return out;
  }
};

inline RankLU rank_lu(const Matrix& a, const PivotPolicy& pivot = {}) {
  const Index m = a.rows();
  const Index n = a.cols();
  if (!a.allFinite()) throw Error(ErrorCode::InvalidInput, "matrix has non-finite entries");

  RankLU f;
  f.perm.resize(static_cast<std::size_t>(m));
  if (pivot.is_explicit()) {
    const IndexList& order = *pivot.row_order;
    if (static_cast<Index>(order.size()) != m) {
      throw Error(ErrorCode::InvalidInput, "explicit row order must list every row exactly once");
    }
    std::vector<bool> seen(static_cast<std::size_t>(m), false);
    for (Index r : order) {
      if (r < 0 || r >= m || seen[static_cast<std::size_t>(r)]) {
        throw Error(ErrorCode::InvalidInput, "explicit row order is not a permutation");
      }
      seen[static_cast<std::size_t>(r)] = true;
    }
    f.perm = order;
  } else {
    std::iota(f.perm.begin(), f.perm.end(), Index{0});
  }

  Matrix work = select_rows(a, f.perm);
  const double tol = kPivotRelTol * max_abs(a);
  const Index kmax = std::min(m, n);
  Matrix l = Matrix::Zero(m, kmax);
  Matrix u = Matrix::Zero(kmax, n);

  Index r = 0;
  for (Index col = 0; col < n && r < m; ++col) {
    Index best = r;
    double best_abs = std::abs(work(r, col));
    for (Index i = r + 1; i < m; ++i) {
      if (std::abs(work(i, col)) > best_abs) {
        best_abs = std::abs(work(i, col));
        best = i;
      }
    }
    if (best_abs <= tol) continue;  // no pivot in this column

    if (pivot.is_explicit()) {
      if (std::abs(work(r, col)) <= tol) {
        throw Error(ErrorCode::ExplicitOrderSingular,
                    "row order gives a zero pivot in column " + std::to_string(col));
      }
    } else if (best != r) {
      work.row(r).swap(work.row(best));
      l.row(r).swap(l.row(best));
      std::swap(f.perm[static_cast<std::size_t>(r)], f.perm[static_cast<std::size_t>(best)]);
    }

    const double piv = work(r, col);
    u(r, col) = 1.0;
    for (Index j = col + 1; j < n; ++j) u(r, j) = work(r, j) / piv;
    for (Index i = r; i < m; ++i) l(i, r) = work(i, col);
    for (Index i = r + 1; i < m; ++i) {
      work.row(i).tail(n - col) -= l(i, r) * u.row(r).tail(n - col);
      work(i, col) = 0.0;
    }
    f.gamma.push_back(col);
    ++r;
  }

  f.rank = r;
  f.l = l.leftCols(r);
  f.u = u.topRows(r);
  return f;
}

inline Index numerical_rank(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  return rank_lu(a).rank;
}

//------------------------------------------------------------------------------
// Cholesky and triangular solves. Only the lower triangle of the factor is read.
//------------------------------------------------------------------------------

/// Lower-triangular K with K*K^T = m. Reads the lower triangle of m only.
inline Matrix cholesky_spd(const Matrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::DimensionMismatch, "cholesky needs a square matrix");
  const Index n = m.rows();
  Matrix k = Matrix::Zero(n, n);
  const double scale = n == 0 ? 0.0 : m.diagonal().cwiseAbs().maxCoeff();
  // Gram matrices of factors that pass the pivot test have pivots down to
  // kPivotRelTol^2 of the largest diagonal entry.
  const double tol = kPivotRelTol * kPivotRelTol * scale;
  for (Index j = 0; j < n; ++j) {
    double d = m(j, j) - k.row(j).head(j).squaredNorm();
    if (!(d > tol)) {
      throw Error(ErrorCode::NotPositiveDefinite, "non-positive pivot at column " + std::to_string(j));
    }
    k(j, j) = std::sqrt(d);
    for (Index i = j + 1; i < n; ++i) {
      k(i, j) = (m(i, j) - k.row(i).head(j).dot(k.row(j).head(j))) / k(j, j);
    }
  }
  return k;
}

/// Solves K X = B for lower-triangular K.
inline Matrix forward_substitute(const Matrix& k, const Matrix& b) {
  const Index n = k.rows();
  Matrix x = b;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < i; ++j) x.row(i) -= k(i, j) * x.row(j);
    x.row(i) /= k(i, i);
  }
  return x;
}

/// Solves K^T X = B for lower-triangular K.
inline Matrix back_substitute_transposed(const Matrix& k, const Matrix& b) {
  const Index n = k.rows();
  Matrix x = b;
  for (Index i = n - 1; i >= 0; --i) {
    for (Index j = i + 1; j < n; ++j) x.row(i) -= k(j, i) * x.row(j);
    x.row(i) /= k(i, i);
  }
  return x;
}

inline Vector forward_substitute(const Matrix& k, const Vector& b) {
  return forward_substitute(k, Matrix(b)).col(0);
}

inline Vector back_substitute_transposed(const Matrix& k, const Vector& b) {
  return back_substitute_transposed(k, Matrix(b)).col(0);
}

/// Solves (K K^T) x = b given the Cholesky factor K.
inline Vector cholesky_solve(const Matrix& k, const Vector& b) {
  return back_substitute_transposed(k, forward_substitute(k, b));
}

/// Column-wise (K K^T) X = B.
inline Matrix cholesky_solve_columns(const Matrix& k, const Matrix& b) {
  return back_substitute_transposed(k, forward_substitute(k, b));
}

//------------------------------------------------------------------------------
// Projections and least squares through the compact factorization.
//------------------------------------------------------------------------------

/// A^+ A v for the factored A: y = U v, solve (U U^T) z = y, return U^T z.
inline Vector pinv_projection(const RankLU& active, const Vector& v) {
  if (v.size() != active.cols()) throw Error(ErrorCode::DimensionMismatch, "projection vector length");
  if (active.rank == 0) return Vector::Zero(v.size());
  const Matrix& u = active.u;
  const Vector y = u * v;
  const Matrix kg = cholesky_spd(u * u.transpose());
  return u.transpose() * cholesky_solve(kg, y);
}

/// A^+ b = U^T (U U^T)^{-1} (L^T L)^{-1} L^T P b.
inline Vector min_norm_solution(const RankLU& f, const Vector& b) {
  const Vector pb = f.permute(b);
  if (f.rank == 0) return Vector::Zero(f.cols());
  const Matrix kl = cholesky_spd(f.l.transpose() * f.l);
  const Vector s = cholesky_solve(kl, f.l.transpose() * pb);
  const Matrix ku = cholesky_spd(f.u * f.u.transpose());
  return f.u.transpose() * cholesky_solve(ku, s);
}

/// The invertible n x n completion of echelon U: row gamma[k] is U's row k,
/// the remaining rows are unit rows. The result is unit upper triangular.
inline Matrix suspension(const Matrix& u, std::span<const Index> gamma) {
  const Index n = u.cols();
  if (static_cast<Index>(gamma.size()) != u.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "gamma length must equal the row count of U");
  }
  Matrix s = Matrix::Identity(n, n);
  for (std::size_t k = 0; k < gamma.size(); ++k) s.row(gamma[k]) = u.row(static_cast<Index>(k));
  return s;
}

/// x(t) = base + dirs * t; rows of dirs at free_idx are the identity.
struct AffineMap {
  Vector base;
  Matrix dirs;
  IndexList free_idx;

  Index dim() const { return base.size(); }
  Index params() const { return dirs.cols(); }

  Vector operator()(const Vector& t) const {
    if (t.size() != params()) throw Error(ErrorCode::DimensionMismatch, "parameter vector length");
    return base + dirs * t;
  }
};

namespace detail {

// x[gamma[i]] <- z[i] - sum_{k > gamma[i]} U(i,k) x[k], for i = r-1 .. 0.
// Entries of x outside gamma are taken as given.
inline void back_substitute_echelon(const Matrix& u, std::span<const Index> gamma, const Vector& z, Vector& x) {
  for (Index i = static_cast<Index>(gamma.size()) - 1; i >= 0; --i) {
    const Index g = gamma[static_cast<std::size_t>(i)];
    const Index tail = u.cols() - g - 1;
    x(g) = z(i) - u.row(i).tail(tail).dot(x.tail(tail));
  }
}

// Modified Gram-Schmidt, two passes. Columns are assumed independent.
inline Matrix orthonormalize_columns(Matrix q) {
  for (Index j = 0; j < q.cols(); ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Index i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
    }
    q.col(j).normalize();
  }
  return q;
}

}  // namespace detail

inline AffineMap parametric_preimage(const Matrix& u, std::span<const Index> gamma, const Vector& z) {
  if (z.size() != static_cast<Index>(gamma.size())) {
    throw Error(ErrorCode::DimensionMismatch, "z length must equal the rank");
  }
  const Index n = u.cols();
  AffineMap map;
  map.free_idx = detail::complement(gamma, n);
  map.base = Vector::Zero(n);
  detail::back_substitute_echelon(u, gamma, z, map.base);

  const Index f = static_cast<Index>(map.free_idx.size());
  map.dirs = Matrix::Zero(n, f);
  const Vector zero = Vector::Zero(z.size());
  for (Index j = 0; j < f; ++j) {
    Vector x = Vector::Zero(n);
    x(map.free_idx[static_cast<std::size_t>(j)]) = 1.0;
    detail::back_substitute_echelon(u, gamma, zero, x);
    map.dirs.col(j) = x;
  }
  return map;
}

inline AffineMap parametric_preimage(const RankLU& f, const Vector& z) {
  return parametric_preimage(f.u, f.gamma, z);
}

/// Orthonormal basis of null(m), one column per dimension.
inline Matrix null_space_basis(const Matrix& m) {
  const Index n = m.cols();
  if (m.rows() == 0) return Matrix::Identity(n, n);
  const RankLU f = rank_lu(m);
  const AffineMap map = parametric_preimage(f, Vector::Zero(f.rank));
  return detail::orthonormalize_columns(map.dirs);
}

}  // namespace polyproj

#pragma once
//------------------------------------------------------------------------------
// H-representations of linear images of polyhedra.
//
// For P = {x | Bx <= c} and Lambda = P^T L U, the image U P is obtained by
// changing variables through the suspension S of U (x~ = S x, so B S^{-1} x~
// <= c) and eliminating the free coordinates of x~ by Fourier-Motzkin. The
// image Lambda P follows by substituting y = (L^T L)^{-1} L^T P z and pinning z
// to the range of Lambda with rows from null(L^T P).
//------------------------------------------------------------------------------

#include <limits>
#include <optional>
#include <vector>

#include "polyproj/linalg.hpp"

namespace polyproj {

/// Rows b z <= c. empty_marker means no constraint at all (the whole space).
struct IneqSystem {
  Matrix b;
  Vector c;
  bool empty_marker = false;

  Index vars() const { return b.cols(); }
  Index rows() const { return b.rows(); }

  static IneqSystem unconstrained(Index vars) { return {Matrix(0, vars), Vector(0), true}; }

  bool satisfied(const Vector& z, double tol = 1e-9) const {
    if (z.size() != vars()) throw Error(ErrorCode::DimensionMismatch, "point length does not match system");
    for (Index i = 0; i < rows(); ++i) {
      if (b.row(i).dot(z) > c(i) + tol * (1.0 + std::abs(c(i)))) return false;
    }
    return true;
  }
};

/// Coefficients below this fraction of the row norm count as zero.
inline constexpr double kFmeZeroRelTol = 1e-12;
/// Normalized rows closer than this (max-abs) are merged.
inline constexpr double kFmeMergeTol = 1e-10;
/// Slack allowed on vacuous rows 0 <= c before the system is declared empty.
inline constexpr double kVacuousTol = 1e-9;

namespace detail {

inline void check_system(const IneqSystem& s) {
  if (s.b.rows() != s.c.size()) throw Error(ErrorCode::DimensionMismatch, "constraint rows and rhs length differ");
  if (s.empty_marker && s.b.rows() != 0) throw Error(ErrorCode::InvalidInput, "empty_marker with rows present");
}

// Scales each row to unit max-abs; rows whose coefficients vanish against
// `scale[i]` become exact zeros. Near-duplicates keep the smaller rhs.
inline IneqSystem normalize_and_merge(std::vector<Vector> rows, std::vector<double> rhs,
                                      const std::vector<double>& scale, Index vars) {
  std::vector<Vector> out_rows;
  std::vector<double> out_rhs;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Vector r = std::move(rows[i]);
    double c = rhs[i];
    const double m = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
    if (m <= kFmeZeroRelTol * scale[i]) {
      r.setZero();
    } else {
      r /= m;
      c /= m;
    }
    bool merged = false;
    for (std::size_t j = 0; j < out_rows.size(); ++j) {
      if ((out_rows[j] - r).cwiseAbs().maxCoeff() <= kFmeMergeTol) {
        out_rhs[j] = std::min(out_rhs[j], c);
        merged = true;
        break;
      }
    }
    if (!merged) {
      out_rows.push_back(std::move(r));
      out_rhs.push_back(c);
    }
  }
  IneqSystem s{Matrix(static_cast<Index>(out_rows.size()), vars), Vector(static_cast<Index>(out_rows.size())), false};
  for (std::size_t i = 0; i < out_rows.size(); ++i) {
    s.b.row(static_cast<Index>(i)) = out_rows[i].transpose();
    s.c(static_cast<Index>(i)) = out_rhs[i];
  }
  s.empty_marker = out_rows.empty();
  return s;
}

}  // namespace detail

/// One Fourier-Motzkin step. Vacuous combinations 0 <= c are kept.
inline IneqSystem fme_eliminate(const IneqSystem& sys, Index var) {
  detail::check_system(sys);
  if (var < 0 || var >= sys.vars()) throw Error(ErrorCode::InvalidInput, "elimination variable out of range");
  if (sys.empty_marker) return sys;

  std::vector<Index> zero, pos, neg;
  for (Index i = 0; i < sys.rows(); ++i) {
    const double a = sys.b(i, var);
    if (std::abs(a) <= kFmeZeroRelTol * sys.b.row(i).norm()) {
      zero.push_back(i);
    } else {
      (a > 0 ? pos : neg).push_back(i);
    }
  }

  std::vector<Vector> rows;
  std::vector<double> rhs, scale;
  for (Index i : zero) {
    Vector r = sys.b.row(i).transpose();
    r(var) = 0.0;
    scale.push_back(sys.b.row(i).norm());
    rows.push_back(std::move(r));
    rhs.push_back(sys.c(i));
  }
  for (Index p : pos) {
    for (Index q : neg) {
      const double wp = -sys.b(q, var);
      const double wq = sys.b(p, var);
      Vector r = wp * sys.b.row(p).transpose() + wq * sys.b.row(q).transpose();
      r(var) = 0.0;
      scale.push_back(wp * sys.b.row(p).norm() + wq * sys.b.row(q).norm());
      rows.push_back(std::move(r));
      rhs.push_back(wp * sys.c(p) + wq * sys.c(q));
    }
  }
  return detail::normalize_and_merge(std::move(rows), std::move(rhs), scale, sys.vars());
}

/// Drops vacuous rows 0 <= c; throws InfeasibleSystem for 0 <= c < 0.
inline IneqSystem prune_vacuous(const IneqSystem& sys) {
  detail::check_system(sys);
  if (sys.empty_marker) return sys;
  IndexList keep;
  for (Index i = 0; i < sys.rows(); ++i) {
    if (sys.b.row(i).cwiseAbs().maxCoeff() > 0.0) {
      keep.push_back(i);
    } else if (sys.c(i) < -kVacuousTol) {
      throw Error(ErrorCode::InfeasibleSystem, "constraint system has no solution (0 <= " + std::to_string(sys.c(i)) + ")");
    }
  }
  IneqSystem out{select_rows(sys.b, keep), select_entries(sys.c, keep), false};
  out.empty_marker = keep.empty();
  if (out.empty_marker) out.b.resize(0, sys.vars());
  return out;
}

/// Constraints on U P for P = {x | b x <= c}, in the r pivot coordinates.
inline IneqSystem corank_reduced_constraints(const Matrix& b, const Vector& c, const RankLU& f) {
  if (b.cols() != f.cols()) throw Error(ErrorCode::DimensionMismatch, "constraint columns do not match the map");
  if (b.rows() != c.size()) throw Error(ErrorCode::DimensionMismatch, "constraint rows and rhs length differ");

  // B' = B S^{-1}, i.e. S^T B'^T = B^T with S^T unit lower triangular.
  const Matrix st = suspension(f.u, f.gamma).transpose();
  IneqSystem sys{forward_substitute(st, Matrix(b.transpose())).transpose(), c, false};
  if (sys.rows() == 0) sys.empty_marker = true;

  for (Index v : f.free_columns()) {
    if (sys.empty_marker) break;
    sys = prune_vacuous(fme_eliminate(sys, v));
  }
  if (sys.empty_marker) return IneqSystem::unconstrained(f.rank);
  return {sys.b(Eigen::all, f.gamma), sys.c, false};
}

/// Constraints on Lambda P.
inline IneqSystem image_constraints(const Matrix& b, const Vector& c, const Matrix& lambda,
                                    const PivotPolicy& pivot = {}) {
  const RankLU f = rank_lu(lambda, pivot);
  const IneqSystem reduced = corank_reduced_constraints(b, c, f);
  const Index n = lambda.rows();
  const Matrix ltp = f.lt_perm();

  std::vector<Vector> rows;
  std::vector<double> rhs;
  if (!reduced.empty_marker && f.rank > 0) {
    const Matrix kl = cholesky_spd(f.l.transpose() * f.l);
    const Matrix m = reduced.b * cholesky_solve_columns(kl, ltp);
    for (Index i = 0; i < m.rows(); ++i) {
      rows.push_back(m.row(i).transpose());
      rhs.push_back(reduced.c(i));
    }
  }
  const Matrix zeta = null_space_basis(ltp);
  for (Index j = 0; j < zeta.cols(); ++j) {
    rows.push_back(zeta.col(j));
    rhs.push_back(0.0);
    rows.push_back(-zeta.col(j));
    rhs.push_back(0.0);
  }

  IneqSystem out{Matrix(static_cast<Index>(rows.size()), n), Vector(static_cast<Index>(rows.size())), rows.empty()};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.b.row(static_cast<Index>(i)) = rows[i].transpose();
    out.c(static_cast<Index>(i)) = rhs[i];
  }
  return out;
}

/// A point satisfying sys, found by eliminating every variable and choosing
/// interval midpoints on the way back; nullopt when the system is empty.
inline std::optional<Vector> fme_feasible_point(const IneqSystem& sys) {
  detail::check_system(sys);
  const Index n = sys.vars();
  if (sys.empty_marker) return Vector::Zero(n);

  std::vector<IneqSystem> stages;
  try {
    stages.push_back(prune_vacuous(sys));
    for (Index v = 0; v < n; ++v) stages.push_back(prune_vacuous(fme_eliminate(stages.back(), v)));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InfeasibleSystem) return std::nullopt;
    throw;
  }

  Vector x = Vector::Zero(n);
  for (Index v = n - 1; v >= 0; --v) {
    const IneqSystem& s = stages[static_cast<std::size_t>(v)];
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < s.rows(); ++i) {
      const double a = s.b(i, v);
      if (std::abs(a) <= kFmeZeroRelTol * s.b.row(i).norm()) continue;
      const double rest = s.c(i) - s.b.row(i).tail(n - v - 1).dot(x.tail(n - v - 1));
      if (a > 0) {
        hi = std::min(hi, rest / a);
      } else {
        lo = std::max(lo, rest / a);
      }
    }
    if (std::isfinite(lo) && std::isfinite(hi)) {
      if (lo > hi + kVacuousTol * (1.0 + std::abs(hi))) return std::nullopt;
      x(v) = 0.5 * (lo + hi);
    } else if (std::isfinite(lo)) {
      x(v) = lo + 1.0;
    } else if (std::isfinite(hi)) {
      x(v) = hi - 1.0;
    }
  }
  return x;
}

}  // namespace polyproj

#pragma once
//------------------------------------------------------------------------------
// H-representation polyhedra {x | A x <= b, Aeq x = beq}: membership, active
// rows, ray clipping, visibility from an external point, and reduction of an
// equality-constrained polyhedron to full dimension.
//------------------------------------------------------------------------------

#include <optional>
#include <utility>

#include "polyproj/linalg.hpp"

namespace polyproj {

struct Tolerances {
  double active = 1e-8;
  double feas = 1e-9;
};

/// Below this, a direction component a_i.d counts as zero (relative to |a_i||d|).
inline constexpr double kDirectionRelTol = 1e-12;
/// Two points are the same iff |x - y| <= kMoveRelTol * (1 + |y|).
inline constexpr double kMoveRelTol = 1e-12;

inline bool moved(const Vector& from, const Vector& to) {
  return (to - from).norm() > kMoveRelTol * (1.0 + from.norm());
}

class PolyhedronH {
 public:
  PolyhedronH(Matrix a, Vector b, Tolerances tol = {})
      : a_(std::move(a)), b_(std::move(b)), tol_(tol) {
    validate();
  }

  PolyhedronH(Matrix a, Vector b, Matrix eq_a, Vector eq_b, Tolerances tol = {})
      : a_(std::move(a)), b_(std::move(b)), eq_a_(std::move(eq_a)), eq_b_(std::move(eq_b)), tol_(tol) {
    validate();
  }

  Index dim() const { return a_.cols(); }
  Index rows() const { return a_.rows(); }
  const Matrix& a() const { return a_; }
  const Vector& b() const { return b_; }
  bool has_equalities() const { return eq_a_.has_value() && eq_a_->rows() > 0; }
  const Matrix& eq_a() const { return *eq_a_; }
  const Vector& eq_b() const { return *eq_b_; }
  const Tolerances& tolerances() const { return tol_; }
  double tol_active() const { return tol_.active; }
  double tol_feas() const { return tol_.feas; }

  double slack(Index i, const Vector& x) const { return b_(i) - a_.row(i).dot(x); }

  bool row_satisfied(Index i, const Vector& x) const {
    return a_.row(i).dot(x) <= b_(i) + tol_.feas * (1.0 + std::abs(b_(i)));
  }

  bool row_tight(Index i, const Vector& x) const {
    return std::abs(a_.row(i).dot(x) - b_(i)) <=
           tol_.active * (1.0 + std::abs(b_(i)) + a_.row(i).norm() * x.norm());
  }

 private:
  void validate() const {
    if (a_.rows() < 1) throw Error(ErrorCode::InvalidInput, "polyhedron needs at least one inequality");
    if (a_.rows() != b_.size()) throw Error(ErrorCode::DimensionMismatch, "A rows and b length differ");
    if (!a_.allFinite() || !b_.allFinite()) throw Error(ErrorCode::InvalidInput, "non-finite constraint data");
    for (Index i = 0; i < a_.rows(); ++i) {
      if (a_.row(i).norm() == 0.0) {
        throw Error(ErrorCode::InvalidInput, "constraint row " + std::to_string(i) + " has zero norm");
      }
    }
    if (eq_a_) {
      if (eq_a_->cols() != a_.cols()) throw Error(ErrorCode::DimensionMismatch, "eqA column count");
      if (eq_a_->rows() != eq_b_->size()) throw Error(ErrorCode::DimensionMismatch, "eqA rows and eqb length differ");
      if (!eq_a_->allFinite() || !eq_b_->allFinite()) throw Error(ErrorCode::InvalidInput, "non-finite equality data");
    }
    if (!(tol_.active > 0.0) || !(tol_.feas > 0.0)) throw Error(ErrorCode::InvalidInput, "tolerances must be positive");
  }

  Matrix a_;
  Vector b_;
  std::optional<Matrix> eq_a_;
  std::optional<Vector> eq_b_;
  Tolerances tol_;
};

inline void check_dim(const PolyhedronH& p, const Vector& x) {
  if (x.size() != p.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "point has " + std::to_string(x.size()) + " coordinates, polyhedron lives in R^" + std::to_string(p.dim()));
  }
}

inline bool contains(const PolyhedronH& p, const Vector& x) {
  check_dim(p, x);
  for (Index i = 0; i < p.rows(); ++i) {
    if (!p.row_satisfied(i, x)) return false;
  }
  if (p.has_equalities()) {
    const Vector r = p.eq_a() * x - p.eq_b();
    for (Index i = 0; i < r.size(); ++i) {
      if (std::abs(r(i)) > p.tol_feas() * (1.0 + std::abs(p.eq_b()(i)))) return false;
    }
  }
  return true;
}

struct ActiveSet {
  IndexList rows;
  Index rank = 0;

  bool empty() const { return rows.empty(); }
};

/// Inequality rows satisfied with equality at x, without the membership check.
inline IndexList tight_rows(const PolyhedronH& p, const Vector& x) {
  IndexList rows;
  for (Index i = 0; i < p.rows(); ++i) {
    if (p.row_tight(i, x)) rows.push_back(i);
  }
  return rows;
}

inline ActiveSet active_set(const PolyhedronH& p, const Vector& x) {
  if (!contains(p, x)) throw Error(ErrorCode::PointOutside, "active set requested for an infeasible point");
  ActiveSet s;
  s.rows = tight_rows(p, x);
  s.rank = numerical_rank(select_rows(p.a(), s.rows));
  return s;
}

/// Largest t in [0, 1] with e + t d still feasible.
inline double clip_ray(const PolyhedronH& p, const Vector& e, const Vector& d) {
  check_dim(p, e);
  check_dim(p, d);
  const double dn = d.norm();
  double t = 1.0;
  for (Index i = 0; i < p.rows(); ++i) {
    const double ad = p.a().row(i).dot(d);
    if (ad > kDirectionRelTol * p.a().row(i).norm() * dn) {
      t = std::min(t, p.slack(i, e) / ad);
    }
  }
  return std::clamp(t, 0.0, 1.0);
}

inline bool is_p_visible(const PolyhedronH& p, const Vector& e, const Vector& q) {
  if (contains(p, q)) throw Error(ErrorCode::QInside, "external point lies in the polyhedron");
  if (!contains(p, e)) throw Error(ErrorCode::PointOutside, "visibility requested for an infeasible point");
  const Vector d = q - e;
  return clip_ray(p, e, d) * d.norm() <= kMoveRelTol * (1.0 + e.norm());
}

/// The q-visible point on the segment [x, q] for feasible x.
inline Vector visible_point(const PolyhedronH& p, const Vector& x, const Vector& q) {
  if (contains(p, q)) throw Error(ErrorCode::QInside, "external point lies in the polyhedron");
  if (!contains(p, x)) throw Error(ErrorCode::PointOutside, "visible_point needs a feasible base point");
  const Vector d = q - x;
  return x + clip_ray(p, x, d) * d;
}

//------------------------------------------------------------------------------
// Full-dimensional reduction. With an orthonormal basis N of null(Aeq) and a
// particular solution x0, points of the equality subspace are x0 + N u and the
// inequalities become (A N) u <= b - A x0.
//------------------------------------------------------------------------------

struct FullDimReduction {
  PolyhedronH reduced;
  Matrix basis;   // m x n, orthonormal columns
  Vector origin;  // particular solution of the equalities
  Vector q_reduced;
  IndexList row_map;  // reduced row i is original row row_map[i]

  Vector to_reduced(const Vector& x) const { return basis.transpose() * (x - origin); }
  Vector from_reduced(const Vector& u) const { return origin + basis * u; }
};

inline FullDimReduction reduce_to_full_dimension(const PolyhedronH& p, const Vector& q) {
  check_dim(p, q);
  const Index m = p.dim();
  if (!p.has_equalities()) {
    IndexList all(static_cast<std::size_t>(p.rows()));
    std::iota(all.begin(), all.end(), Index{0});
    return {p, Matrix::Identity(m, m), Vector::Zero(m), q, std::move(all)};
  }

  const RankLU f = rank_lu(p.eq_a());
  const Vector origin = min_norm_solution(f, p.eq_b());
  const Vector resid = p.eq_a() * origin - p.eq_b();
  if (resid.norm() > p.tol_feas() * (1.0 + p.eq_b().norm()) * 10.0) {
    throw Error(ErrorCode::InconsistentEqualities, "equality system has no solution");
  }
  const Matrix basis = null_space_basis(p.eq_a());
  if (basis.cols() == 0) {
    throw Error(ErrorCode::InvalidInput, "equalities pin down a single point; nothing to reduce");
  }

  const Matrix ar = p.a() * basis;
  const Vector br = p.b() - p.a() * origin;
  IndexList keep;
  for (Index i = 0; i < ar.rows(); ++i) {
    const double scale = p.a().row(i).norm();
    if (ar.row(i).norm() > kDirectionRelTol * 1e2 * scale) {
      keep.push_back(i);
    } else if (br(i) < -p.tol_feas() * (1.0 + std::abs(p.b()(i)))) {
      throw Error(ErrorCode::InfeasibleSystem, "row " + std::to_string(i) + " is violated on the equality subspace");
    }
  }
  if (keep.empty()) throw Error(ErrorCode::InvalidInput, "no inequality constrains the equality subspace");

  PolyhedronH reduced(select_rows(ar, keep), select_entries(br, keep), p.tolerances());
  const Vector qr = basis.transpose() * (q - origin);
  return {std::move(reduced), basis, origin, qr, std::move(keep)};
}

}  // namespace polyproj

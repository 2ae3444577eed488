#pragma once
//------------------------------------------------------------------------------
// Constrained least squares: min |A x - b| over a polyhedron.
//
// Full column rank: with A^T A = K K^T, y = K^T x and p = K^{-1} A^T b,
//   |A x - b|^2 = |y - p|^2 + |b|^2 - |p|^2,
// so the problem is the nearest point of K^T P to p.
//
// Rank deficient: A = P^T L U and y = K^T U x with L^T L = K K^T. The image
// U P comes from corank_reduced_constraints; once z = U x is known, the
// remaining freedom x = x0 + N t is fixed by the point of the parameter
// polyhedron nearest to the unconstrained minimum-norm solution.
//------------------------------------------------------------------------------

#include <optional>
#include <vector>

#include "polyproj/escape.hpp"
#include "polyproj/image.hpp"

namespace polyproj {

struct ReducedProblem {
  Matrix k;       // lower triangular Cholesky factor
  Vector target;  // p
  std::optional<PolyhedronH> poly;  // nullopt: the reduced problem is unconstrained
  bool singular = false;
  std::optional<RankLU> factor;  // of A, singular case only
  IneqSystem image;              // constraints on z = U x, singular case only
  Matrix orig_b;                 // original constraints, equalities split into two rows
  Vector orig_c;
  Vector rhs;  // original b

  Index dim() const { return k.rows(); }

  /// y for a point x of the original space.
  Vector y_from_x(const Vector& x) const {
    if (singular) return k.transpose() * (factor->u * x);
    return k.transpose() * x;
  }
};

namespace detail {

inline void check_cls_dims(const Matrix& a, const Vector& b, const PolyhedronH& poly) {
  if (a.rows() != b.size()) throw Error(ErrorCode::DimensionMismatch, "A rows and b length differ");
  if (a.cols() != poly.dim()) throw Error(ErrorCode::DimensionMismatch, "A columns and polyhedron dimension differ");
  if (!a.allFinite() || !b.allFinite()) throw Error(ErrorCode::InvalidInput, "non-finite least squares data");
}

// X with X K^T = M, i.e. K X^T = M^T.
inline Matrix right_solve_kt(const Matrix& k, const Matrix& m) {
  return forward_substitute(k, Matrix(m.transpose())).transpose();
}

inline std::pair<Matrix, Vector> inequality_form(const PolyhedronH& p) {
  if (!p.has_equalities()) return {p.a(), p.b()};
  const Index k = p.rows();
  const Index e = p.eq_a().rows();
  Matrix b(k + 2 * e, p.dim());
  Vector c(k + 2 * e);
  b << p.a(), p.eq_a(), -p.eq_a();
  c << p.b(), p.eq_b(), -p.eq_b();
  return {std::move(b), std::move(c)};
}

}  // namespace detail

inline ReducedProblem reduce_nonsingular(const Matrix& a, const Vector& b, const PolyhedronH& poly) {
  detail::check_cls_dims(a, b, poly);
  if (numerical_rank(a) < a.cols()) {
    throw Error(ErrorCode::RankDeficient, "A lacks full column rank; use the singular reduction");
  }
  ReducedProblem rp;
  try {
    rp.k = cholesky_spd(a.transpose() * a);
  } catch (const Error&) {
    throw Error(ErrorCode::RankDeficient, "A^T A is not numerically positive definite");
  }
  rp.target = forward_substitute(rp.k, Vector(a.transpose() * b));
  const Matrix ai = detail::right_solve_kt(rp.k, poly.a());
  if (poly.has_equalities()) {
    rp.poly.emplace(ai, poly.b(), detail::right_solve_kt(rp.k, poly.eq_a()), poly.eq_b(), poly.tolerances());
  } else {
    rp.poly.emplace(ai, poly.b(), poly.tolerances());
  }
  std::tie(rp.orig_b, rp.orig_c) = detail::inequality_form(poly);
  rp.rhs = b;
  return rp;
}

inline ReducedProblem reduce_singular(const Matrix& a, const Vector& b, const PolyhedronH& poly,
                                      const PivotPolicy& pivot = {}) {
  detail::check_cls_dims(a, b, poly);
  RankLU f = rank_lu(a, pivot);
  if (f.rank == 0) throw Error(ErrorCode::InvalidInput, "A is zero");
  if (f.rank == a.cols()) throw Error(ErrorCode::InvalidInput, "A has full column rank; use the nonsingular reduction");

  ReducedProblem rp;
  rp.singular = true;
  rp.k = cholesky_spd(f.l.transpose() * f.l);
  rp.target = forward_substitute(rp.k, Vector(f.l.transpose() * f.permute(b)));
  std::tie(rp.orig_b, rp.orig_c) = detail::inequality_form(poly);
  rp.image = corank_reduced_constraints(rp.orig_b, rp.orig_c, f);
  if (!rp.image.empty_marker) {
    rp.poly.emplace(detail::right_solve_kt(rp.k, rp.image.b), rp.image.c, poly.tolerances());
  }
  rp.factor = std::move(f);
  rp.rhs = b;
  return rp;
}

/// Dispatches on the numerical rank of A.
inline ReducedProblem reduce(const Matrix& a, const Vector& b, const PolyhedronH& poly, const PivotPolicy& pivot = {}) {
  detail::check_cls_dims(a, b, poly);
  if (numerical_rank(a) == a.cols()) return reduce_nonsingular(a, b, poly);
  return reduce_singular(a, b, poly, pivot);
}

struct ReducedSolve {
  Vector y;
  std::optional<Solution> solution;  // absent when the target is feasible or unconstrained
};

/// Nearest point of the reduced polyhedron to the reduced target, starting
/// from the visible point on the ray from the origin (or from `hint`, an
/// original-space feasible point, when the origin is infeasible).
inline ReducedSolve solve_reduced(const ReducedProblem& rp, const EnumeratorConfig& cfg = {},
                                  const std::optional<Vector>& hint = std::nullopt) {
  if (!rp.poly || contains(*rp.poly, rp.target)) return {rp.target, std::nullopt};
  const PolyhedronH& p = *rp.poly;
  Vector base = Vector::Zero(rp.dim());
  if (!contains(p, base)) {
    if (hint) {
      base = rp.y_from_x(*hint);
    } else {
      auto [fb, fc] = detail::inequality_form(p);
      auto found = fme_feasible_point(IneqSystem{std::move(fb), std::move(fc), false});
      if (!found) throw Error(ErrorCode::InfeasibleSystem, "reduced polyhedron is empty");
      base = *found;
    }
    if (!contains(p, base)) throw Error(ErrorCode::StartNotVisible, "no feasible start for the reduced problem");
  }
  const Vector start = p.has_equalities() ? base : visible_point(p, base, rp.target);
  Solution sol = solve(p, rp.target, start, cfg);
  Vector y = sol.point;
  return {std::move(y), std::move(sol)};
}

struct Recovery {
  Vector z;  // U x, singular case; x itself otherwise
  AffineMap map;
  IneqSystem param_system;  // (B N) t <= c - B x0, vacuous rows removed
  std::optional<PolyhedronH> param_poly;  // nullopt: no row restricts t
};

inline Recovery recover_solution(const ReducedProblem& rp, const Vector& y_star) {
  if (y_star.size() != rp.dim()) throw Error(ErrorCode::DimensionMismatch, "reduced solution length");
  Recovery rec;
  rec.z = back_substitute_transposed(rp.k, y_star);
  if (!rp.singular) {
    rec.map = {rec.z, Matrix(rec.z.size(), 0), {}};
    rec.param_system = IneqSystem::unconstrained(0);
    return rec;
  }
  rec.map = parametric_preimage(*rp.factor, rec.z);
  const Matrix bn = rp.orig_b * rec.map.dirs;
  const Vector rest = rp.orig_c - rp.orig_b * rec.map.base;
  IndexList keep;
  for (Index i = 0; i < bn.rows(); ++i) {
    if (bn.row(i).norm() > kFmeZeroRelTol * rp.orig_b.row(i).norm() * (1.0 + rec.map.dirs.norm())) {
      keep.push_back(i);
    } else if (rest(i) < -1e-7 * (1.0 + std::abs(rp.orig_c(i)))) {
      throw Error(ErrorCode::EmptyParameterPolyhedron, "row " + std::to_string(i) + " fails for every parameter value");
    }
  }
  rec.param_system = {select_rows(bn, keep), select_entries(rest, keep), keep.empty()};
  if (keep.empty()) {
    rec.param_system.b.resize(0, rec.map.params());
  } else {
    rec.param_poly.emplace(rec.param_system.b, rec.param_system.c);
  }
  return rec;
}

struct ParameterFit {
  Vector t;
  Vector x;
  std::optional<Solution> solution;  // trace of the inner solve, in reduced t coordinates
};

/// Point x0 + N t, t in param_poly, nearest to x_ref.
inline ParameterFit solve_parameter_fit(const AffineMap& map, const std::optional<PolyhedronH>& param_poly,
                                        const Vector& x_ref, const EnumeratorConfig& cfg = {}) {
  if (x_ref.size() != map.dim()) throw Error(ErrorCode::DimensionMismatch, "reference point length");
  ParameterFit fit;
  const Index f = map.params();
  if (f == 0) {
    fit.t = Vector(0);
    fit.x = map.base;
    return fit;
  }
  if (param_poly && param_poly->dim() != f) throw Error(ErrorCode::DimensionMismatch, "parameter polyhedron dimension");
  const Vector rhs = x_ref - map.base;
  const Matrix kn = cholesky_spd(map.dirs.transpose() * map.dirs);

  if (!param_poly) {
    fit.t = cholesky_solve(kn, Vector(map.dirs.transpose() * rhs));
  } else {
    const auto feasible = fme_feasible_point(IneqSystem{param_poly->a(), param_poly->b(), false});
    if (!feasible) throw Error(ErrorCode::EmptyParameterPolyhedron, "no parameter value satisfies the constraints");
    const ReducedProblem rp = reduce_nonsingular(map.dirs, rhs, *param_poly);
    ReducedSolve rs = solve_reduced(rp, cfg, *feasible);
    fit.t = back_substitute_transposed(rp.k, rs.y);
    fit.solution = std::move(rs.solution);
  }
  fit.x = map(fit.t);
  return fit;
}

struct ClsOptions {
  EnumeratorConfig enumerator;
  PivotPolicy pivot;
};

struct ClsReport {
  Vector solution;
  double residual = 0.0;
  Vector unconstrained;  // minimum-norm least squares solution
  double unconstrained_residual = 0.0;
  Index rank = 0;
  ReducedProblem reduced;
  Vector y_star;
  std::optional<Solution> trace;  // reduced-space iterates
  Recovery recovery;
  std::optional<ParameterFit> fit;  // singular case only

  bool singular() const { return reduced.singular; }
};

inline ClsReport solve_cls(const Matrix& a, const Vector& b, const PolyhedronH& poly, const ClsOptions& opt = {}) {
  detail::check_cls_dims(a, b, poly);
  ClsReport rep;
  const RankLU fa = rank_lu(a);
  if (fa.rank == 0) throw Error(ErrorCode::InvalidInput, "A is zero");
  rep.rank = fa.rank;
  rep.unconstrained = min_norm_solution(fa, b);
  rep.unconstrained_residual = (a * rep.unconstrained - b).norm();

  rep.reduced = fa.rank == a.cols() ? reduce_nonsingular(a, b, poly) : reduce_singular(a, b, poly, opt.pivot);
  ReducedSolve rs = solve_reduced(rep.reduced, opt.enumerator);
  rep.y_star = rs.y;
  rep.trace = std::move(rs.solution);
  rep.recovery = recover_solution(rep.reduced, rep.y_star);
  if (rep.reduced.singular) {
    rep.fit = solve_parameter_fit(rep.recovery.map, rep.recovery.param_poly, rep.unconstrained, opt.enumerator);
    rep.solution = rep.fit->x;
  } else {
    rep.solution = rep.recovery.z;
  }
  rep.residual = (a * rep.solution - b).norm();
  return rep;
}

}  // namespace polyproj

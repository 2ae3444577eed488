#pragma once
// Brute-force nearest point for small polyhedra: the minimizer is the
// projection of the target onto the affine hull of some face, so trying every
// subset of rows as a tight set and keeping the best feasible candidate is exact.

#include <bit>
#include <limits>
#include <optional>

#include "polyproj/polyhedron.hpp"

namespace polyproj {

inline constexpr Index kOracleMaxRows = 14;
inline constexpr Index kOracleMaxDim = 6;

/// nullopt when the polyhedron is empty.
inline std::optional<Vector> try_nearest_point_oracle(const PolyhedronH& p, const Vector& target) {
  check_dim(p, target);
  if (p.rows() > kOracleMaxRows || p.dim() > kOracleMaxDim) {
    throw Error(ErrorCode::TooLarge, "oracle is limited to 14 rows in at most 6 dimensions");
  }
  if (contains(p, target)) return target;

  const Index k = p.rows();
  const Index n = p.dim();
  const Index neq = p.has_equalities() ? p.eq_a().rows() : 0;

  std::optional<Vector> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (unsigned long mask = 0; mask < (1UL << k); ++mask) {
    const Index tight = static_cast<Index>(std::popcount(mask));
    Matrix m(neq + tight, n);
    Vector rhs(neq + tight);
    if (neq > 0) {
      m.topRows(neq) = p.eq_a();
      rhs.head(neq) = p.eq_b();
    }
    Index row = neq;
    for (Index i = 0; i < k; ++i) {
      if (mask & (1UL << i)) {
        m.row(row) = p.a().row(i);
        rhs(row) = p.b()(i);
        ++row;
      }
    }

    Vector x = target;
    if (m.rows() > 0) {
      try {
        x -= min_norm_solution(rank_lu(m), m * target - rhs);
      } catch (const Error& e) {
        // Nearly dependent rows; a well-conditioned subset spans the same face.
        if (e.code() != ErrorCode::NotPositiveDefinite) throw;
        continue;
      }
      if ((m * x - rhs).norm() > 1e-8 * (1.0 + rhs.norm())) continue;  // inconsistent tight set
    }
    if (!contains(p, x)) continue;
    const double d = (x - target).norm();
    if (d < best_dist) {
      best_dist = d;
      best = x;
    }
  }
  return best;
}

inline Vector nearest_point_oracle(const PolyhedronH& p, const Vector& target) {
  auto x = try_nearest_point_oracle(p, target);
  if (!x) throw Error(ErrorCode::InfeasibleSystem, "polyhedron is empty");
  return *x;
}

}  // namespace polyproj

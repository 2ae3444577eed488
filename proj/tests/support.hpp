#pragma once
// Shared fixtures: the sample data set, reference values, random instances.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <string>

#include "polyproj/cls.hpp"
#include "polyproj/io.hpp"
#include "polyproj/oracle.hpp"

namespace testing_support {

using polyproj::Index;
using polyproj::Matrix;
using polyproj::PolyhedronH;
using polyproj::Vector;

inline std::string data_path(const std::string& name) { return std::string(POLYPROJ_DATA_DIR) + "/" + name; }

struct LsData {
  Matrix a;
  Vector b;
};

/// First `rows` rows of the shipped 25 x 4 sample (all when rows == 0).
inline LsData sample_data(Index rows = 0) {
  const Matrix m = polyproj::read_csv_matrix(data_path("sample.csv"));
  const Index r = rows > 0 ? rows : m.rows();
  return {m.topLeftCorner(r, 4), m.col(4).head(r)};
}

inline PolyhedronH upper_box(Index n, double u) { return PolyhedronH(Matrix::Identity(n, n), Vector::Constant(n, u)); }

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

inline double max_abs_diff(const Vector& x, const Vector& y) { return (x - y).cwiseAbs().maxCoeff(); }

// Reference values, four decimal places.
namespace ref {
inline const Vector kFullBoxed = vec({2.0, 2.0, 0.7122, 0.1321});
inline const Vector kFullUnconstrained = vec({2.9756, 2.4386, 1.3741, -0.2178});
inline const double kFullFinalDistance = 54.6331;
inline const Vector kThreeRowBoxed = vec({2.0, 2.0, 2.0, -1.1347});
inline const Vector kThreeRowUnconstrained = vec({5.5883, 0.1383, 1.8019, -1.2494});
inline const double kX3 = -1.13466536;
inline const double kThreeRowFinalDistance = 75.4254;
inline const Vector kThreeRowEndpoint = vec({60.538, 36.588, 20.629});
inline const Vector kThreeRowZ = vec({4.2837, 2.4548, 3.0407});
inline const Vector kTwoRowZ = vec({6.4186, 11.3591});
inline const Vector kTwoRowBoxed = vec({2.0, 2.0, -0.6388, -2.5655});
inline const Vector kTwoRowUnconstrained = vec({2.2115, 1.9857, -0.4311, -2.4210});

inline Matrix three_row_u() {
  Matrix u(3, 4);
  u << 1, 0.8706, -0.2811, -0.9736, 0, 1, -0.4255, -1.1509, 0, 0, 1, -0.9172;
  return u;
}
inline Matrix three_row_l() {
  Matrix l(3, 3);
  l << -14.6785, 0, 0, 16.8958, -19.7627, 0, -1.0007, -1.9354, -6.9264;
  return l;
}
/// Rows over (z0, z1, z2 | rhs), each with |z2 coefficient| = 1.
inline Matrix three_row_reduced() {
  Matrix r(3, 4);
  r << 16.9735, -13.5625, -1, 36.3762, 32.3847, -28.1941, 1, 72.5577, 11.1899, -9.7419, -1, 24.8479;
  return r;
}
inline Matrix two_row_u() {
  Matrix u(2, 4);
  u << 1, 0.8706, -0.2811, -0.9736, 0, 1, 3.1533, -4.4333;
  return u;
}
inline Matrix two_row_l() {
  Matrix l(2, 2);
  l << -14.6785, 0, -1.0007, -1.9354;
  return l;
}
/// Rows over (t0, t1 | rhs), each with |t0 coefficient| = 1.
inline Matrix two_row_param_rows() {
  Matrix r(2, 3);
  r << 1, -0.9536, 1.8077, -1, 1.4059, -2.9681;
  return r;
}
}  // namespace ref

/// Each row of `rows` (coefficients | rhs) scaled so |coefficient col| = 1.
inline Matrix normalize_rows_by(const Matrix& b, const Vector& c, Index col) {
  Matrix out(b.rows(), b.cols() + 1);
  for (Index i = 0; i < b.rows(); ++i) {
    const double s = std::abs(b(i, col));
    out.row(i) << b.row(i) / s, c(i) / s;
  }
  return out;
}

/// True when every row of `want` is within tol of some row of `have`.
inline bool rows_contained(const Matrix& want, const Matrix& have, double tol) {
  for (Index i = 0; i < want.rows(); ++i) {
    bool found = false;
    for (Index j = 0; j < have.rows() && !found; ++j) {
      if (!have.row(j).allFinite()) continue;
      found = (want.row(i) - have.row(j)).cwiseAbs().maxCoeff() <= tol;
    }
    if (!found) return false;
  }
  return true;
}

//------------------------------------------------------------------------------
// Random instances (test-only generator; the library RNG lives in bench.hpp).
//------------------------------------------------------------------------------

using Rng = std::mt19937_64;

inline Vector normal_vector(Index n, Rng& rng) {
  std::normal_distribution<double> nd;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = nd(rng);
  return v;
}

inline Matrix normal_matrix(Index r, Index c, Rng& rng) {
  std::normal_distribution<double> nd;
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = nd(rng);
  return m;
}

/// Bounded polytope: a box [-1, 1]^n plus `extra` random cuts at positive
/// offset, so the origin is interior.
inline PolyhedronH random_polytope(Index n, Index extra, Rng& rng) {
  std::uniform_real_distribution<double> off(0.2, 1.0);
  Matrix a(2 * n + extra, n);
  Vector b(2 * n + extra);
  a.topRows(n) = Matrix::Identity(n, n);
  a.middleRows(n, n) = -Matrix::Identity(n, n);
  b.head(2 * n).setOnes();
  for (Index i = 0; i < extra; ++i) {
    a.row(2 * n + i) = normal_vector(n, rng).normalized().transpose();
    b(2 * n + i) = off(rng);
  }
  return PolyhedronH(std::move(a), std::move(b));
}

/// A random point outside p at distance 1..4 from the origin.
inline Vector random_outside(const PolyhedronH& p, Rng& rng) {
  std::uniform_real_distribution<double> r(1.0, 4.0);
  for (;;) {
    Vector q = normal_vector(p.dim(), rng).normalized() * r(rng);
    if (!polyproj::contains(p, q)) return q;
  }
}

/// Matrix of the given rank with entries of moderate size.
inline Matrix random_rank_matrix(Index rows, Index cols, Index rank, Rng& rng) {
  return normal_matrix(rows, rank, rng) * normal_matrix(rank, cols, rng);
}

/// Is there x in P with lambda x = z?  Every nonempty polyhedron contains the
/// projection of a point onto the affine hull of one of its faces, so trying
/// each subset of tight rows (with lambda x = z always imposed) decides it.
inline bool preimage_feasible(const PolyhedronH& p, const Matrix& lambda, const Vector& z) {
  const PolyhedronH slice(p.a(), p.b(), lambda, z, p.tolerances());
  const Index k = p.rows();
  const Index n = p.dim();
  const Index neq = lambda.rows();
  const Vector anchor = Vector::Constant(n, 1e3);
  for (unsigned long mask = 0; mask < (1UL << k); ++mask) {
    Matrix m(neq, n);
    Vector rhs(neq);
    m = lambda;
    rhs = z;
    for (Index i = 0; i < k; ++i) {
      if (!(mask & (1UL << i))) continue;
      m.conservativeResize(m.rows() + 1, Eigen::NoChange);
      rhs.conservativeResize(rhs.size() + 1);
      m.row(m.rows() - 1) = p.a().row(i);
      rhs(rhs.size() - 1) = p.b()(i);
    }
    Vector x;
    try {
      x = anchor - polyproj::min_norm_solution(polyproj::rank_lu(m), m * anchor - rhs);
    } catch (const polyproj::Error&) {
      continue;  // nearly dependent rows; a better-conditioned subset covers the same face
    }
    if ((m * x - rhs).norm() > 1e-8 * (1.0 + rhs.norm())) continue;
    if (polyproj::contains(slice, x)) return true;
  }
  return false;
}

}  // namespace testing_support

#include <gtest/gtest.h>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "support.hpp"

using namespace polyproj;
using namespace testing_support;

namespace {

Matrix reconstruct_perm(const Matrix& a, const RankLU& f) { return a(f.perm, Eigen::all); }

void expect_factor_invariants(const Matrix& a, const RankLU& f) {
  ASSERT_EQ(f.l.rows(), a.rows());
  ASSERT_EQ(f.l.cols(), f.rank);
  ASSERT_EQ(f.u.rows(), f.rank);
  ASSERT_EQ(f.u.cols(), a.cols());
  const double scale = std::max(1.0, a.norm());
  EXPECT_LE((reconstruct_perm(a, f) - f.l * f.u).norm(), 1e-10 * scale);
  for (Index i = 0; i < f.rank; ++i) {
    const Index g = f.gamma[static_cast<std::size_t>(i)];
    EXPECT_EQ(f.u(i, g), 1.0);
    for (Index j = 0; j < g; ++j) EXPECT_EQ(f.u(i, j), 0.0);
    if (i > 0) EXPECT_GT(g, f.gamma[static_cast<std::size_t>(i - 1)]);
    for (Index k = 0; k < i; ++k) EXPECT_EQ(f.l(k, i), 0.0);  // truncated lower triangular
  }
}

}  // namespace

TEST(RankLU, SingularThreeRowExplicitOrder) {
  const LsData d = sample_data(3);
  const RankLU f = rank_lu(d.a, PivotPolicy::explicit_order({1, 2, 0}));
  EXPECT_EQ(f.rank, 3);
  EXPECT_LE((f.u - ref::three_row_u()).cwiseAbs().maxCoeff(), 5e-4);
  EXPECT_LE((f.l - ref::three_row_l()).cwiseAbs().maxCoeff(), 5e-4);
  expect_factor_invariants(d.a, f);
}

TEST(RankLU, SingularTwoRowExplicitOrder) {
  const LsData d = sample_data(2);
  const RankLU f = rank_lu(d.a, PivotPolicy::explicit_order({1, 0}));
  EXPECT_EQ(f.rank, 2);
  EXPECT_LE((f.u - ref::two_row_u()).cwiseAbs().maxCoeff(), 5e-4);
  EXPECT_LE((f.l - ref::two_row_l()).cwiseAbs().maxCoeff(), 5e-4);
}

TEST(RankLU, IdentityAndZero) {
  const RankLU f = rank_lu(Matrix::Identity(3, 3));
  EXPECT_EQ(f.rank, 3);
  EXPECT_EQ(f.gamma, (IndexList{0, 1, 2}));
  const RankLU z = rank_lu(Matrix::Zero(2, 3));
  EXPECT_EQ(z.rank, 0);
  EXPECT_EQ(z.u.rows(), 0);
  EXPECT_EQ(z.free_columns(), (IndexList{0, 1, 2}));
}

TEST(RankLU, SkipsZeroColumn) {
  Matrix a(2, 3);
  a << 0, 1, 2, 0, 2, 4;
  const RankLU f = rank_lu(a);
  EXPECT_EQ(f.rank, 1);
  EXPECT_EQ(f.gamma, (IndexList{1}));
  expect_factor_invariants(a, f);
}

TEST(RankLU, RandomRankTwoAgainstSvd) {
  Rng rng(3);
  for (int it = 0; it < 50; ++it) {
    const Matrix a = normal_vector(6, rng) * normal_vector(4, rng).transpose() +
                     normal_vector(6, rng) * normal_vector(4, rng).transpose();
    const RankLU f = rank_lu(a);
    Eigen::JacobiSVD<Matrix> svd(a);
    svd.setThreshold(1e-10);
    EXPECT_EQ(f.rank, svd.rank());
    EXPECT_EQ(f.rank, 2);
    expect_factor_invariants(a, f);
  }
}

TEST(RankLU, RandomShapesAgainstQr) {
  Rng rng(4);
  std::uniform_int_distribution<int> dim(1, 7);
  for (int it = 0; it < 200; ++it) {
    const Index m = dim(rng), n = dim(rng);
    const Index r = std::min<Index>({m, n, dim(rng)});
    const Matrix a = random_rank_matrix(m, n, r, rng);
    const RankLU f = rank_lu(a);
    Eigen::ColPivHouseholderQR<Matrix> qr(a);
    qr.setThreshold(1e-10);
    EXPECT_EQ(f.rank, qr.rank());
    expect_factor_invariants(a, f);
  }
}

TEST(RankLU, ExplicitOrderValidation) {
  Matrix a(2, 2);
  a << 0, 1, 1, 0;
  EXPECT_THROW(rank_lu(a, PivotPolicy::explicit_order({0})), Error);
  EXPECT_THROW(rank_lu(a, PivotPolicy::explicit_order({0, 0})), Error);
  try {
    rank_lu(a, PivotPolicy::explicit_order({0, 1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ExplicitOrderSingular);
  }
  EXPECT_EQ(rank_lu(a, PivotPolicy::explicit_order({1, 0})).rank, 2);
}

TEST(RankLU, RejectsNonFinite) {
  Matrix a = Matrix::Identity(2, 2);
  a(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(rank_lu(a), Error);
}

TEST(Cholesky, HandExample) {
  Matrix m(2, 2);
  m << 4, 2, 2, 2;
  Matrix k(2, 2);
  k << 2, 0, 1, 1;
  EXPECT_LE((cholesky_spd(m) - k).norm(), 1e-15);
}

TEST(Cholesky, ReadsLowerTriangleOnly) {
  Matrix m(2, 2);
  m << 4, 999, 2, 2;
  Matrix k(2, 2);
  k << 2, 0, 1, 1;
  EXPECT_LE((cholesky_spd(m) - k).norm(), 1e-15);
}

TEST(Cholesky, GramOfThreeRowL) {
  const Matrix l = rank_lu(sample_data(3).a, PivotPolicy::explicit_order({1, 2, 0})).l;
  const Matrix g = l.transpose() * l;
  const Matrix k = cholesky_spd(g);
  EXPECT_LE((k * k.transpose() - g).norm(), 1e-10 * g.norm());
  EXPECT_TRUE(k.isLowerTriangular());
}

TEST(Cholesky, RejectsIndefinite) {
  Matrix m(2, 2);
  m << 1, 2, 2, 1;
  try {
    cholesky_spd(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPositiveDefinite);
  }
  EXPECT_THROW(cholesky_spd(Matrix::Zero(2, 2)), Error);
  EXPECT_THROW(cholesky_spd(Matrix::Zero(2, 3)), Error);
}

TEST(Triangular, SolvesAgainstEigen) {
  Rng rng(5);
  for (int it = 0; it < 20; ++it) {
    const Matrix a = normal_matrix(6, 4, rng);
    const Matrix k = cholesky_spd(a.transpose() * a);
    const Vector b = normal_vector(4, rng);
    const Vector x = forward_substitute(k, b);
    EXPECT_LE((k * x - b).norm(), 1e-10 * (1 + b.norm()));
    const Vector y = back_substitute_transposed(k, b);
    EXPECT_LE((k.transpose() * y - b).norm(), 1e-10 * (1 + b.norm()));
    const Vector s = cholesky_solve(k, b);
    const Vector ref = (a.transpose() * a).ldlt().solve(b);
    EXPECT_LE((s - ref).norm(), 1e-9 * (1 + ref.norm()));
  }
}

TEST(PinvProjection, AxisExample) {
  Matrix a(1, 2);
  a << 1, 0;
  const Vector p = pinv_projection(rank_lu(a), vec({3, 4}));
  EXPECT_LE(max_abs_diff(p, vec({3, 0})), 1e-15);
}

TEST(PinvProjection, FullRankIsIdentity) {
  Matrix a(2, 2);
  a << 1, 2, 3, 5;
  const Vector v = vec({0.3, -7});
  EXPECT_LE(max_abs_diff(pinv_projection(rank_lu(a), v), v), 1e-12);
}

TEST(PinvProjection, PropertiesAgainstSvd) {
  Rng rng(6);
  for (int it = 0; it < 100; ++it) {
    const Index m = 1 + it % 5, n = 2 + it % 5;
    const Matrix a = random_rank_matrix(m, n, std::min(m, n) - (it % 2 && std::min(m, n) > 1 ? 1 : 0), rng);
    const RankLU f = rank_lu(a);
    const Vector v = normal_vector(n, rng).normalized();
    const Vector p = pinv_projection(f, v);
    const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
    const Vector ref = cod.pseudoInverse() * (a * v);
    EXPECT_LE((p - ref).norm(), 1e-9);
    EXPECT_LE((pinv_projection(f, p) - p).norm(), 1e-12);   // idempotent
    EXPECT_LE((a * (v - p)).cwiseAbs().maxCoeff(), 1e-10 * (1 + a.norm()));  // residual orthogonal to rows
  }
}

TEST(MinNorm, FullColumnRankMatchesLeastSquares) {
  const LsData d = sample_data();
  const Vector x = min_norm_solution(rank_lu(d.a), d.b);
  const Vector ref = d.a.colPivHouseholderQr().solve(d.b);
  EXPECT_LE((x - ref).norm(), 1e-9 * ref.norm());
}

TEST(MinNorm, UnconstrainedRowsForRankDeficientSamples) {
  const LsData d3 = sample_data(3);
  EXPECT_LE(max_abs_diff(min_norm_solution(rank_lu(d3.a), d3.b), ref::kThreeRowUnconstrained), 5e-4);
  const LsData d2 = sample_data(2);
  EXPECT_LE(max_abs_diff(min_norm_solution(rank_lu(d2.a), d2.b), ref::kTwoRowUnconstrained), 5e-4);
}

TEST(MinNorm, AgainstCompleteOrthogonalDecomposition) {
  Rng rng(8);
  for (int it = 0; it < 100; ++it) {
    const Index m = 2 + it % 5, n = 2 + (it / 5) % 5;
    const Index r = 1 + it % std::min(m, n);
    const Matrix a = random_rank_matrix(m, n, r, rng);
    const Vector b = normal_vector(m, rng);
    const RankLU f = rank_lu(a);
    const Vector x = min_norm_solution(f, b);
    const Vector ref = a.completeOrthogonalDecomposition().solve(b);
    EXPECT_LE((x - ref).norm(), 1e-8 * (1 + ref.norm()));
    const Matrix nb = null_space_basis(f.u);
    for (Index j = 0; j < nb.cols(); ++j) EXPECT_LE(std::abs(nb.col(j).dot(x)), 1e-8 * (1 + x.norm()));
  }
}

TEST(Suspension, Structure) {
  Matrix u(2, 4);
  u << 1, 2, 3, 4, 0, 0, 1, 5;
  const Matrix s = suspension(u, IndexList{0, 2});
  Matrix want(4, 4);
  want << 1, 2, 3, 4, 0, 1, 0, 0, 0, 0, 1, 5, 0, 0, 0, 1;
  EXPECT_EQ(s, want);
  EXPECT_TRUE(s.isUpperTriangular());
  EXPECT_THROW(suspension(u, IndexList{0}), Error);
}

TEST(Suspension, FreeRowsAreExactUnitRows) {
  const RankLU f = rank_lu(sample_data(2).a);
  const Matrix s = suspension(f.u, f.gamma);
  for (Index c : f.free_columns()) EXPECT_EQ(Vector(s.row(c).transpose()), Vector(Vector::Unit(4, c)));
  EXPECT_GT(std::abs(s.determinant()), 0.5);
}

TEST(ParametricPreimage, ThreeRowSample) {
  const RankLU f = rank_lu(sample_data(3).a, PivotPolicy::explicit_order({1, 2, 0}));
  const AffineMap m = parametric_preimage(f, ref::kThreeRowZ);
  EXPECT_EQ(m.free_idx, (IndexList{3}));
  EXPECT_LE(max_abs_diff(m.base, vec({1.8749, 3.7487, 3.0409, 0})), 1e-3);
  EXPECT_LE(max_abs_diff(Vector(m.dirs.col(0)), vec({-0.1103, 1.5412, 0.9172, 1})), 5e-4);
}

TEST(ParametricPreimage, TwoRowSample) {
  const RankLU f = rank_lu(sample_data(2).a, PivotPolicy::explicit_order({1, 0}));
  const AffineMap m = parametric_preimage(f, ref::kTwoRowZ);
  EXPECT_EQ(m.free_idx, (IndexList{2, 3}));
  EXPECT_LE(max_abs_diff(m.base, vec({-3.4706, 11.3591, 0, 0})), 5e-4);
  EXPECT_LE(max_abs_diff(Vector(m.dirs.col(0)), vec({3.0263, -3.1533, 1, 0})), 5e-4);
  EXPECT_LE(max_abs_diff(Vector(m.dirs.col(1)), vec({-2.8860, 4.4333, 0, 1})), 5e-4);
}

TEST(ParametricPreimage, MapsOntoZ) {
  Rng rng(9);
  for (int it = 0; it < 50; ++it) {
    const Matrix a = random_rank_matrix(3, 5, 1 + it % 3, rng);
    const RankLU f = rank_lu(a);
    const Vector z = normal_vector(f.rank, rng);
    const AffineMap m = parametric_preimage(f, z);
    EXPECT_EQ(m.params(), 5 - f.rank);
    for (int k = 0; k < 10; ++k) {
      const Vector t = normal_vector(m.params(), rng);
      EXPECT_LE((f.u * m(t) - z).cwiseAbs().maxCoeff(), 1e-10 * (1 + z.norm() + t.norm()));
    }
  }
  const RankLU f = rank_lu(Matrix::Identity(2, 2));
  EXPECT_THROW(parametric_preimage(f, vec({1})), Error);
}

TEST(NullSpace, Examples) {
  Matrix a(1, 2);
  a << 1, 0;
  const Matrix n = null_space_basis(a);
  ASSERT_EQ(n.cols(), 1);
  EXPECT_NEAR(std::abs(n(1, 0)), 1.0, 1e-15);
  EXPECT_EQ(null_space_basis(Matrix::Identity(3, 3)).cols(), 0);
  EXPECT_EQ(null_space_basis(Matrix(0, 3)).cols(), 3);
}

TEST(NullSpace, OrthonormalAndAnnihilated) {
  Rng rng(10);
  for (int it = 0; it < 100; ++it) {
    const Index m = 1 + it % 4, n = 2 + it % 5;
    const Matrix a = random_rank_matrix(m, n, 1 + it % std::min(m, n), rng);
    const Matrix nb = null_space_basis(a);
    Eigen::FullPivLU<Matrix> lu(a);
    lu.setThreshold(1e-10);
    EXPECT_EQ(nb.cols(), n - lu.rank());
    if (nb.cols() == 0) continue;
    EXPECT_LE((nb.transpose() * nb - Matrix::Identity(nb.cols(), nb.cols())).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((a * nb).cwiseAbs().maxCoeff(), 1e-10 * (1 + a.norm()));
  }
}

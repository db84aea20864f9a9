#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "svtreg/matrix_core.hpp"
#include "svtreg/rng.hpp"

using namespace svtreg;

namespace {

Matrix random_matrix(Index n, Index p, Rng& rng) {
  Matrix m(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) m(i, j) = rng.normal();
  return m;
}

}  // namespace

TEST_CASE("thin_svd on diagonal and zero matrices") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3;
  d(1, 1) = 1;
  const auto f = thin_svd(d);
  CHECK(f.d(0) == doctest::Approx(3).epsilon(1e-12));
  CHECK(f.d(1) == doctest::Approx(1).epsilon(1e-12));
  CHECK((f.u * f.d.asDiagonal() * f.v.transpose() - d).norm() < 1e-10);

  const auto z = thin_svd(Matrix::Zero(2, 2));
  CHECK(z.d(0) == 0);
  CHECK(z.d(1) == 0);
}

TEST_CASE("thin_svd reconstruction and eigenvalue cross-check") {
  Rng rng(11);
  const Matrix m = random_matrix(5, 3, rng);
  const auto f = thin_svd(m);
  CHECK((f.u * f.d.asDiagonal() * f.v.transpose() - m).norm() <=
        1e-10 * m.norm());
  CHECK((f.u.transpose() * f.u - Matrix::Identity(3, 3)).norm() < 1e-10);
  CHECK((f.v.transpose() * f.v - Matrix::Identity(3, 3)).norm() < 1e-10);
  // singular values sorted non-increasing
  CHECK(f.d(0) >= f.d(1));
  CHECK(f.d(1) >= f.d(2));
  // d_i^2 match the eigenvalues of m'm from an independent solver
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.transpose() * m);
  Vector ev = es.eigenvalues().reverse();
  for (Index i = 0; i < 3; ++i) {
    CHECK(f.d(i) * f.d(i) == doctest::Approx(ev(i)).epsilon(1e-9));
  }
}

TEST_CASE("thin_svd sign canonicalization is bit-reproducible") {
  Rng rng(5);
  const Matrix m = random_matrix(6, 4, rng);
  const auto a = thin_svd(m);
  const auto b = thin_svd(m);
  CHECK(a.u == b.u);
  CHECK(a.v == b.v);
  for (Index j = 0; j < a.u.cols(); ++j) {
    Index i = 0;
    while (i < a.u.rows() && std::abs(a.u(i, j)) <= 1e-12) ++i;
    if (i < a.u.rows()) CHECK(a.u(i, j) > 0);
  }
}

TEST_CASE("sym_eig basics and residual") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 4;
  d(1, 1) = 1;
  auto [lam, vec] = sym_eig(d);
  CHECK(lam(0) == doctest::Approx(4));
  CHECK(lam(1) == doctest::Approx(1));

  auto [li, vi] = sym_eig(Matrix::Identity(3, 3));
  for (Index i = 0; i < 3; ++i) CHECK(li(i) == doctest::Approx(1));

  Rng rng(3);
  Matrix a = random_matrix(3, 3, rng);
  a = Matrix(a + a.transpose());
  auto [l2, v2] = sym_eig(a);
  const Matrix diag = v2.transpose() * a * v2;
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j)
      if (i != j) CHECK(std::abs(diag(i, j)) < 1e-8 * a.norm());
  CHECK(l2(0) >= l2(1));
  CHECK(l2(1) >= l2(2));
}

TEST_CASE("sym_eig rejects asymmetric input") {
  Matrix a(2, 2);
  a << 1, 2, 3, 4;
  CHECK_THROWS_AS(sym_eig(a), contract_error);
}

TEST_CASE("pseudo_inverse identities") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2;
  const Matrix pi = pseudo_inverse(d);
  CHECK(pi(0, 0) == doctest::Approx(0.5));
  CHECK(pi(1, 1) == doctest::Approx(0.0));

  Matrix inv2(2, 2);
  inv2 << 3, 1, 2, 5;
  CHECK((pseudo_inverse(inv2) - inv2.inverse()).norm() < 1e-10);

  // rank-deficient 4x3 of rank 2: Penrose identities
  Rng rng(17);
  const Matrix b = random_matrix(4, 2, rng) * random_matrix(2, 3, rng);
  const Matrix bp = pseudo_inverse(b);
  CHECK((b * bp * b - b).norm() < 1e-8 * b.norm());
  CHECK((bp * b * bp - bp).norm() < 1e-8 * bp.norm());
  CHECK(((b * bp) - (b * bp).transpose()).norm() < 1e-8);
  CHECK(((bp * b) - (bp * b).transpose()).norm() < 1e-8);
}

TEST_CASE("projector properties") {
  CHECK((projector(Matrix::Identity(4, 4)) - Matrix::Identity(4, 4)).norm() <
        1e-10);

  Vector x(3);
  x << 1, 2, 2;
  const Matrix p1 = projector(Matrix(x));
  CHECK((p1 - x * x.transpose() / x.squaredNorm()).norm() < 1e-10);

  Rng rng(23);
  const Matrix x2 = random_matrix(10, 3, rng) * random_matrix(3, 6, rng);
  const Matrix p = projector(x2);
  CHECK((p - p.transpose()).norm() < 1e-8);
  CHECK((p * p - p).norm() < 1e-8 * 10);
  CHECK((p * x2 - x2).norm() < 1e-8 * x2.norm());
  CHECK(p.trace() == doctest::Approx(3).epsilon(1e-6));
}

TEST_CASE("matrix_rank") {
  CHECK(matrix_rank(Matrix::Zero(3, 3)) == 0);
  CHECK(matrix_rank(Matrix::Identity(3, 3)) == 3);
  Rng rng(29);
  for (int t = 0; t < 100; ++t) {
    const Matrix c =
        0.3 * random_matrix(25, 10, rng) * random_matrix(10, 25, rng);
    CHECK(matrix_rank(c) == 10);
  }
}

TEST_CASE("Frobenius identity, von Neumann and Weyl inequalities") {
  Rng rng(31);
  for (int t = 0; t < 20; ++t) {
    const Matrix a = random_matrix(5, 4, rng);
    const Matrix b = random_matrix(5, 4, rng);
    const Vector da = thin_svd(a).d;
    const Vector db = thin_svd(b).d;
    CHECK(a.squaredNorm() ==
          doctest::Approx(da.squaredNorm()).epsilon(1e-10));
    CHECK((a * b.transpose()).trace() <= da.dot(db) + 1e-8);
    const Vector dab = thin_svd(a + b).d;
    for (Index i = 0; i < 4; ++i) {
      CHECK(std::abs(dab(i) - da(i)) <= db(0) + 1e-10);
    }
  }
}

TEST_CASE("non-finite input rejected") {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(thin_svd(m), contract_error);
}

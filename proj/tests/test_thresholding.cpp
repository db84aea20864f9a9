#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "svtreg/matrix_core.hpp"
#include "svtreg/rng.hpp"
#include "svtreg/thresholding.hpp"

using namespace svtreg;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix random_matrix(Index n, Index p, Rng& rng) {
  Matrix m(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) m(i, j) = rng.normal();
  return m;
}

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

WeightVector wv(std::initializer_list<double> vals) {
  WeightVector w;
  w.w = Vector(static_cast<Index>(vals.size()));
  Index i = 0;
  for (double v : vals) w.w(i++) = v;
  return w;
}

double nn_objective(const Matrix& y, const Matrix& c, double lambda,
                    const WeightVector& w) {
  return 0.5 * (y - c).squaredNorm() + lambda * adaptive_nuclear_norm(c, w);
}

}  // namespace

TEST_CASE("hsvt basics") {
  CHECK((hsvt(diag2(3, 1), 2) - diag2(3, 0)).norm() < 1e-12);
  Rng rng(1);
  const Matrix y = random_matrix(4, 3, rng);
  CHECK((hsvt(y, 0) - y).norm() < 1e-10 * y.norm());
  // tie at exact equality is dropped (strict comparison)
  const Matrix t = hsvt(diag2(3, 1), 3);
  CHECK(t.norm() < 1e-12);
}

TEST_CASE("hsvt at lambda = d2 gives the best rank-1 approximation and wins "
          "the rank-penalized objective over all rank-k candidates") {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix y = random_matrix(4, 4, rng);
    const auto f = thin_svd(y);
    const double lambda = f.d(1);
    const Matrix h = hsvt(y, lambda);
    const Matrix best1 = f.d(0) * f.u.col(0) * f.v.col(0).transpose();
    CHECK((h - best1).norm() < 1e-9 * y.norm());
    const double obj_h =
        0.5 * (y - h).squaredNorm() + 0.5 * lambda * lambda * matrix_rank(h);
    for (Index k = 0; k <= 4; ++k) {
      Matrix cand = Matrix::Zero(4, 4);
      for (Index i = 0; i < k; ++i)
        cand += f.d(i) * f.u.col(i) * f.v.col(i).transpose();
      const double obj =
          0.5 * (y - cand).squaredNorm() + 0.5 * lambda * lambda * k;
      CHECK(obj_h <= obj + 1e-9);
    }
  }
}

TEST_CASE("ssvt basics and local optimality probe") {
  CHECK((ssvt(diag2(3, 1), 1) - diag2(2, 0)).norm() < 1e-12);
  Rng rng(3);
  const Matrix y = random_matrix(3, 3, rng);
  const auto f = thin_svd(y);
  CHECK(ssvt(y, f.d(0) + 0.1).norm() < 1e-12);

  const double lambda = 0.5;
  const Matrix s = ssvt(y, lambda);
  const WeightVector ones = wv({1, 1, 1});
  const double obj_s = nn_objective(y, s, lambda, ones);
  for (int t = 0; t < 1000; ++t) {
    Matrix delta = random_matrix(3, 3, rng);
    delta /= delta.norm();
    const double eps = (t % 2 == 0) ? 1e-3 : 1e-4;
    CHECK(obj_s <= nn_objective(y, s + eps * delta, lambda, ones) + 1e-12);
  }
}

TEST_CASE("asvt closed form and reduction to ssvt") {
  const Matrix r = asvt(diag2(4, 2), 1.0, wv({0.5, 1}));
  CHECK((r - diag2(3.5, 1)).norm() < 1e-12);

  Rng rng(4);
  const Matrix y = random_matrix(5, 4, rng);
  CHECK((asvt(y, 0.7, wv({1, 1, 1, 1})) - ssvt(y, 0.7)).norm() < 1e-12);
}

TEST_CASE("asvt rejects decreasing weights") {
  CHECK_THROWS_AS(asvt(diag2(2, 1), 1.0, wv({1.0, 0.5})), contract_error);
}

TEST_CASE("asvt output singular values are exactly (d_i - lambda w_i)_+") {
  Rng rng(6);
  for (int t = 0; t < 20; ++t) {
    const Matrix y = random_matrix(4, 4, rng);
    const WeightVector w = wv({0.1, 0.4, 0.9, 1.7});
    const double lambda = 0.8;
    const Vector d = thin_svd(y).d;
    const Vector got = thin_svd(asvt(y, lambda, w)).d;
    for (Index i = 0; i < 4; ++i) {
      const double want = std::max(0.0, d(i) - lambda * w.w(i));
      CHECK(got(i) == doctest::Approx(want).epsilon(1e-9));
    }
  }
}

TEST_CASE("asvt beats a diagonal grid oracle and random perturbations") {
  Rng rng(7);
  const Matrix y = random_matrix(3, 3, rng);
  const WeightVector w = wv({0.2, 0.6, 1.5});
  const double lambda = 1.0;
  const Matrix sol = asvt(y, lambda, w);
  const double obj_sol = nn_objective(y, sol, lambda, w);
  const auto f = thin_svd(y);
  const int grid = 21;
  for (int a = 0; a < grid; ++a)
    for (int b = 0; b < grid; ++b)
      for (int c = 0; c < grid; ++c) {
        Vector g(3);
        g << f.d(0) * a / (grid - 1), f.d(0) * b / (grid - 1),
            f.d(0) * c / (grid - 1);
        const Matrix cand = f.u * g.asDiagonal() * f.v.transpose();
        CHECK(obj_sol <= nn_objective(y, cand, lambda, w) + 1e-9);
      }
  for (int t = 0; t < 2000; ++t) {
    Matrix delta = random_matrix(3, 3, rng);
    delta /= delta.norm();
    const double eps = (t % 2 == 0) ? 1e-3 : 1e-4;
    CHECK(obj_sol <= nn_objective(y, sol + eps * delta, lambda, w) + 1e-9);
  }
}

TEST_CASE("shrinkage ordering against ssvt at the minimum weight") {
  Rng rng(8);
  const Matrix y = random_matrix(5, 5, rng);
  const WeightVector w = wv({0.3, 0.5, 0.8, 1.0, 2.0});
  const double lambda = 0.6;
  const Vector da = thin_svd(asvt(y, lambda, w)).d;
  const Vector ds = thin_svd(ssvt(y, lambda * 0.3)).d;
  for (Index i = 0; i < 5; ++i) CHECK(da(i) <= ds(i) + 1e-10);
}

TEST_CASE("adaptive_nuclear_norm worked example") {
  const WeightVector w = wv({1, 2});
  const Matrix c1 = diag2(2, 1);
  const Matrix c2 = diag2(1, 2);
  CHECK(adaptive_nuclear_norm(c1, w) == doctest::Approx(4));
  CHECK(adaptive_nuclear_norm(c2, w) == doctest::Approx(4));
  CHECK(adaptive_nuclear_norm(Matrix(-c2), w) == doctest::Approx(4));
  CHECK(adaptive_nuclear_norm(Matrix(0.5 * (c1 + c2)), w) ==
        doctest::Approx(4.5));

  Rng rng(9);
  Matrix m(3, 4);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 4; ++j) m(i, j) = rng.normal();
  CHECK(adaptive_nuclear_norm(m, wv({1, 1, 1})) ==
        doctest::Approx(thin_svd(m).d.sum()).epsilon(1e-10));
}

TEST_CASE("weights_from_singular_values powers and infinite flags") {
  Vector d(3);
  d << 4, 2, 1;
  const WeightVector w1 = weights_from_singular_values(d, 1.0);
  CHECK(w1.w(0) == doctest::Approx(0.25));
  CHECK(w1.w(1) == doctest::Approx(0.5));
  CHECK(w1.w(2) == doctest::Approx(1.0));

  const WeightVector w0 = weights_from_singular_values(d, 0.0);
  for (Index i = 0; i < 3; ++i) CHECK(w0.w(i) == 1.0);

  Vector dz(3);
  dz << 5, 3, 0;
  const WeightVector wz = weights_from_singular_values(dz, 2.0);
  CHECK(wz.w(0) == doctest::Approx(0.04));
  CHECK(wz.w(1) == doctest::Approx(1.0 / 9.0));
  CHECK(wz.w(2) == kInf);
  CHECK_NOTHROW(validate_weight_order(wz));
}

TEST_CASE("infinite weight forces the matching singular value to zero") {
  Rng rng(10);
  for (int t = 0; t < 20; ++t) {
    const Matrix low = random_matrix(4, 2, rng) * random_matrix(2, 3, rng);
    const Matrix y = low + 1e-13 * random_matrix(4, 3, rng);
    const WeightVector w = adaptive_weights(low, 2.0);
    CHECK(w.w(2) == kInf);
    const Vector g = thin_svd(asvt(y, 0.5, w)).d;
    // re-factorizing the reassembled matrix leaves ~1e-16 round-off
    CHECK(g(2) <= 1e-12 * (g(0) + 1.0));
  }
}

TEST_CASE("lambda = 0 ignores weights entirely") {
  Rng rng(12);
  const Matrix low = random_matrix(4, 2, rng) * random_matrix(2, 4, rng);
  const WeightVector w = adaptive_weights(low, 2.0);
  CHECK((asvt(low, 0.0, w) - low).norm() < 1e-10 * low.norm());
}

TEST_CASE("midpoint convexity holds for non-increasing weights") {
  Rng rng(13);
  Vector w(3);
  w << 2, 1, 1;  // non-increasing: a valid gauge
  WeightVector gauge;
  gauge.w = w;
  for (int t = 0; t < 1000; ++t) {
    const Matrix a = random_matrix(3, 3, rng);
    const Matrix b = random_matrix(3, 3, rng);
    const double mid = adaptive_nuclear_norm(Matrix(0.5 * (a + b)), gauge);
    const double avg = 0.5 * (adaptive_nuclear_norm(a, gauge) +
                              adaptive_nuclear_norm(b, gauge));
    CHECK(mid <= avg + 1e-9);
  }
}

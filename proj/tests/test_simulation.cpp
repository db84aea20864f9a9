#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "svtreg/matrix_core.hpp"
#include "svtreg/simulation.hpp"

using namespace svtreg;

TEST_CASE("scenario validation names the violated invariant") {
  SimulationScenario s;
  s.model = 1;
  s.n = 10;
  s.p = 5;
  s.q = 4;
  s.r_star = 6;  // exceeds min(p, q)
  CHECK_THROWS_AS(validate_scenario(s), contract_error);
  s.r_star = 3;
  CHECK_NOTHROW(validate_scenario(s));
  s.model = 2;
  s.r_x = 2;  // r_star > r_x
  CHECK_THROWS_AS(validate_scenario(s), contract_error);
  s.r_x = 4;
  CHECK_NOTHROW(validate_scenario(s));
  s.rho = 1.0;
  CHECK_THROWS_AS(validate_scenario(s), contract_error);
}

TEST_CASE("gen_coefficients rank and linearity in b") {
  Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    const Matrix c = gen_coefficients(25, 25, 10, 1.0, rng);
    CHECK(matrix_rank(c) == 10);
  }
  Rng r1(9), r2(9);
  const Matrix c1 = gen_coefficients(6, 5, 2, 1.0, r1);
  const Matrix c2 = gen_coefficients(6, 5, 2, 2.0, r2);
  CHECK((c2 - 2.0 * c1).norm() == 0.0);
  Rng r0(3);
  CHECK(gen_coefficients(4, 4, 2, 0.0, r0).norm() == 0.0);
}

TEST_CASE("ar1_cholesky reproduces the AR(1) covariance") {
  const Matrix l = ar1_cholesky(5, 0.6);
  const Matrix gamma = l * l.transpose();
  for (Index i = 0; i < 5; ++i) {
    for (Index j = 0; j < 5; ++j) {
      CHECK(gamma(i, j) ==
            doctest::Approx(std::pow(0.6, std::abs(double(i - j))))
                .epsilon(1e-10));
    }
  }
  CHECK((ar1_cholesky(4, 0.0) - Matrix::Identity(4, 4)).norm() == 0.0);
}

TEST_CASE("model 1 design moments") {
  Rng rng(2);
  const Matrix x0 = gen_design_model1(2000, 4, 0.0, rng);
  const Matrix cov = x0.transpose() * x0 / 2000.0;
  CHECK((cov - Matrix::Identity(4, 4)).norm() < 0.15);

  Rng rng2(3);
  const Matrix x9 = gen_design_model1(100000, 5, 0.9, rng2);
  for (Index j = 0; j + 1 < 5; ++j) {
    const double corr = (x9.col(j).dot(x9.col(j + 1)) / 100000.0) /
                        std::sqrt((x9.col(j).squaredNorm() / 100000.0) *
                                  (x9.col(j + 1).squaredNorm() / 100000.0));
    CHECK(corr == doctest::Approx(0.9).epsilon(0.012));
  }

  Rng a(7), b(7);
  CHECK((gen_design_model1(10, 4, 0.3, a) - gen_design_model1(10, 4, 0.3, b))
            .norm() == 0.0);
}

TEST_CASE("model 2 design rank") {
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    const Matrix x = gen_design_model2(20, 25, 10, 0.5, rng);
    CHECK(matrix_rank(x) == 10);
  }
  Rng r1(5);
  const Matrix xf = gen_design_model2(6, 10, 6, 0.2, r1);
  CHECK(matrix_rank(xf) == 6);
}

TEST_CASE("smse metrics against a naive recomputation") {
  Rng rng(6);
  Matrix c(4, 3), chat(4, 3);
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 3; ++j) {
      c(i, j) = rng.normal();
      chat(i, j) = rng.normal();
    }
  CHECK(smse_estimation(c, c) == 0.0);
  CHECK(smse_estimation(Matrix::Zero(4, 3), Matrix::Ones(4, 3)) ==
        doctest::Approx(100.0));
  double naive = 0.0;
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 3; ++j) {
      const double d = c(i, j) - chat(i, j);
      naive += d * d;
    }
  CHECK(smse_estimation(c, chat) ==
        doctest::Approx(100.0 * naive / 12.0).epsilon(1e-12));

  Matrix x(5, 4);
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 4; ++j) x(i, j) = rng.normal();
  double naive_pred = 0.0;
  const Matrix diff = x * c - x * chat;
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 3; ++j) naive_pred += diff(i, j) * diff(i, j);
  CHECK(smse_prediction(x, c, chat) ==
        doctest::Approx(100.0 * naive_pred / 15.0).epsilon(1e-12));
}

TEST_CASE("parse_method_list binds gamma from the label suffix") {
  const auto list = parse_method_list("ann2,ann0,rsc,ols,nnp,roann1");
  REQUIRE(list.size() == 6);
  CHECK(list[0].label == "ann2");
  CHECK(list[0].config.method == Method::Ann);
  CHECK(list[0].config.gamma == 2.0);
  CHECK(list[1].config.gamma == 0.0);
  CHECK(list[2].config.method == Method::Rsc);
  CHECK(list[3].config.method == Method::Ols);
  CHECK(list[4].config.method == Method::Nnp);
  CHECK(list[5].config.method == Method::Roann);
  CHECK(list[5].config.gamma == 1.0);
  CHECK_THROWS_AS(parse_method_list("bogus"), contract_error);
}

TEST_CASE("run_experiment near-noiseless recovery") {
  SimulationScenario s;
  s.model = 1;
  s.n = 40;
  s.p = 10;
  s.q = 8;
  s.r_star = 3;
  s.rho = 0.1;
  s.b = 1.0;
  s.sigma = 1e-8;
  s.replications = 1;
  s.seed = 5;
  const auto rows =
      run_experiment(s, parse_method_list("ann2,rsc"), TuningMode::Oracle);
  for (const auto& row : rows) {
    CHECK(row.failures == 0);
    CHECK(row.mean_rank == doctest::Approx(3.0));
    CHECK(row.pct_exact_rank == doctest::Approx(100.0));
    // tuning grids bottom out at lambda_max * 1e-4, leaving a small
    // shrinkage floor even when the noise is negligible
    CHECK(row.est_mean < 0.05);
    CHECK(row.pred_mean < 0.05);
  }
}

TEST_CASE("run_experiment determinism across reruns and thread counts") {
  SimulationScenario s;
  s.model = 2;
  s.n = 20;
  s.p = 12;
  s.q = 6;
  s.r_star = 2;
  s.r_x = 5;
  s.rho = 0.5;
  s.b = 0.5;
  s.replications = 6;
  s.seed = 11;
  const auto methods = parse_method_list("ann2,rsc");
  const auto a = run_experiment(s, methods, TuningMode::Oracle, 1);
  const auto b = run_experiment(s, methods, TuningMode::Oracle, 1);
  const auto c = run_experiment(s, methods, TuningMode::Oracle, 3);
  REQUIRE(a.size() == b.size());
  REQUIRE(a.size() == c.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].est_mean == b[i].est_mean);
    CHECK(a[i].est_mean == c[i].est_mean);
    CHECK(a[i].pred_sd == c[i].pred_sd);
    CHECK(a[i].mean_rank == c[i].mean_rank);
    CHECK(a[i].pct_exact_rank == c[i].pct_exact_rank);
  }
}

TEST_CASE("run_experiment with cv tuning completes and reports sane metrics") {
  SimulationScenario s;
  s.model = 1;
  s.n = 30;
  s.p = 8;
  s.q = 6;
  s.r_star = 2;
  s.rho = 0.1;
  s.b = 1.0;
  s.replications = 3;
  s.seed = 21;
  const auto rows =
      run_experiment(s, parse_method_list("ann2"), TuningMode::Cv, 1, 5, 30);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].failures == 0);
  CHECK(rows[0].mean_rank >= 1.0);
  CHECK(rows[0].est_mean >= 0.0);
}

TEST_CASE("smse invariance under simultaneous column permutation") {
  Rng rng(8);
  Matrix c(3, 4), chat(3, 4), x(6, 3);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 4; ++j) {
      c(i, j) = rng.normal();
      chat(i, j) = rng.normal();
    }
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 3; ++j) x(i, j) = rng.normal();
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(4);
  perm.setIdentity();
  std::swap(perm.indices()(0), perm.indices()(2));
  const Matrix cp = c * perm;
  const Matrix chp = chat * perm;
  CHECK(smse_estimation(cp, chp) ==
        doctest::Approx(smse_estimation(c, chat)).epsilon(1e-12));
  CHECK(smse_prediction(x, cp, chp) ==
        doctest::Approx(smse_prediction(x, c, chat)).epsilon(1e-12));
}

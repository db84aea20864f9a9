#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "svtreg/theory_checks.hpp"

using namespace svtreg;

TEST_CASE("config validation") {
  TheoryCheckConfig cfg;
  CHECK_NOTHROW(validate_check_config(cfg));
  cfg.delta = 1.5;
  CHECK_THROWS_AS(validate_check_config(cfg), contract_error);
  cfg.delta = 0.5;
  cfg.theta = 0.0;
  CHECK_THROWS_AS(validate_check_config(cfg), contract_error);
  cfg.theta = 1.0;
  cfg.a = 1.0;
  CHECK_THROWS_AS(validate_check_config(cfg), contract_error);
}

TEST_CASE("convexity dichotomy passes and records the worked example") {
  const auto r = check_convexity_dichotomy(4, 10000, 7);
  CHECK(r.status == "PASS");
  // the worked numbers f(C1)=f(C2)=4, f(mid)=4.5 are embedded in the detail
  CHECK(r.detail.find("4.5") != std::string::npos);
}

TEST_CASE("asvt optimality on small instances") {
  const auto r = check_asvt_optimality(50, 15, 200, 3);
  CHECK(r.status == "PASS");
  CHECK(r.empirical >= -1e-9);
}

TEST_CASE("noise spectrum bound") {
  const auto r = check_noise_spectrum(50, 30, 20, 1.0, 300, 5);
  CHECK(r.status == "PASS");
  CHECK(r.claimed == doctest::Approx(std::sqrt(20.0) + std::sqrt(30.0)));
  CHECK(r.empirical <= r.claimed + r.slack);
}

TEST_CASE("noise spectrum with sigma = 0 is trivially zero") {
  const auto r = check_noise_spectrum(20, 10, 5, 0.0, 50, 2);
  CHECK(r.status == "PASS");
  CHECK(r.empirical == 0.0);
}

TEST_CASE("rank consistency at moderate scale") {
  SimulationScenario s;
  s.model = 2;
  s.n = 40;
  s.p = 30;
  s.q = 20;
  s.r_star = 3;
  s.r_x = 10;
  s.rho = 0.0;
  s.b = 1.0;
  s.sigma = 1.0;
  s.seed = 9;
  TheoryCheckConfig cfg;
  cfg.trials = 50;
  const auto r = check_rank_consistency(s, cfg);
  CHECK(r.status == "PASS");
  CHECK(r.empirical >= r.claimed - r.slack);
}

TEST_CASE("rank consistency near-noiseless is exact") {
  SimulationScenario s;
  s.model = 1;
  s.n = 30;
  s.p = 10;
  s.q = 8;
  s.r_star = 2;
  s.rho = 0.0;
  s.b = 1.0;
  s.sigma = 1e-8;
  s.seed = 4;
  TheoryCheckConfig cfg;
  cfg.trials = 20;
  const auto r = check_rank_consistency(s, cfg);
  CHECK(r.status == "PASS");
  CHECK(r.empirical == 1.0);
}

TEST_CASE("prediction bound holds at a moderate scenario") {
  SimulationScenario s;
  s.model = 1;
  s.n = 60;
  s.p = 15;
  s.q = 15;
  s.r_star = 3;
  s.rho = 0.0;
  s.b = 1.0;
  s.sigma = 1.0;
  s.seed = 6;
  TheoryCheckConfig cfg;
  cfg.trials = 50;
  const auto adaptive = check_prediction_bound(s, cfg, false);
  CHECK(adaptive.status == "PASS");
  const auto fixed = check_prediction_bound(s, cfg, true);
  CHECK(fixed.status == "PASS");
}

TEST_CASE("checks are deterministic given the seed") {
  const auto a = check_noise_spectrum(30, 20, 10, 1.0, 100, 13);
  const auto b = check_noise_spectrum(30, 20, 10, 1.0, 100, 13);
  CHECK(a.empirical == b.empirical);
  CHECK(a.slack == b.slack);
  CHECK(a.status == b.status);
}

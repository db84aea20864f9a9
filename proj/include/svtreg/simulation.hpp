#ifndef SVTREG_SIMULATION_HPP
#define SVTREG_SIMULATION_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "svtreg/estimators.hpp"
#include "svtreg/rng.hpp"
#include "svtreg/types.hpp"

namespace svtreg {

struct SimulationScenario {
  int model = 1;  // 1 or 2
  Index n = 100, p = 25, q = 25;
  Index r_star = 10;
  Index r_x = 10;  // model 2 only
  double rho = 0.1;
  double b = 0.3;
  double sigma = 1.0;
  int replications = 100;
  std::uint64_t seed = 1;
};

// Throws contract_error naming the violated invariant.
void validate_scenario(const SimulationScenario& s);

struct ExperimentRow {
  std::string label;
  double est_mean = 0, est_sd = 0;
  double pred_mean = 0, pred_sd = 0;
  double mean_rank = 0;
  double pct_exact_rank = 0;
  double mean_seconds = 0;
  int failures = 0;
  int replications = 0;
};

enum class TuningMode { Cv, Oracle };

// C = b * C0 * C1' with i.i.d. N(0,1) entries; rank r_star almost surely.
Matrix gen_coefficients(Index p, Index q, Index r_star, double b, Rng& rng);

// Rows i.i.d. MVN(0, Gamma), Gamma_ij = rho^|i-j| (AR(1) Cholesky factor).
Matrix gen_design_model1(Index n, Index p, double rho, Rng& rng);

// X = X1 * X2 * L' with L the AR(1) Cholesky factor; rank r_x almost surely.
Matrix gen_design_model2(Index n, Index p, Index r_x, double rho, Rng& rng);

// Lower-triangular Cholesky factor of the AR(1) covariance.
Matrix ar1_cholesky(Index p, double rho);

double smse_estimation(const Matrix& c_true, const Matrix& c_hat);
double smse_prediction(const Matrix& x, const Matrix& c_true,
                       const Matrix& c_hat);

// Labelled method configuration; "ann2"/"ann1"/"ann0" bind gamma, "roann2"
// etc. likewise.
struct MethodSpec {
  std::string label;
  EstimatorConfig config;
};
std::vector<MethodSpec> parse_method_list(const std::string& comma_separated);

std::vector<ExperimentRow> run_experiment(const SimulationScenario& scenario,
                                          const std::vector<MethodSpec>& methods,
                                          TuningMode tuning, int threads = 1,
                                          int cv_folds = 10,
                                          int grid_size = 100);

}  // namespace svtreg

#endif

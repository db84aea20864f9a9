#ifndef SVTREG_TUNING_HPP
#define SVTREG_TUNING_HPP

#include <cstdint>
#include <vector>

#include "svtreg/estimators.hpp"
#include "svtreg/types.hpp"

namespace svtreg {

struct LambdaGrid {
  std::vector<double> values;  // strictly increasing, all positive
  int stage = 1;
};

// values[i] = lambda_max * ratio^((size-1-i)/(size-1)), ascending.
LambdaGrid build_grid(double lambda_max, int size = 100,
                      double lambda_min_ratio = 1e-4);

// Largest useful lambda for the method: the smallest value whose solution is
// the null fit (LS for lambda below it). Computed from the full-data path.
double lambda_max_for(const EstimatorConfig& config, const Matrix& y,
                      const Matrix& x);

struct CvReport {
  LambdaGrid stage1_grid;
  std::vector<double> stage1_errors;
  LambdaGrid grid;                // stage-2 (final) grid
  std::vector<double> cv_errors;  // mean held-out error per final-grid lambda
  double best_lambda = 0.0;
  double best_error = 0.0;
  double lambda2 = 0.0;
  int fold_count = 0;
  std::int64_t fold_assignment_seed = 0;
  double null_error = 0.0;  // mean |Y_test|_F^2/(|test| q) across folds
  int invalid_cells = 0;    // (lambda, fold) cells excluded after fit failure
};

// Two-stage K-fold CV over the log-lambda grid; folds come from a seeded
// shuffle and are fixed across the whole grid. Ties in cv_error go to the
// larger lambda.
CvReport cross_validate(const Matrix& y, const Matrix& x,
                        const EstimatorConfig& config, int k,
                        std::int64_t seed, int grid_size = 100,
                        double lambda_min_ratio = 1e-4);

// RoRR/RoANN: lambda grid crossed with a small lambda2 grid.
CvReport cross_validate_2d(
    const Matrix& y, const Matrix& x, const EstimatorConfig& config, int k,
    std::int64_t seed,
    const std::vector<double>& lambda2_grid = {0.0, 0.01, 0.1, 1.0, 10.0},
    int grid_size = 100, double lambda_min_ratio = 1e-4);

struct OracleTuneResult {
  double best_lambda = 0.0;
  double best_lambda2 = 0.0;
  double valid_error = 0.0;
};

// Selects lambda by prediction error on an independent validation pair.
// When c_true is given the error is |X_valid (C_true - C_hat)|_F^2/(n_v q);
// otherwise the held-out residual |Y_valid - X_valid C_hat|_F^2/(n_v q).
// An explicit grid bypasses the two-stage construction.
OracleTuneResult oracle_tune(const Matrix& y, const Matrix& x,
                             const EstimatorConfig& config,
                             const Matrix& y_valid, const Matrix& x_valid,
                             const Matrix* c_true = nullptr,
                             const std::vector<double>* explicit_grid = nullptr,
                             int grid_size = 100,
                             double lambda_min_ratio = 1e-4);

OracleTuneResult oracle_tune_2d(
    const Matrix& y, const Matrix& x, const EstimatorConfig& config,
    const Matrix& y_valid, const Matrix& x_valid, const Matrix* c_true = nullptr,
    const std::vector<double>& lambda2_grid = {0.0, 0.01, 0.1, 1.0, 10.0},
    int grid_size = 100, double lambda_min_ratio = 1e-4);

// Deterministic fold assignment: fold index for each of the n rows.
std::vector<int> assign_folds(Index n, int k, std::int64_t seed);

}  // namespace svtreg

#endif

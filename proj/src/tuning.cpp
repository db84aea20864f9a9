#include "svtreg/tuning.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <random>

namespace svtreg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// lambda -> FitResult, with the one-time decomposition shared across the
// whole grid for the thresholded-SVD estimators.
class GridFitter {
 public:
  GridFitter(const Matrix& y, const Matrix& x, const EstimatorConfig& cfg)
      : y_(y), x_(x), cfg_(cfg) {
    switch (cfg.method) {
      case Method::Rsc:
      case Method::Ann:
      case Method::Roann:
        path_ = build_path(y, x);
        break;
      case Method::Rorr:
        path_ = build_ridge_path(y, x, cfg.lambda2);
        break;
      default:
        break;
    }
  }

  FitResult operator()(double lambda) const {
    switch (cfg_.method) {
      case Method::Rsc:
        return rsc_from_path(*path_, y_, lambda);
      case Method::Ann:
        return ann_from_path(*path_, y_, lambda, cfg_.gamma, cfg_.weights);
      case Method::Rorr:
        return rorr_from_path(*path_, y_, lambda);
      case Method::Roann:
        return roann_from_path(*path_, y_, lambda, cfg_.lambda2, cfg_.gamma,
                               cfg_.weights);
      default: {
        EstimatorConfig c = cfg_;
        c.lambda = lambda;
        return fit(y_, x_, c);
      }
    }
  }

  const Vector* path_singular_values() const {
    return path_ ? &path_->d : nullptr;
  }

 private:
  const Matrix& y_;
  const Matrix& x_;
  EstimatorConfig cfg_;
  std::optional<SolutionPath> path_;
};

// Largest lambda attaining the minimum error (parsimony tie-break).
std::size_t pick_winner(const std::vector<double>& errors) {
  std::size_t best = errors.size();
  double best_err = std::numeric_limits<double>::infinity();
  for (std::size_t i = errors.size(); i-- > 0;) {
    if (std::isnan(errors[i])) continue;
    if (errors[i] < best_err) {
      best_err = errors[i];
      best = i;
    }
  }
  if (best == errors.size()) {
    throw numerical_error("tuning: every grid cell failed");
  }
  return best;
}

// Finer grid bracketing the stage-1 winner; the winner value itself is kept
// on the grid exactly so refinement can never lose to stage 1.
LambdaGrid refine_grid(const LambdaGrid& stage1, std::size_t winner_idx,
                       int size) {
  LambdaGrid out;
  out.stage = 2;
  const auto& v = stage1.values;
  const double winner = v[winner_idx];
  if (v.size() < 2) {
    out.values = v;
    return out;
  }
  const double lo = v[winner_idx > 0 ? winner_idx - 1 : 0];
  const double hi = v[std::min(winner_idx + 1, v.size() - 1)];
  out.values.resize(size);
  for (int i = 0; i < size; ++i) {
    out.values[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (size - 1));
  }
  std::size_t closest = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const double gap = std::abs(std::log(out.values[i] / winner));
    if (gap < best_gap) {
      best_gap = gap;
      closest = i;
    }
  }
  out.values[closest] = winner;
  out.values.erase(std::unique(out.values.begin(), out.values.end()),
                   out.values.end());
  return out;
}

Matrix select_rows(const Matrix& m, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = m.row(rows[i]);
  return out;
}

}  // namespace

LambdaGrid build_grid(double lambda_max, int size, double lambda_min_ratio) {
  if (!(lambda_max > 0)) throw contract_error("build_grid: lambda_max must be positive");
  if (size < 2) throw contract_error("build_grid: size must be >= 2");
  if (!(lambda_min_ratio > 0 && lambda_min_ratio < 1)) {
    throw contract_error("build_grid: lambda_min_ratio must be in (0,1)");
  }
  LambdaGrid grid;
  grid.stage = 1;
  grid.values.resize(size);
  for (int i = 0; i < size; ++i) {
    grid.values[i] =
        lambda_max * std::pow(lambda_min_ratio,
                              static_cast<double>(size - 1 - i) / (size - 1));
  }
  return grid;
}

double lambda_max_for(const EstimatorConfig& config, const Matrix& y,
                      const Matrix& x) {
  switch (config.method) {
    case Method::Nnp: {
      Eigen::BDCSVD<Matrix> svd(x.transpose() * y);
      return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
    }
    case Method::Rsc:
    case Method::Rorr: {
      const SolutionPath path = config.method == Method::Rorr
                                    ? build_ridge_path(y, x, config.lambda2)
                                    : build_path(y, x);
      const double d1 = path.d.size() > 0 ? path.d(0) : 0.0;
      return 0.5 * d1 * d1;
    }
    case Method::Ann:
    case Method::Roann: {
      const SolutionPath path = build_path(y, x);
      if (config.weights) {
        double lmax = 0.0;
        for (Index i = 0; i < path.d.size(); ++i) {
          const double wi = config.weights->w(i);
          if (std::isfinite(wi) && wi > 0.0) {
            lmax = std::max(lmax, path.d(i) / wi);
          }
        }
        return lmax > 0.0 ? lmax : (path.d.size() > 0 ? path.d(0) : 0.0);
      }
      const double d1 = path.d.size() > 0 ? path.d(0) : 0.0;
      return std::pow(d1, config.gamma + 1.0);
    }
    default:
      throw contract_error("lambda_max_for: method has no tuning parameter");
  }
}

std::vector<int> assign_folds(Index n, int k, std::int64_t seed) {
  if (k < 2) throw contract_error("cross_validate: k must be >= 2");
  if (k > n) throw contract_error("cross_validate: k must be <= n");
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> fold(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < order.size(); ++i) {
    fold[static_cast<std::size_t>(order[i])] = static_cast<int>(i % static_cast<std::size_t>(k));
  }
  return fold;
}

CvReport cross_validate(const Matrix& y, const Matrix& x,
                        const EstimatorConfig& config, int k,
                        std::int64_t seed, int grid_size,
                        double lambda_min_ratio) {
  require_finite(y, "cross_validate: y");
  require_finite(x, "cross_validate: x");
  if (y.rows() != x.rows()) throw contract_error("cross_validate: row mismatch");
  const Index n = y.rows();
  const double q = static_cast<double>(y.cols());

  const std::vector<int> fold_of = assign_folds(n, k, seed);

  struct FoldData {
    Matrix y_train, x_train, y_test, x_test;
    std::unique_ptr<GridFitter> fitter;
  };
  std::vector<FoldData> folds(static_cast<std::size_t>(k));
  for (int f = 0; f < k; ++f) {
    std::vector<Index> train_rows, test_rows;
    for (Index i = 0; i < n; ++i) {
      (fold_of[static_cast<std::size_t>(i)] == f ? test_rows : train_rows).push_back(i);
    }
    if (test_rows.empty()) throw contract_error("cross_validate: empty fold");
    auto& fd = folds[static_cast<std::size_t>(f)];
    fd.y_train = select_rows(y, train_rows);
    fd.x_train = select_rows(x, train_rows);
    fd.y_test = select_rows(y, test_rows);
    fd.x_test = select_rows(x, test_rows);
    fd.fitter = std::make_unique<GridFitter>(fd.y_train, fd.x_train, config);
  }

  CvReport report;
  report.fold_count = k;
  report.fold_assignment_seed = seed;
  report.lambda2 = config.lambda2;
  {
    double null_sum = 0.0;
    for (const auto& fd : folds) {
      null_sum += fd.y_test.squaredNorm() /
                  (static_cast<double>(fd.y_test.rows()) * q);
    }
    report.null_error = null_sum / k;
  }

  auto evaluate = [&](const std::vector<double>& lambdas) {
    std::vector<double> errors(lambdas.size(), kNaN);
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
      double sum = 0.0;
      int valid = 0;
      for (const auto& fd : folds) {
        try {
          const FitResult r = (*fd.fitter)(lambdas[li]);
          const double err =
              (fd.y_test - fd.x_test * r.coefficients).squaredNorm() /
              (static_cast<double>(fd.y_test.rows()) * q);
          sum += err;
          ++valid;
        } catch (const std::exception&) {
          ++report.invalid_cells;
        }
      }
      if (valid > 0) errors[li] = sum / valid;
    }
    return errors;
  };

  report.stage1_grid =
      build_grid(lambda_max_for(config, y, x), grid_size, lambda_min_ratio);
  report.stage1_errors = evaluate(report.stage1_grid.values);
  const std::size_t winner1 = pick_winner(report.stage1_errors);

  report.grid = refine_grid(report.stage1_grid, winner1, grid_size);
  report.cv_errors = evaluate(report.grid.values);
  const std::size_t winner2 = pick_winner(report.cv_errors);
  report.best_lambda = report.grid.values[winner2];
  report.best_error = report.cv_errors[winner2];
  return report;
}

CvReport cross_validate_2d(const Matrix& y, const Matrix& x,
                           const EstimatorConfig& config, int k,
                           std::int64_t seed,
                           const std::vector<double>& lambda2_grid,
                           int grid_size, double lambda_min_ratio) {
  if (lambda2_grid.empty()) {
    throw contract_error("cross_validate_2d: empty lambda2 grid");
  }
  std::optional<CvReport> best;
  for (double l2 : lambda2_grid) {
    EstimatorConfig cfg = config;
    cfg.lambda2 = l2;
    CvReport rep = cross_validate(y, x, cfg, k, seed, grid_size, lambda_min_ratio);
    if (!best || rep.best_error < best->best_error) best = std::move(rep);
  }
  return *best;
}

namespace {

OracleTuneResult oracle_tune_impl(const Matrix& y, const Matrix& x,
                                  const EstimatorConfig& config,
                                  const Matrix& y_valid, const Matrix& x_valid,
                                  const Matrix* c_true,
                                  const std::vector<double>* explicit_grid,
                                  int grid_size, double lambda_min_ratio) {
  if (x_valid.cols() != x.cols()) {
    throw contract_error("oracle_tune: validation design width mismatch");
  }
  const double nq = static_cast<double>(x_valid.rows()) * y.cols();
  const GridFitter fitter(y, x, config);
  auto evaluate = [&](const std::vector<double>& lambdas) {
    std::vector<double> errors(lambdas.size(), kNaN);
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      const FitResult r = fitter(lambdas[i]);
      errors[i] = c_true
                      ? (x_valid * (*c_true - r.coefficients)).squaredNorm() / nq
                      : (y_valid - x_valid * r.coefficients).squaredNorm() / nq;
    }
    return errors;
  };

  OracleTuneResult out;
  out.best_lambda2 = config.lambda2;
  if (explicit_grid) {
    const auto errors = evaluate(*explicit_grid);
    const std::size_t w = pick_winner(errors);
    out.best_lambda = (*explicit_grid)[w];
    out.valid_error = errors[w];
    return out;
  }
  LambdaGrid stage1 =
      build_grid(lambda_max_for(config, y, x), grid_size, lambda_min_ratio);
  const auto errors1 = evaluate(stage1.values);
  const std::size_t w1 = pick_winner(errors1);
  const LambdaGrid stage2 = refine_grid(stage1, w1, grid_size);
  const auto errors2 = evaluate(stage2.values);
  const std::size_t w2 = pick_winner(errors2);
  out.best_lambda = stage2.values[w2];
  out.valid_error = errors2[w2];
  return out;
}

}  // namespace

OracleTuneResult oracle_tune(const Matrix& y, const Matrix& x,
                             const EstimatorConfig& config,
                             const Matrix& y_valid, const Matrix& x_valid,
                             const Matrix* c_true,
                             const std::vector<double>* explicit_grid,
                             int grid_size, double lambda_min_ratio) {
  return oracle_tune_impl(y, x, config, y_valid, x_valid, c_true, explicit_grid,
                          grid_size, lambda_min_ratio);
}

OracleTuneResult oracle_tune_2d(const Matrix& y, const Matrix& x,
                                const EstimatorConfig& config,
                                const Matrix& y_valid, const Matrix& x_valid,
                                const Matrix* c_true,
                                const std::vector<double>& lambda2_grid,
                                int grid_size, double lambda_min_ratio) {
  if (lambda2_grid.empty()) {
    throw contract_error("oracle_tune_2d: empty lambda2 grid");
  }
  std::optional<OracleTuneResult> best;
  for (double l2 : lambda2_grid) {
    EstimatorConfig cfg = config;
    cfg.lambda2 = l2;
    OracleTuneResult r = oracle_tune_impl(y, x, cfg, y_valid, x_valid, c_true,
                                          nullptr, grid_size, lambda_min_ratio);
    r.best_lambda2 = l2;
    if (!best || r.valid_error < best->valid_error) best = r;
  }
  return *best;
}

}  // namespace svtreg

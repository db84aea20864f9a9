#include "svtreg/simulation.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <sstream>
#include <thread>

#include "svtreg/tuning.hpp"

namespace svtreg {

void validate_scenario(const SimulationScenario& s) {
  if (s.model != 1 && s.model != 2) {
    throw contract_error("scenario: model must be 1 or 2");
  }
  if (s.n < 1 || s.p < 1 || s.q < 1) {
    throw contract_error("scenario: n, p, q must be positive");
  }
  if (s.r_star < 1 || s.r_star > std::min(s.p, s.q)) {
    throw contract_error("scenario: requires 1 <= r_star <= min(p,q)");
  }
  if (s.model == 2) {
    if (s.r_x < 1 || s.r_x > std::min(s.n, s.p)) {
      throw contract_error("scenario: model 2 requires r_x <= min(n,p)");
    }
    if (s.r_star > s.r_x) {
      throw contract_error("scenario: model 2 requires r_star <= r_x");
    }
  }
  if (!(s.rho >= 0.0 && s.rho < 1.0)) {
    throw contract_error("scenario: rho must be in [0,1)");
  }
  if (!(s.b > 0.0)) throw contract_error("scenario: b must be positive");
  if (!(s.sigma > 0.0)) throw contract_error("scenario: sigma must be positive");
  if (s.replications < 1) {
    throw contract_error("scenario: replications must be positive");
  }
}

namespace {

Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {    // row-major fill order, fixed
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  }
  return m;
}

}  // namespace

Matrix ar1_cholesky(Index p, double rho) {
  if (rho == 0.0) return Matrix::Identity(p, p);
  Matrix gamma(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) {
      gamma(i, j) = std::pow(rho, std::abs(static_cast<double>(i - j)));
    }
  }
  return gamma.llt().matrixL();
}

Matrix gen_coefficients(Index p, Index q, Index r_star, double b, Rng& rng) {
  if (r_star > std::min(p, q)) {
    throw contract_error("gen_coefficients: r_star exceeds min(p,q)");
  }
  const Matrix c0 = gaussian_matrix(p, r_star, rng);
  const Matrix c1 = gaussian_matrix(q, r_star, rng);
  return b * c0 * c1.transpose();
}

Matrix gen_design_model1(Index n, Index p, double rho, Rng& rng) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw contract_error("gen_design_model1: rho must be in [0,1)");
  }
  const Matrix z = gaussian_matrix(n, p, rng);
  if (rho == 0.0) return z;
  return z * ar1_cholesky(p, rho).transpose();
}

Matrix gen_design_model2(Index n, Index p, Index r_x, double rho, Rng& rng) {
  if (r_x > std::min(n, p)) {
    throw contract_error("gen_design_model2: r_x exceeds min(n,p)");
  }
  const Matrix x1 = gaussian_matrix(n, r_x, rng);
  const Matrix x2 = gaussian_matrix(r_x, p, rng);
  const Matrix x0 = x1 * x2;
  if (rho == 0.0) return x0;
  return x0 * ar1_cholesky(p, rho).transpose();
}

double smse_estimation(const Matrix& c_true, const Matrix& c_hat) {
  if (c_true.rows() != c_hat.rows() || c_true.cols() != c_hat.cols()) {
    throw contract_error("smse_estimation: shape mismatch");
  }
  return 100.0 * (c_true - c_hat).squaredNorm() /
         (static_cast<double>(c_true.rows()) * c_true.cols());
}

double smse_prediction(const Matrix& x, const Matrix& c_true,
                       const Matrix& c_hat) {
  if (c_true.rows() != x.cols() || c_true.rows() != c_hat.rows() ||
      c_true.cols() != c_hat.cols()) {
    throw contract_error("smse_prediction: shape mismatch");
  }
  return 100.0 * (x * (c_true - c_hat)).squaredNorm() /
         (static_cast<double>(x.rows()) * c_true.cols());
}

std::vector<MethodSpec> parse_method_list(const std::string& comma_separated) {
  std::vector<MethodSpec> out;
  std::stringstream ss(comma_separated);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    MethodSpec spec;
    spec.label = token;
    std::string base = token;
    double gamma = 2.0;
    // trailing digit on ann/roann binds gamma (ann2, ann1, ann0, roann2, ...)
    if (!base.empty() && std::isdigit(static_cast<unsigned char>(base.back()))) {
      gamma = base.back() - '0';
      base.pop_back();
    }
    const auto method = parse_method(base);
    if (!method) throw contract_error("unknown method: " + token);
    spec.config.method = *method;
    spec.config.gamma = gamma;
    out.push_back(std::move(spec));
  }
  if (out.empty()) throw contract_error("method list is empty");
  return out;
}

namespace {

struct RepOutcome {
  bool ok = false;
  double est = 0, pred = 0;
  Index rank = 0;
  double seconds = 0;
};

// One replication: generate data, tune, fit, score each method.
void run_replication(const SimulationScenario& s,
                     const std::vector<MethodSpec>& methods, TuningMode tuning,
                     int cv_folds, int grid_size, int rep,
                     std::vector<RepOutcome>& out_row) {
  Rng rng = Rng::substream(s.seed, static_cast<std::uint64_t>(rep));
  Matrix x, x2_factor, gl;
  if (s.model == 1) {
    x = gen_design_model1(s.n, s.p, s.rho, rng);
  } else {
    // same draw order as gen_design_model2; the latent factor is kept so
    // validation rows can share the training design's row space
    const Matrix x1 = gaussian_matrix(s.n, s.r_x, rng);
    x2_factor = gaussian_matrix(s.r_x, s.p, rng);
    gl = ar1_cholesky(s.p, s.rho);
    x = x1 * x2_factor * gl.transpose();
  }
  const Matrix c = gen_coefficients(s.p, s.q, s.r_star, s.b, rng);
  const Matrix e = s.sigma * gaussian_matrix(s.n, s.q, rng);
  const Matrix y = x * c + e;

  Matrix x_valid;
  if (tuning == TuningMode::Oracle) {
    // Fresh validation observations, 10x the training rows. For the
    // reduced-rank design the latent factor is population-level: new rows
    // draw new mixing coefficients over the same factor, otherwise the
    // validation criterion cannot see the recoverable part of C.
    x_valid = s.model == 1
                  ? gen_design_model1(10 * s.n, s.p, s.rho, rng)
                  : Matrix(gaussian_matrix(10 * s.n, s.r_x, rng) * x2_factor *
                           gl.transpose());
  }
  const std::uint64_t fold_seed = rng.next();

  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    RepOutcome& res = out_row[mi];
    const auto start = std::chrono::steady_clock::now();
    try {
      EstimatorConfig cfg = methods[mi].config;
      if (cfg.method != Method::Ols) {
        const bool two_dim =
            cfg.method == Method::Rorr || cfg.method == Method::Roann;
        if (tuning == TuningMode::Oracle) {
          const Matrix y_valid_dummy(0, 0);
          const OracleTuneResult t =
              two_dim ? oracle_tune_2d(y, x, cfg, y_valid_dummy, x_valid, &c,
                                       {0.0, 0.01, 0.1, 1.0, 10.0}, grid_size)
                      : oracle_tune(y, x, cfg, y_valid_dummy, x_valid, &c,
                                    nullptr, grid_size);
          cfg.lambda = t.best_lambda;
          if (two_dim) cfg.lambda2 = t.best_lambda2;
        } else {
          const CvReport t =
              two_dim ? cross_validate_2d(y, x, cfg, cv_folds,
                                          static_cast<std::int64_t>(fold_seed),
                                          {0.0, 0.01, 0.1, 1.0, 10.0}, grid_size)
                      : cross_validate(y, x, cfg, cv_folds,
                                       static_cast<std::int64_t>(fold_seed),
                                       grid_size);
          cfg.lambda = t.best_lambda;
          if (two_dim) cfg.lambda2 = t.lambda2;
        }
      }
      const FitResult fitres = fit(y, x, cfg);
      res.est = smse_estimation(c, fitres.coefficients);
      res.pred = smse_prediction(x, c, fitres.coefficients);
      res.rank = fitres.estimated_rank;
      res.ok = true;
    } catch (const std::exception&) {
      res.ok = false;
    }
    res.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
  }
}

}  // namespace

std::vector<ExperimentRow> run_experiment(const SimulationScenario& scenario,
                                          const std::vector<MethodSpec>& methods,
                                          TuningMode tuning, int threads,
                                          int cv_folds, int grid_size) {
  validate_scenario(scenario);
  if (methods.empty()) throw contract_error("run_experiment: no methods given");
  const int reps = scenario.replications;
  std::vector<std::vector<RepOutcome>> results(
      static_cast<std::size_t>(reps),
      std::vector<RepOutcome>(methods.size()));

  const int nthreads = std::max(1, threads);
  if (nthreads == 1) {
    for (int rep = 0; rep < reps; ++rep) {
      run_replication(scenario, methods, tuning, cv_folds, grid_size, rep,
                      results[static_cast<std::size_t>(rep)]);
    }
  } else {
    std::vector<std::thread> pool;
    std::atomic<int> counter{0};
    for (int t = 0; t < nthreads; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          const int rep = counter.fetch_add(1);
          if (rep >= reps) return;
          run_replication(scenario, methods, tuning, cv_folds, grid_size, rep,
                          results[static_cast<std::size_t>(rep)]);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  std::vector<ExperimentRow> rows;
  rows.reserve(methods.size());
  for (std::size_t mi = 0; mi < methods.size(); ++mi) {
    ExperimentRow row;
    row.label = methods[mi].label;
    std::vector<double> est, pred;
    double rank_sum = 0, sec_sum = 0;
    int exact = 0;
    for (int rep = 0; rep < reps; ++rep) {
      const RepOutcome& r = results[static_cast<std::size_t>(rep)][mi];
      sec_sum += r.seconds;
      if (!r.ok) {
        ++row.failures;
        continue;
      }
      est.push_back(r.est);
      pred.push_back(r.pred);
      rank_sum += static_cast<double>(r.rank);
      if (r.rank == scenario.r_star) ++exact;
    }
    const int ok = static_cast<int>(est.size());
    row.replications = ok;
    auto mean_sd = [](const std::vector<double>& v) {
      if (v.empty()) return std::pair<double, double>{0.0, 0.0};
      double mean = 0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      double var = 0;
      for (double x : v) var += (x - mean) * (x - mean);
      var = v.size() > 1 ? var / static_cast<double>(v.size() - 1) : 0.0;
      return std::pair<double, double>{mean, std::sqrt(var)};
    };
    std::tie(row.est_mean, row.est_sd) = mean_sd(est);
    std::tie(row.pred_mean, row.pred_sd) = mean_sd(pred);
    row.mean_rank = ok > 0 ? rank_sum / ok : 0.0;
    row.pct_exact_rank = ok > 0 ? 100.0 * exact / ok : 0.0;
    row.mean_seconds = reps > 0 ? sec_sum / reps : 0.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace svtreg

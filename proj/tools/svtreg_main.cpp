// Command-line surface: low-rank matrix approximation, reduced-rank fits,
// cross-validation, simulation experiments and empirical theory checks.
//
// Exit codes: 0 success (including flagged non-convergence), 1 check
// failure, 2 input/contract error, 3 configuration error.

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "svtreg/estimators.hpp"
#include "svtreg/io.hpp"
#include "svtreg/matrix_core.hpp"
#include "svtreg/simulation.hpp"
#include "svtreg/theory_checks.hpp"
#include "svtreg/thresholding.hpp"
#include "svtreg/tuning.hpp"

namespace fs = std::filesystem;
using namespace svtreg;

namespace {

constexpr const char* kVersion = "0.1.0";

int default_threads() {
  if (const char* env = std::getenv("SVTREG_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ =
      std::chrono::steady_clock::now();
};

void write_manifest(const fs::path& dir, const std::string& command,
                    Record config, std::int64_t seed,
                    const std::vector<std::string>& input_files,
                    double wall_seconds) {
  Record manifest;
  manifest.set("command", command);
  manifest.set("version", std::string(kVersion));
  manifest.set("seed", seed);
  for (const auto& f : input_files) {
    manifest.set("input_digest:" + fs::path(f).filename().string(),
                 file_digest(f));
  }
  manifest.set("config", std::string("---"));
  std::ofstream out(dir / "manifest.txt");
  out << manifest.to_string() << config.to_string();
  out << "wall_seconds = " << format_double(wall_seconds) << '\n';
}

Record fit_record(const FitResult& r) {
  Record rec;
  rec.set("estimated_rank", static_cast<std::int64_t>(r.estimated_rank));
  rec.set("lambda", r.lambda_used);
  if (r.lambda2_used) rec.set("lambda2", *r.lambda2_used);
  if (r.iterations) rec.set("iterations", static_cast<std::int64_t>(*r.iterations));
  rec.set("converged", std::string(r.converged ? "true" : "false"));
  rec.set("objective", r.objective);
  rec.set("singular_values_fitted", r.singular_values_fitted);
  return rec;
}

// ---------------------------------------------------------------- approx ---

struct ApproxOpts {
  std::string input, output, weights_file;
  std::string method = "ssvt";
  double lambda = 0.0;
  double gamma = 0.0;
};

int run_approx(const ApproxOpts& opt) {
  Stopwatch timer;
  const Matrix y = read_csv_matrix(opt.input);
  const Index h = std::min(y.rows(), y.cols());
  const SvdFactorization f = thin_svd(y);

  Matrix result;
  Vector thresholded;
  if (opt.method == "hsvt") {
    result = hsvt(y, opt.lambda);
  } else if (opt.method == "ssvt") {
    result = ssvt(y, opt.lambda);
  } else if (opt.method == "asvt") {
    WeightVector w;
    if (!opt.weights_file.empty()) {
      const Matrix wm = read_csv_matrix(opt.weights_file);
      if (wm.size() != h) {
        throw contract_error("weights file must hold min(rows,cols) values");
      }
      w.w = Eigen::Map<const Vector>(wm.data(), wm.size());
      try {
        validate_weight_order(w);
      } catch (const contract_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
      }
    } else {
      w = weights_from_singular_values(f.d, opt.gamma);
    }
    result = asvt(y, opt.lambda, w);
  } else {
    std::cerr << "error: unknown approx method '" << opt.method << "'\n";
    return 3;
  }

  const fs::path out_path(opt.output);
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  write_csv_matrix(opt.output, result);

  Record side;
  side.set("method", opt.method);
  side.set("lambda", opt.lambda);
  if (opt.method == "asvt") side.set("gamma", opt.gamma);
  side.set("original_singular_values", f.d);
  side.set("thresholded_singular_values", thin_svd(result).d);
  side.set("rank", static_cast<std::int64_t>(matrix_rank(result)));
  side.write(opt.output + ".record.txt");

  Record cfg;
  cfg.set("method", opt.method);
  cfg.set("lambda", opt.lambda);
  cfg.set("gamma", opt.gamma);
  write_manifest(out_path.has_parent_path() ? out_path.parent_path() : ".",
                 "approx", std::move(cfg), 0, {opt.input}, timer.seconds());
  return 0;
}

// ------------------------------------------------------------------- fit ---

struct FitOpts {
  std::string y_file, x_file, output_dir;
  std::string method = "ann";
  std::optional<double> lambda;
  double lambda2 = 0.0;
  double gamma = 2.0;
  int cv_folds = 10;
  std::int64_t seed = 1;
  int grid_size = 100;
};

int run_fit(const FitOpts& opt) {
  Stopwatch timer;
  const Matrix y = read_csv_matrix(opt.y_file);
  const Matrix x = read_csv_matrix(opt.x_file);
  if (y.rows() != x.rows()) {
    throw contract_error("Y and X must have the same number of rows");
  }
  const auto method = parse_method(opt.method);
  if (!method) {
    std::cerr << "error: unknown method '" << opt.method << "'\n";
    return 3;
  }
  EstimatorConfig cfg;
  cfg.method = *method;
  cfg.lambda2 = opt.lambda2;
  cfg.gamma = opt.gamma;

  const fs::path dir(opt.output_dir);
  fs::create_directories(dir);

  std::optional<CvReport> cv;
  if (opt.lambda) {
    cfg.lambda = *opt.lambda;
  } else if (cfg.method != Method::Ols) {
    const bool two_dim = cfg.method == Method::Rorr || cfg.method == Method::Roann;
    cv = two_dim ? cross_validate_2d(y, x, cfg, opt.cv_folds, opt.seed,
                                     {0.0, 0.01, 0.1, 1.0, 10.0}, opt.grid_size)
                 : cross_validate(y, x, cfg, opt.cv_folds, opt.seed,
                                  opt.grid_size);
    cfg.lambda = cv->best_lambda;
    if (two_dim) cfg.lambda2 = cv->lambda2;
  }

  const FitResult result = fit(y, x, cfg);
  write_csv_matrix((dir / "coefficients.csv").string(), result.coefficients);
  write_csv_matrix((dir / "fitted.csv").string(), result.fitted);
  fit_record(result).write((dir / "fit.txt").string());

  if (cv) {
    Record rec;
    rec.set("fold_count", static_cast<std::int64_t>(cv->fold_count));
    rec.set("fold_assignment_seed", cv->fold_assignment_seed);
    rec.set("best_lambda", cv->best_lambda);
    rec.set("best_cv_error", cv->best_error);
    rec.set("lambda2", cv->lambda2);
    rec.set("null_error", cv->null_error);
    rec.set("relative_cve", cv->null_error > 0 ? cv->best_error / cv->null_error
                                               : 0.0);
    rec.set("invalid_cells", static_cast<std::int64_t>(cv->invalid_cells));
    Vector grid(static_cast<Index>(cv->grid.values.size()));
    Vector errs(static_cast<Index>(cv->cv_errors.size()));
    for (Index i = 0; i < grid.size(); ++i) {
      grid(i) = cv->grid.values[static_cast<std::size_t>(i)];
      errs(i) = cv->cv_errors[static_cast<std::size_t>(i)];
    }
    rec.set("grid", grid);
    rec.set("cv_errors", errs);
    rec.write((dir / "cv.txt").string());
  }

  Record cfgrec;
  cfgrec.set("method", method_name(cfg.method));
  cfgrec.set("lambda", cfg.lambda);
  cfgrec.set("lambda2", cfg.lambda2);
  cfgrec.set("gamma", cfg.gamma);
  cfgrec.set("cv_folds", static_cast<std::int64_t>(opt.cv_folds));
  cfgrec.set("grid_size", static_cast<std::int64_t>(opt.grid_size));
  write_manifest(dir, "fit", std::move(cfgrec), opt.seed,
                 {opt.y_file, opt.x_file}, timer.seconds());
  if (!result.converged) {
    std::cerr << "warning: solver stopped at max_iter without meeting tol\n";
  }
  return 0;
}

// -------------------------------------------------------------- simulate ---

struct SimOpts {
  SimulationScenario scenario;
  std::string methods = "ann2,rsc";
  std::string tuning = "oracle";
  std::string output_dir = ".";
  int threads = default_threads();
  int cv_folds = 10;
  int grid_size = 100;
};

int run_simulate(const SimOpts& opt) {
  Stopwatch timer;
  validate_scenario(opt.scenario);
  const auto methods = parse_method_list(opt.methods);
  TuningMode mode;
  if (opt.tuning == "cv") {
    mode = TuningMode::Cv;
  } else if (opt.tuning == "oracle") {
    mode = TuningMode::Oracle;
  } else {
    std::cerr << "error: --tuning must be cv or oracle\n";
    return 3;
  }

  const auto rows = run_experiment(opt.scenario, methods, mode, opt.threads,
                                   opt.cv_folds, opt.grid_size);

  const fs::path dir(opt.output_dir);
  fs::create_directories(dir);

  // Machine-readable record: deterministic fields only (timing goes to the
  // manifest and the human-readable table).
  {
    Record rec;
    rec.set("model", static_cast<std::int64_t>(opt.scenario.model));
    rec.set("n", static_cast<std::int64_t>(opt.scenario.n));
    rec.set("p", static_cast<std::int64_t>(opt.scenario.p));
    rec.set("q", static_cast<std::int64_t>(opt.scenario.q));
    rec.set("r_star", static_cast<std::int64_t>(opt.scenario.r_star));
    rec.set("r_x", static_cast<std::int64_t>(opt.scenario.r_x));
    rec.set("rho", opt.scenario.rho);
    rec.set("b", opt.scenario.b);
    rec.set("sigma", opt.scenario.sigma);
    rec.set("replications", static_cast<std::int64_t>(opt.scenario.replications));
    rec.set("seed", static_cast<std::int64_t>(opt.scenario.seed));
    rec.set("tuning", opt.tuning);
    for (const auto& row : rows) {
      const std::string p = "method:" + row.label + ":";
      rec.set(p + "est_mean", row.est_mean);
      rec.set(p + "est_sd", row.est_sd);
      rec.set(p + "pred_mean", row.pred_mean);
      rec.set(p + "pred_sd", row.pred_sd);
      rec.set(p + "mean_rank", row.mean_rank);
      rec.set(p + "pct_exact_rank", row.pct_exact_rank);
      rec.set(p + "failures", static_cast<std::int64_t>(row.failures));
    }
    rec.write((dir / "results.txt").string());
  }
  {
    std::ofstream table(dir / "table.txt");
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-10s %14s %14s %10s %10s %10s\n",
                  "method", "Est(sd)", "Pred(sd)", "Rank", "Exact%", "Time(s)");
    table << buf;
    std::cout << buf;
    for (const auto& row : rows) {
      std::snprintf(buf, sizeof(buf),
                    "%-10s %7.3f (%4.2f) %7.3f (%4.2f) %10.2f %10.1f %10.3f\n",
                    row.label.c_str(), row.est_mean, row.est_sd, row.pred_mean,
                    row.pred_sd, row.mean_rank, row.pct_exact_rank,
                    row.mean_seconds);
      table << buf;
      std::cout << buf;
    }
  }

  Record cfg;
  cfg.set("methods", opt.methods);
  cfg.set("tuning", opt.tuning);
  cfg.set("cv_folds", static_cast<std::int64_t>(opt.cv_folds));
  cfg.set("grid_size", static_cast<std::int64_t>(opt.grid_size));
  write_manifest(dir, "simulate", std::move(cfg),
                 static_cast<std::int64_t>(opt.scenario.seed), {},
                 timer.seconds());
  return 0;
}

// ----------------------------------------------------------------- check ---

struct CheckOpts {
  std::string suite = "all";
  std::string output_dir = ".";
  double sigma = 1.0;
  double delta = 1.0;
  double theta = 1.0;
  double gamma = 2.0;
  int trials = 200;
  std::int64_t seed = 7;
};

int run_check(const CheckOpts& opt) {
  Stopwatch timer;
  TheoryCheckConfig cfg;
  cfg.delta = opt.delta;
  cfg.theta = opt.theta;
  cfg.gamma = opt.gamma;
  cfg.trials = opt.trials;
  cfg.seed = static_cast<std::uint64_t>(opt.seed);
  validate_check_config(cfg);

  std::vector<CheckReport> reports;
  const bool all = opt.suite == "all";
  if (all || opt.suite == "optimality") {
    reports.push_back(check_asvt_optimality(100, 25, 500, cfg.seed));
  }
  if (all || opt.suite == "convexity") {
    reports.push_back(check_convexity_dichotomy(4, 10000, cfg.seed));
  }
  if (all || opt.suite == "rank-consistency") {
    SimulationScenario s;
    s.model = 2;
    s.n = 40;
    s.p = 30;
    s.q = 50;
    s.r_star = 5;
    s.r_x = 20;
    s.rho = 0.0;
    s.b = 1.0;
    s.sigma = opt.sigma;
    s.seed = cfg.seed;
    s.replications = 1;
    reports.push_back(check_rank_consistency(s, cfg));
  }
  if (all || opt.suite == "noise-spectrum") {
    reports.push_back(
        check_noise_spectrum(50, 30, 20, opt.sigma, std::max(cfg.trials, 500),
                             cfg.seed));
  }
  if (all || opt.suite == "prediction-bound") {
    SimulationScenario s;
    s.model = 1;
    s.n = 100;
    s.p = 25;
    s.q = 25;
    s.r_star = 5;
    s.rho = 0.0;
    s.b = 1.0;
    s.sigma = opt.sigma;
    s.seed = cfg.seed;
    s.replications = 1;
    reports.push_back(check_prediction_bound(s, cfg, false));
    reports.push_back(check_prediction_bound(s, cfg, true));
  }
  if (reports.empty()) {
    std::cerr << "error: unknown suite '" << opt.suite << "'\n";
    return 3;
  }

  const fs::path dir(opt.output_dir);
  fs::create_directories(dir);
  bool any_fail = false;
  {
    Record rec;
    for (const auto& r : reports) {
      std::cout << r.status << "  " << r.name << "  claimed=" << r.claimed
                << " empirical=" << r.empirical << " slack=" << r.slack << "  "
                << r.detail << "\n";
      rec.set("check:" + r.name + ":status", r.status);
      rec.set("check:" + r.name + ":claimed", r.claimed);
      rec.set("check:" + r.name + ":empirical", r.empirical);
      rec.set("check:" + r.name + ":slack", r.slack);
      rec.set("check:" + r.name + ":detail", r.detail);
      if (r.status == "FAIL") any_fail = true;
    }
    rec.write((dir / "checks.txt").string());
  }

  Record cfgrec;
  cfgrec.set("suite", opt.suite);
  cfgrec.set("sigma", opt.sigma);
  cfgrec.set("delta", opt.delta);
  cfgrec.set("theta", opt.theta);
  cfgrec.set("gamma", opt.gamma);
  cfgrec.set("trials", static_cast<std::int64_t>(opt.trials));
  write_manifest(dir, "check", std::move(cfgrec), opt.seed, {},
                 timer.seconds());
  return any_fail ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Singular-value penalized low-rank approximation and "
               "reduced-rank regression"};
  app.require_subcommand(1);

  ApproxOpts approx_opts;
  auto* approx = app.add_subcommand("approx", "threshold a matrix in the SVD domain");
  approx->add_option("--input", approx_opts.input)->required();
  approx->add_option("--output", approx_opts.output)->required();
  approx->add_option("--method", approx_opts.method)
      ->check(CLI::IsMember({"hsvt", "ssvt", "asvt"}));
  approx->add_option("--lambda", approx_opts.lambda);
  approx->add_option("--gamma", approx_opts.gamma);
  approx->add_option("--weights", approx_opts.weights_file);

  FitOpts fit_opts;
  auto* fitcmd = app.add_subcommand("fit", "fit a reduced-rank estimator");
  fitcmd->add_option("--y", fit_opts.y_file)->required();
  fitcmd->add_option("--x", fit_opts.x_file)->required();
  fitcmd->add_option("--output-dir", fit_opts.output_dir)->required();
  fitcmd->add_option("--method", fit_opts.method)
      ->check(CLI::IsMember({"ols", "rsc", "nnp", "ann", "rorr", "roann"}));
  double lambda_in = -1;
  fitcmd->add_option("--lambda", lambda_in);
  fitcmd->add_option("--lambda2", fit_opts.lambda2);
  fitcmd->add_option("--gamma", fit_opts.gamma);
  fitcmd->add_option("--cv-folds", fit_opts.cv_folds);
  fitcmd->add_option("--seed", fit_opts.seed);
  fitcmd->add_option("--grid-size", fit_opts.grid_size);

  SimOpts sim_opts;
  auto* sim = app.add_subcommand("simulate", "run a replication experiment");
  sim->add_option("--model", sim_opts.scenario.model);
  sim->add_option("--n", sim_opts.scenario.n);
  sim->add_option("--p", sim_opts.scenario.p);
  sim->add_option("--q", sim_opts.scenario.q);
  sim->add_option("--rstar", sim_opts.scenario.r_star);
  sim->add_option("--rx", sim_opts.scenario.r_x);
  sim->add_option("--rho", sim_opts.scenario.rho);
  sim->add_option("--b", sim_opts.scenario.b);
  sim->add_option("--sigma", sim_opts.scenario.sigma);
  sim->add_option("--reps", sim_opts.scenario.replications);
  sim->add_option("--seed", sim_opts.scenario.seed);
  sim->add_option("--methods", sim_opts.methods);
  sim->add_option("--tuning", sim_opts.tuning);
  sim->add_option("--output-dir", sim_opts.output_dir);
  sim->add_option("--threads", sim_opts.threads);
  sim->add_option("--cv-folds", sim_opts.cv_folds);
  sim->add_option("--grid-size", sim_opts.grid_size);

  CheckOpts check_opts;
  auto* check = app.add_subcommand("check", "run empirical theory checks");
  check->add_option("--suite", check_opts.suite)
      ->check(CLI::IsMember({"optimality", "convexity", "rank-consistency",
                             "noise-spectrum", "prediction-bound", "all"}));
  check->add_option("--output-dir", check_opts.output_dir);
  check->add_option("--sigma", check_opts.sigma);
  check->add_option("--delta", check_opts.delta);
  check->add_option("--theta", check_opts.theta);
  check->add_option("--gamma", check_opts.gamma);
  check->add_option("--trials", check_opts.trials);
  check->add_option("--seed", check_opts.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 3;
  }

  try {
    if (approx->parsed()) return run_approx(approx_opts);
    if (fitcmd->parsed()) {
      if (fitcmd->count("--lambda") > 0) fit_opts.lambda = lambda_in;
      return run_fit(fit_opts);
    }
    if (sim->parsed()) return run_simulate(sim_opts);
    if (check->parsed()) return run_check(check_opts);
  } catch (const contract_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 3;
}

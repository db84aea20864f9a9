#include "svtreg/theory_checks.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "svtreg/estimators.hpp"
#include "svtreg/matrix_core.hpp"
#include "svtreg/thresholding.hpp"

namespace svtreg {

void validate_check_config(const TheoryCheckConfig& cfg) {
  if (!(cfg.delta > 0.0 && cfg.delta <= 1.0)) {
    throw contract_error("check config: delta must be in (0,1]");
  }
  if (!(cfg.theta > 0.0)) throw contract_error("check config: theta must be > 0");
  if (!(cfg.a > 0.0 && cfg.a < 1.0)) {
    throw contract_error("check config: a must be in (0,1)");
  }
  if (!(cfg.M > 0.0)) throw contract_error("check config: M must be > 0");
  if (cfg.gamma < 0.0) throw contract_error("check config: gamma must be >= 0");
  if (cfg.trials < 1) throw contract_error("check config: trials must be >= 1");
}

namespace {

Matrix gaussian(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

double binom_sd(double p, int trials) {
  return std::sqrt(std::max(p * (1.0 - p), 1.0 / trials) / trials);
}

Vector singular_values(const Matrix& m) {
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues();
}

struct TrialData {
  Matrix x, c, e, y, p;
  Index r_x = 0;
  double margin = 0;  // d_{r*}(XC) / (2 lambda^(1/(gamma+1)))
};

// Draw one trial instance and scale the signal until the Assumption-2 style
// condition d_{r*}(XC) > signal_floor holds. Returns false when the budget
// on the scaling factor is exhausted.
bool draw_trial(const SimulationScenario& s, double signal_floor, Rng& rng,
                TrialData& out) {
  out.x = s.model == 1 ? gen_design_model1(s.n, s.p, s.rho, rng)
                       : gen_design_model2(s.n, s.p, s.r_x, s.rho, rng);
  out.r_x = matrix_rank(out.x);
  out.c = gen_coefficients(s.p, s.q, s.r_star, s.b, rng);
  const Vector d_xc = singular_values(out.x * out.c);
  const double d_rstar = d_xc(s.r_star - 1);
  if (d_rstar <= signal_floor) {
    if (d_rstar <= 0.0) return false;
    const double scale = 1.05 * signal_floor / d_rstar;
    if (scale > 1e8) return false;
    out.c *= scale;
  }
  out.e = s.sigma * gaussian(s.n, s.q, rng);
  out.y = out.x * out.c + out.e;
  out.p = projector(out.x);
  out.margin = singular_values(out.x * out.c)(s.r_star - 1) / signal_floor;
  return true;
}

}  // namespace

CheckReport check_rank_consistency(const SimulationScenario& scenario,
                                   const TheoryCheckConfig& cfg) {
  validate_scenario(scenario);
  validate_check_config(cfg);
  CheckReport rep;
  rep.name = "rank-consistency";

  const Index r_x_nominal =
      scenario.model == 2 ? scenario.r_x : std::min(scenario.n, scenario.p);
  const double root_sum = std::sqrt(static_cast<double>(r_x_nominal)) +
                          std::sqrt(static_cast<double>(scenario.q));
  const double threshold =
      (1.0 + cfg.theta) * scenario.sigma * root_sum / cfg.delta;
  const double lambda = std::pow(threshold, cfg.gamma + 1.0);

  int recovered = 0;
  int rank_miss = 0;
  int noise_event = 0;
  double min_margin = 1e300;
  for (int t = 0; t < cfg.trials; ++t) {
    Rng rng = Rng::substream(cfg.seed, static_cast<std::uint64_t>(t));
    TrialData trial;
    if (!draw_trial(scenario, 2.0 * threshold, rng, trial)) {
      rep.status = "SKIP";
      rep.detail = "signal condition d_rstar(XC) > 2 lambda^(1/(gamma+1)) "
                   "unachievable within scaling budget";
      return rep;
    }
    min_margin = std::min(min_margin, trial.margin);
    const Vector d_py = singular_values(trial.p * trial.y);
    const Index r_hat = estimate_rank(d_py, lambda, cfg.gamma);
    if (r_hat == scenario.r_star) {
      ++recovered;
    } else {
      ++rank_miss;
    }
    if (singular_values(trial.p * trial.e)(0) >= cfg.delta * threshold) {
      ++noise_event;
    }
  }

  const double floor_prob =
      1.0 - std::exp(-cfg.theta * cfg.theta *
                     static_cast<double>(r_x_nominal + scenario.q) / 2.0);
  rep.claimed = floor_prob;
  rep.empirical = static_cast<double>(recovered) / cfg.trials;
  rep.slack = 3.0 * binom_sd(floor_prob, cfg.trials);

  // Rank-event bound: misses must not exceed the noise event frequency.
  const double miss_freq = static_cast<double>(rank_miss) / cfg.trials;
  const double event_freq = static_cast<double>(noise_event) / cfg.trials;
  const bool lemma_ok =
      miss_freq <= event_freq + 3.0 * binom_sd(event_freq, cfg.trials);

  std::ostringstream detail;
  detail << "lambda=" << lambda << " signal_margin=" << min_margin
         << " miss_freq=" << miss_freq << " noise_event_freq=" << event_freq;
  rep.detail = detail.str();
  rep.status =
      (rep.empirical >= floor_prob - rep.slack && lemma_ok) ? "PASS" : "FAIL";
  return rep;
}

CheckReport check_noise_spectrum(Index n, Index q, Index r_x, double sigma,
                                 int trials, std::uint64_t seed) {
  if (n < 1 || q < 1 || r_x < 1 || r_x > n) {
    throw contract_error("check_noise_spectrum: requires 1 <= r_x <= n");
  }
  if (sigma < 0 || trials < 1) {
    throw contract_error("check_noise_spectrum: bad sigma or trials");
  }
  CheckReport rep;
  rep.name = "noise-spectrum";

  // One fixed design; the lemma conditions on X.
  Rng design_rng = Rng::substream(seed, 0);
  const Matrix p_mat = r_x == n ? Matrix(Matrix::Identity(n, n))
                                : projector(gaussian(n, r_x, design_rng));

  std::vector<double> d1(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(t) + 1);
    const Matrix e = sigma * gaussian(n, q, rng);
    d1[static_cast<std::size_t>(t)] = singular_values(p_mat * e)(0);
  }
  double mean = 0;
  for (double v : d1) mean += v;
  mean /= trials;
  double var = 0;
  for (double v : d1) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(trials > 1 ? var / (trials - 1) : 0.0);

  const double bound = sigma * (std::sqrt(static_cast<double>(r_x)) +
                                std::sqrt(static_cast<double>(q)));
  rep.claimed = bound;
  rep.empirical = mean;
  rep.slack = 3.0 * sd / std::sqrt(static_cast<double>(trials));
  bool ok = mean <= bound + rep.slack;

  std::ostringstream detail;
  detail << "mean_d1=" << mean;
  std::vector<double> tail_points;
  if (sigma > 0) tail_points = {1.0, 2.0};  // degenerate at sigma = 0
  for (double t_val : tail_points) {
    int exceed = 0;
    for (double v : d1) {
      if (v >= mean + sigma * t_val) ++exceed;
    }
    const double freq = static_cast<double>(exceed) / trials;
    const double tail = std::exp(-t_val * t_val / 2.0);
    const bool tail_ok = freq <= tail + 3.0 * binom_sd(tail, trials);
    ok = ok && tail_ok;
    detail << " tail_t" << t_val << "=" << freq << "/" << tail;
  }
  rep.detail = detail.str();
  rep.status = ok ? "PASS" : "FAIL";
  return rep;
}

CheckReport check_prediction_bound(const SimulationScenario& scenario,
                                   const TheoryCheckConfig& cfg,
                                   bool fixed_weights) {
  validate_scenario(scenario);
  validate_check_config(cfg);
  CheckReport rep;
  rep.name = fixed_weights ? "prediction-bound-fixed" : "prediction-bound";

  const Index r_x_nominal =
      scenario.model == 2 ? scenario.r_x : std::min(scenario.n, scenario.p);
  const double root_sum = std::sqrt(static_cast<double>(r_x_nominal)) +
                          std::sqrt(static_cast<double>(scenario.q));
  const double noise_scale = (1.0 + cfg.theta) * scenario.sigma * root_sum;

  double lambda, signal_floor;
  if (fixed_weights) {
    lambda = noise_scale / (cfg.delta * cfg.M);
    signal_floor = 2.0 * lambda * cfg.M;
  } else {
    lambda = std::pow(noise_scale / cfg.delta, cfg.gamma + 1.0);
    signal_floor = 2.0 * std::pow(lambda, 1.0 / (cfg.gamma + 1.0));
  }

  int holds = 0;
  for (int t = 0; t < cfg.trials; ++t) {
    Rng rng = Rng::substream(cfg.seed ^ 0x5bd1e995ULL,
                             static_cast<std::uint64_t>(t));
    TrialData trial;
    if (!draw_trial(scenario, signal_floor, rng, trial)) {
      rep.status = "SKIP";
      rep.detail = "signal condition unachievable within scaling budget";
      return rep;
    }
    FitResult fitres;
    if (fixed_weights) {
      WeightVector w;
      w.w = Vector::Ones(scenario.q);
      fitres = ann_fit(trial.y, trial.x, lambda, 0.0, w);
    } else {
      fitres = ann_fit(trial.y, trial.x, lambda, cfg.gamma);
    }
    const double lhs = (fitres.fitted - trial.x * trial.c).squaredNorm();
    const Vector d_xc = singular_values(trial.x * trial.c);
    const double c_ratio = d_xc(0) / d_xc(scenario.r_star - 1);
    double constant;
    if (fixed_weights) {
      constant = std::sqrt(2.0) + 2.0 / cfg.delta - 1.0 / (cfg.M * cfg.delta);
    } else {
      constant = std::sqrt(2.0) +
                 2.0 * std::pow(2.0 - cfg.delta, -cfg.gamma) / cfg.delta -
                 std::pow(2.0 * c_ratio + cfg.delta, -cfg.gamma) / cfg.delta;
    }
    const double rhs = 4.0 * constant * constant * (1.0 + cfg.theta) *
                       (1.0 + cfg.theta) * scenario.sigma * scenario.sigma *
                       root_sum * root_sum * static_cast<double>(scenario.r_star);
    if (lhs <= rhs) ++holds;
  }

  const double floor_prob =
      1.0 - std::exp(-cfg.theta * cfg.theta *
                     static_cast<double>(r_x_nominal + scenario.q) / 2.0);
  rep.claimed = floor_prob;
  rep.empirical = static_cast<double>(holds) / cfg.trials;
  rep.slack = 3.0 * binom_sd(floor_prob, cfg.trials);
  rep.status = rep.empirical >= floor_prob - rep.slack ? "PASS" : "FAIL";
  std::ostringstream detail;
  detail << "lambda=" << lambda << " holds=" << holds << "/" << cfg.trials;
  rep.detail = detail.str();
  return rep;
}

CheckReport check_convexity_dichotomy(Index h, int trials,
                                      std::uint64_t seed) {
  if (h < 2) throw contract_error("check_convexity_dichotomy: h must be >= 2");
  if (trials < 1) throw contract_error("check_convexity_dichotomy: trials >= 1");
  CheckReport rep;
  rep.name = "convexity";
  constexpr double tol = 1e-9;

  // (a) non-increasing weights: midpoint inequality must never fail.
  int violations = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(t));
    WeightVector w;
    w.w.resize(h);
    for (Index i = 0; i < h; ++i) w.w(i) = rng.uniform();
    std::sort(w.w.data(), w.w.data() + h, std::greater<double>());
    const Matrix a = gaussian(h, h, rng);
    const Matrix b = gaussian(h, h, rng);
    const double mid = adaptive_nuclear_norm(Matrix(0.5 * (a + b)), w);
    const double avg = 0.5 * (adaptive_nuclear_norm(a, w) +
                              adaptive_nuclear_norm(b, w));
    if (mid > avg + tol) ++violations;
  }

  // (b) every adjacent increasing pair: the diagonal construction
  // c_ii = i with entries swapped at (h-k, h-k+1) gives midpoint excess
  // exactly 0.5 (w_{k+1} - w_k).
  double max_excess_err = 0;
  Rng rng_b = Rng::substream(seed ^ 0xabcdULL, 0);
  for (Index k = 1; k < h; ++k) {
    const double jump = 0.25 + rng_b.uniform();  // w_{k+1} - w_k > 0
    WeightVector w;
    w.w.resize(h);
    for (Index i = 0; i < h; ++i) w.w(i) = i < k ? 1.0 : 1.0 + jump;
    Matrix c = Matrix::Zero(h, h);
    Matrix d = Matrix::Zero(h, h);
    for (Index i = 0; i < h; ++i) {
      c(i, i) = static_cast<double>(i + 1);
      d(i, i) = static_cast<double>(i + 1);
    }
    std::swap(d(h - k - 1, h - k - 1), d(h - k, h - k));
    const double mid = adaptive_nuclear_norm(Matrix(0.5 * (c + d)), w);
    const double avg = 0.5 * (adaptive_nuclear_norm(c, w) +
                              adaptive_nuclear_norm(d, w));
    max_excess_err = std::max(max_excess_err,
                              std::abs((mid - avg) - 0.5 * jump));
  }

  // The worked 2x2 example: w=(1,2), C1=diag(2,1), C2=diag(1,2).
  WeightVector w12;
  w12.w.resize(2);
  w12.w << 1.0, 2.0;
  Matrix c1 = Matrix::Zero(2, 2), c2 = Matrix::Zero(2, 2);
  c1(0, 0) = 2; c1(1, 1) = 1;
  c2(0, 0) = 1; c2(1, 1) = 2;
  const double f1 = adaptive_nuclear_norm(c1, w12);
  const double f2 = adaptive_nuclear_norm(c2, w12);
  const double fmid = adaptive_nuclear_norm(Matrix(0.5 * (c1 + c2)), w12);
  const bool example_ok = std::abs(f1 - 4.0) < tol && std::abs(f2 - 4.0) < tol &&
                          std::abs(fmid - 4.5) < tol;

  rep.claimed = 0.0;
  rep.empirical = static_cast<double>(violations);
  rep.slack = 0.0;
  std::ostringstream detail;
  detail << "convex_violations=" << violations
         << " counterexample_excess_err=" << max_excess_err
         << " worked_example=[" << f1 << "," << f2 << "," << fmid << "]";
  rep.detail = detail.str();
  rep.status = (violations == 0 && max_excess_err <= tol && example_ok)
                   ? "PASS"
                   : "FAIL";
  return rep;
}

CheckReport check_asvt_optimality(int instances, int grid_per_dim,
                                  int perturbations, std::uint64_t seed) {
  if (instances < 1 || grid_per_dim < 2 || perturbations < 0) {
    throw contract_error("check_asvt_optimality: bad parameters");
  }
  CheckReport rep;
  rep.name = "optimality";
  constexpr double tol = 1e-9;

  double worst_margin = 0.0;  // most negative (objective_hat - objective_cand)
  for (int inst = 0; inst < instances; ++inst) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(inst));
    const Index rows = 2 + static_cast<Index>(rng.next() % 7);  // 2..8
    const Index cols = 2 + static_cast<Index>(rng.next() % 7);
    const Index h = std::min(rows, cols);
    const Matrix y = gaussian(rows, cols, rng);
    WeightVector w;
    w.w.resize(h);
    for (Index i = 0; i < h; ++i) w.w(i) = 2.0 * rng.uniform();
    std::sort(w.w.data(), w.w.data() + h);
    const double lambda = 1.5 * rng.uniform();

    const SvdFactorization f = thin_svd(y);
    const Vector g_hat = asvt_values(f.d, lambda, w);
    auto frame_objective = [&](const Vector& g) {
      // candidate U Diag(g) V': data term is exact in the frame, the
      // penalty needs |g| sorted non-increasing.
      double data = 0;
      for (Index i = 0; i < h; ++i) {
        const double diff = f.d(i) - g(i);
        data += diff * diff;
      }
      Vector sorted = g.cwiseAbs();
      std::sort(sorted.data(), sorted.data() + h, std::greater<double>());
      return 0.5 * data + lambda * w.w.dot(sorted);
    };
    const double obj_hat = frame_objective(g_hat);

    // (a) diagonal grid over the top three components, others held at the
    // solution value.
    const Index grid_dims = std::min<Index>(3, h);
    const double top = f.d(0);
    std::vector<Index> idx(static_cast<std::size_t>(grid_dims), 0);
    Vector g = g_hat;
    for (;;) {
      for (Index dim = 0; dim < grid_dims; ++dim) {
        g(dim) = top * static_cast<double>(idx[static_cast<std::size_t>(dim)]) /
                 (grid_per_dim - 1);
      }
      worst_margin = std::min(worst_margin, frame_objective(g) - obj_hat);
      Index dim = 0;
      for (; dim < grid_dims; ++dim) {
        if (++idx[static_cast<std::size_t>(dim)] < grid_per_dim) break;
        idx[static_cast<std::size_t>(dim)] = 0;
      }
      if (dim == grid_dims) break;
    }

    // (b) random perturbations of the solution.
    const Matrix c_hat = f.u * g_hat.asDiagonal() * f.v.transpose();
    for (int pert = 0; pert < perturbations; ++pert) {
      const double eps = (pert % 2 == 0) ? 1e-3 : 1e-4;
      Matrix delta(rows, cols);
      for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) delta(i, j) = rng.normal();
      const Matrix cand = c_hat + eps * delta;
      const double obj_cand = 0.5 * (y - cand).squaredNorm() +
                              lambda * adaptive_nuclear_norm(cand, w);
      worst_margin = std::min(worst_margin, obj_cand - obj_hat);
    }
  }

  rep.claimed = -tol;
  rep.empirical = worst_margin;
  rep.slack = tol;
  std::ostringstream detail;
  detail << "worst_margin=" << worst_margin;
  rep.detail = detail.str();
  rep.status = worst_margin >= -tol ? "PASS" : "FAIL";
  return rep;
}

}  // namespace svtreg

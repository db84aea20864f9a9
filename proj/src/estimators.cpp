#include "svtreg/estimators.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace svtreg {

std::string method_name(Method m) {
  switch (m) {
    case Method::Ols: return "ols";
    case Method::Rsc: return "rsc";
    case Method::Nnp: return "nnp";
    case Method::Ann: return "ann";
    case Method::Rorr: return "rorr";
    case Method::Roann: return "roann";
  }
  return "?";
}

std::optional<Method> parse_method(const std::string& name) {
  if (name == "ols") return Method::Ols;
  if (name == "rsc") return Method::Rsc;
  if (name == "nnp") return Method::Nnp;
  if (name == "ann") return Method::Ann;
  if (name == "rorr") return Method::Rorr;
  if (name == "roann") return Method::Roann;
  return std::nullopt;
}

namespace {

void check_shapes(const Matrix& y, const Matrix& x) {
  require_finite(y, "fit: y");
  require_finite(x, "fit: x");
  if (y.rows() != x.rows()) {
    throw contract_error("fit: Y and X must have the same number of rows");
  }
}

Index rank_from_values(const Vector& d, double rel_tol) {
  if (d.size() == 0 || d(0) <= 0.0) return 0;
  const double cutoff = rel_tol * d(0);
  Index r = 0;
  for (Index i = 0; i < d.size(); ++i)
    if (d(i) > cutoff) ++r;
  return r;
}

// Shared assembly for the thresholded-SVD family: given the per-component
// values g the coefficient and fitted matrices follow from the frames.
FitResult assemble_path_fit(const SolutionPath& path, const Vector& g) {
  FitResult out;
  out.coefficients = path.coef_frame * g.asDiagonal() * path.v.transpose();
  out.fitted = path.fitted_frame * g.asDiagonal() * path.v.transpose();
  out.singular_values_fitted = g;
  return out;
}

SolutionPath path_from_backbone(const Matrix& x, Matrix c_tilde, Matrix gram,
                                double lambda2) {
  SolutionPath path;
  path.lambda2 = lambda2;
  path.c_tilde = std::move(c_tilde);
  // gram = (X C~)'(X C~) of the (possibly augmented) problem, up to
  // round-off; symmetrize before the eigensolve.
  auto [evals, v] = sym_eig(0.5 * (gram + gram.transpose()), 1e-6);
  path.v = std::move(v);
  path.d = evals.array().max(0.0).sqrt().matrix();
  const double cutoff =
      default_tolerances().rank_rel * (path.d.size() > 0 ? path.d(0) : 0.0);
  Vector dinv = Vector::Zero(path.d.size());
  for (Index i = 0; i < path.d.size(); ++i) {
    if (path.d(i) > cutoff) dinv(i) = 1.0 / path.d(i);
  }
  path.coef_frame = path.c_tilde * path.v * dinv.asDiagonal();
  path.fitted_frame = x * path.coef_frame;
  return path;
}

}  // namespace

SolutionPath build_path(const Matrix& y, const Matrix& x) {
  check_shapes(y, x);
  Matrix c_tilde = pseudo_inverse(x) * y;
  Matrix xc = x * c_tilde;
  return path_from_backbone(x, std::move(c_tilde), xc.transpose() * xc, 0.0);
}

SolutionPath build_ridge_path(const Matrix& y, const Matrix& x,
                              double lambda2) {
  check_shapes(y, x);
  if (lambda2 < 0) throw contract_error("lambda2 must be non-negative");
  if (lambda2 == 0.0) return build_path(y, x);
  const Index n = x.rows();
  const Index p = x.cols();
  const Matrix xty = x.transpose() * y;
  Matrix c_tilde;
  if (p > 2 * n) {
    // Woodbury: (X'X + l2 I)^-1 = I/l2 - X'(I + XX'/l2)^-1 X / l2^2
    Matrix inner = Matrix::Identity(n, n) + x * x.transpose() / lambda2;
    c_tilde = xty / lambda2 -
              x.transpose() * inner.ldlt().solve(x * xty) / (lambda2 * lambda2);
  } else {
    Matrix gram = x.transpose() * x;
    gram.diagonal().array() += lambda2;
    c_tilde = gram.ldlt().solve(xty);
  }
  // (X*C~)'(X*C~) for the augmented design equals C~'(X'X + l2 I)C~ = C~'X'Y.
  Matrix gram_fit = c_tilde.transpose() * xty;
  return path_from_backbone(x, std::move(c_tilde), std::move(gram_fit),
                            lambda2);
}

FitResult ols_fit(const Matrix& y, const Matrix& x) {
  check_shapes(y, x);
  FitResult out;
  out.coefficients = pseudo_inverse(x) * y;
  out.fitted = x * out.coefficients;
  Eigen::BDCSVD<Matrix> svd(out.fitted);
  out.singular_values_fitted = svd.singularValues();
  out.estimated_rank =
      rank_from_values(out.singular_values_fitted, default_tolerances().rank_rel);
  out.objective = 0.5 * (y - out.fitted).squaredNorm();
  return out;
}

FitResult rsc_from_path(const SolutionPath& path, const Matrix& y,
                        double lambda) {
  if (lambda < 0) throw contract_error("rsc: lambda must be non-negative");
  const double threshold = std::sqrt(2.0 * lambda);
  Vector g = path.d;
  Index rank = 0;
  for (Index i = 0; i < g.size(); ++i) {
    if (g(i) > threshold && g(i) > 0.0)
      ++rank;
    else
      g(i) = 0.0;
  }
  FitResult out = assemble_path_fit(path, g);
  out.estimated_rank = rank;
  out.lambda_used = lambda;
  out.objective =
      0.5 * (y - out.fitted).squaredNorm() + lambda * static_cast<double>(rank);
  return out;
}

FitResult ann_from_path(const SolutionPath& path, const Matrix& y,
                        double lambda, double gamma,
                        const std::optional<WeightVector>& weights) {
  if (lambda < 0) throw contract_error("ann: lambda must be non-negative");
  WeightVector w =
      weights ? *weights : weights_from_singular_values(path.d, gamma);
  if (weights) validate_weight_order(w);
  const Vector g = asvt_values(path.d, lambda, w);
  FitResult out = assemble_path_fit(path, g);
  out.lambda_used = lambda;
  if (!weights) {
    out.estimated_rank = estimate_rank(path.d, lambda, gamma);
  } else {
    // Fixed-weight rule: count d_i(PY) strictly above its threshold level.
    Index r = 0;
    for (Index i = 0; i < path.d.size(); ++i) {
      if (!std::isinf(w.w(i)) && path.d(i) > lambda * w.w(i) && path.d(i) > 0.0)
        r = i + 1;
    }
    out.estimated_rank = lambda == 0.0 ? rank_from_values(path.d, default_tolerances().rank_rel) : r;
  }
  out.objective =
      0.5 * (y - out.fitted).squaredNorm() + lambda * adaptive_nuclear_norm(g, w);
  return out;
}

FitResult rorr_from_path(const SolutionPath& path, const Matrix& y,
                         double lambda) {
  FitResult out = rsc_from_path(path, y, lambda);
  out.lambda2_used = path.lambda2;
  if (path.lambda2 > 0.0) {
    // Rank and fitted singular values reported against the original design.
    Eigen::BDCSVD<Matrix> fit_svd(out.fitted);
    out.singular_values_fitted = fit_svd.singularValues();
    out.estimated_rank = rank_from_values(out.singular_values_fitted,
                                          default_tolerances().rank_rel);
    Eigen::BDCSVD<Matrix> coef_svd(out.coefficients);
    out.objective = 0.5 * (y - out.fitted).squaredNorm() +
                    lambda * static_cast<double>(out.estimated_rank) +
                    0.5 * path.lambda2 * coef_svd.singularValues().squaredNorm();
  }
  return out;
}

FitResult roann_from_path(const SolutionPath& path, const Matrix& y,
                          double lambda, double lambda2, double gamma,
                          const std::optional<WeightVector>& weights) {
  if (lambda2 < 0) throw contract_error("roann: lambda2 must be non-negative");
  WeightVector w =
      weights ? *weights : weights_from_singular_values(path.d, gamma);
  FitResult out = ann_from_path(path, y, lambda, gamma, weights);
  const double shrink = 1.0 / (1.0 + lambda2);
  out.coefficients *= shrink;
  out.fitted *= shrink;
  out.singular_values_fitted *= shrink;
  out.lambda2_used = lambda2;
  out.objective =
      0.5 * (y - out.fitted).squaredNorm() +
      lambda * adaptive_nuclear_norm(out.singular_values_fitted, w) +
      0.5 * lambda2 * out.singular_values_fitted.squaredNorm();
  return out;
}

FitResult rsc_fit(const Matrix& y, const Matrix& x, double lambda) {
  return rsc_from_path(build_path(y, x), y, lambda);
}

FitResult ann_fit(const Matrix& y, const Matrix& x, double lambda, double gamma,
                  const std::optional<WeightVector>& weights) {
  return ann_from_path(build_path(y, x), y, lambda, gamma, weights);
}

FitResult rorr_fit(const Matrix& y, const Matrix& x, double lambda,
                   double lambda2) {
  if (lambda2 < 0) throw contract_error("rorr: lambda2 must be non-negative");
  FitResult out = rorr_from_path(build_ridge_path(y, x, lambda2), y, lambda);
  out.lambda2_used = lambda2;
  return out;
}

FitResult roann_fit(const Matrix& y, const Matrix& x, double lambda,
                    double lambda2, double gamma,
                    const std::optional<WeightVector>& weights) {
  return roann_from_path(build_path(y, x), y, lambda, lambda2, gamma, weights);
}

FitResult nnp_fit(const Matrix& y, const Matrix& x, double lambda, int max_iter,
                  double tol, bool accelerate) {
  check_shapes(y, x);
  if (lambda < 0) throw contract_error("nnp: lambda must be non-negative");
  if (max_iter < 1) throw contract_error("nnp: max_iter must be >= 1");
  if (!(tol > 0)) throw contract_error("nnp: tol must be positive");

  Eigen::BDCSVD<Matrix> xsvd(x);
  const double d1 = xsvd.singularValues().size() > 0 ? xsvd.singularValues()(0) : 0.0;
  const double step_l = std::max(d1 * d1, 1e-300);

  const Index p = x.cols();
  const Index q = y.cols();
  Matrix c = Matrix::Zero(p, q);
  Matrix z = c;  // momentum iterate
  double t_prev = 1.0;

  auto objective = [&](const Matrix& cc) {
    Eigen::BDCSVD<Matrix> s(cc);
    return 0.5 * (y - x * cc).squaredNorm() + lambda * s.singularValues().sum();
  };

  double obj_prev = objective(c);
  int iter = 0;
  bool converged = false;
  for (; iter < max_iter; ++iter) {
    const Matrix& base = accelerate ? z : c;
    Matrix grad = x.transpose() * (x * base - y);
    Matrix c_next = ssvt(base - grad / step_l, lambda / step_l);
    if (accelerate) {
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_prev * t_prev));
      z = c_next + ((t_prev - 1.0) / t_next) * (c_next - c);
      t_prev = t_next;
    }
    c = std::move(c_next);
    const double obj = objective(c);
    if (std::abs(obj_prev - obj) < tol * std::max(1.0, std::abs(obj_prev))) {
      obj_prev = obj;
      converged = true;
      ++iter;
      break;
    }
    obj_prev = obj;
  }

  FitResult out;
  out.coefficients = std::move(c);
  out.fitted = x * out.coefficients;
  Eigen::BDCSVD<Matrix> fit_svd(out.fitted);
  out.singular_values_fitted = fit_svd.singularValues();
  out.estimated_rank = rank_from_values(out.singular_values_fitted,
                                        default_tolerances().rank_rel);
  out.lambda_used = lambda;
  out.iterations = iter;
  out.converged = converged;
  out.objective = obj_prev;
  return out;
}

Index estimate_rank(const Vector& py_singular_values, double lambda,
                    double gamma) {
  if (lambda < 0) throw contract_error("estimate_rank: lambda must be >= 0");
  if (gamma < 0) throw contract_error("estimate_rank: gamma must be >= 0");
  const double threshold = std::pow(lambda, 1.0 / (gamma + 1.0));
  Index r = 0;
  for (Index i = 0; i < py_singular_values.size(); ++i) {
    if (py_singular_values(i) > threshold) r = i + 1;
  }
  return r;
}

FitResult fit(const Matrix& y, const Matrix& x, const EstimatorConfig& config) {
  switch (config.method) {
    case Method::Ols:
      return ols_fit(y, x);
    case Method::Rsc:
      return rsc_fit(y, x, config.lambda);
    case Method::Ann:
      return ann_fit(y, x, config.lambda, config.gamma, config.weights);
    case Method::Nnp:
      return nnp_fit(y, x, config.lambda, config.nnp_max_iter, config.nnp_tol,
                     config.nnp_accelerate);
    case Method::Rorr:
      return rorr_fit(y, x, config.lambda, config.lambda2);
    case Method::Roann:
      return roann_fit(y, x, config.lambda, config.lambda2, config.gamma,
                       config.weights);
  }
  throw contract_error("fit: unknown method");
}

}  // namespace svtreg

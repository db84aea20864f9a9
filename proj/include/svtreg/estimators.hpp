#ifndef SVTREG_ESTIMATORS_HPP
#define SVTREG_ESTIMATORS_HPP

#include <optional>
#include <string>

#include "svtreg/thresholding.hpp"
#include "svtreg/types.hpp"

namespace svtreg {

enum class Method { Ols, Rsc, Nnp, Ann, Rorr, Roann };

std::string method_name(Method m);
std::optional<Method> parse_method(const std::string& name);

struct EstimatorConfig {
  Method method = Method::Ann;
  double lambda = 0.0;
  double lambda2 = 0.0;                  // ridge term, RoRR/RoANN only
  double gamma = 2.0;                    // adaptive weight power, ANN/RoANN
  std::optional<WeightVector> weights;   // fixed-weight variant
  int nnp_max_iter = 5000;
  double nnp_tol = 1e-7;
  bool nnp_accelerate = false;
};

struct FitResult {
  Matrix coefficients;            // p x q
  Matrix fitted;                  // n x q, X * coefficients
  Index estimated_rank = 0;
  Vector singular_values_fitted;  // of X * coefficients
  double lambda_used = 0.0;
  std::optional<double> lambda2_used;
  std::optional<int> iterations;  // NNP only
  bool converged = true;
  double objective = 0.0;         // penalized criterion at the solution
};

// One-time decomposition from which the whole RSC/ANN solution path is read
// off by thresholding singular values: eigendecomposition of Y'PY gives
// (v, d) with PY = u*Diag(d)*v', and any thresholded fit is
//   coefficients = coef_frame * Diag(g) * v',  fitted = fitted_frame * Diag(g) * v'.
// With lambda2 > 0 the backbone is the ridge solution of the augmented
// problem; fitted_frame still multiplies the original design.
struct SolutionPath {
  Matrix c_tilde;       // p x q backbone (LS or ridge) coefficients
  Matrix v;             // q x q right singular vectors of the fitted backbone
  Vector d;             // q singular values, non-increasing
  Matrix coef_frame;    // c_tilde * v * pinv(Diag(d))
  Matrix fitted_frame;  // x * coef_frame
  double lambda2 = 0.0;
};

SolutionPath build_path(const Matrix& y, const Matrix& x);
SolutionPath build_ridge_path(const Matrix& y, const Matrix& x, double lambda2);

FitResult ols_fit(const Matrix& y, const Matrix& x);
FitResult rsc_fit(const Matrix& y, const Matrix& x, double lambda);
FitResult ann_fit(const Matrix& y, const Matrix& x, double lambda, double gamma,
                  const std::optional<WeightVector>& weights = std::nullopt);
FitResult nnp_fit(const Matrix& y, const Matrix& x, double lambda,
                  int max_iter = 5000, double tol = 1e-7,
                  bool accelerate = false);
FitResult rorr_fit(const Matrix& y, const Matrix& x, double lambda,
                   double lambda2);
FitResult roann_fit(const Matrix& y, const Matrix& x, double lambda,
                    double lambda2, double gamma,
                    const std::optional<WeightVector>& weights = std::nullopt);

FitResult rsc_from_path(const SolutionPath& path, const Matrix& y,
                        double lambda);
FitResult ann_from_path(const SolutionPath& path, const Matrix& y,
                        double lambda, double gamma,
                        const std::optional<WeightVector>& weights = std::nullopt);
FitResult rorr_from_path(const SolutionPath& path, const Matrix& y,
                         double lambda);
FitResult roann_from_path(const SolutionPath& path, const Matrix& y,
                          double lambda, double lambda2, double gamma,
                          const std::optional<WeightVector>& weights = std::nullopt);

// max{r : d_r > lambda^(1/(gamma+1))}, 0 when the set is empty.
Index estimate_rank(const Vector& py_singular_values, double lambda,
                    double gamma);

// Dispatch on config.method.
FitResult fit(const Matrix& y, const Matrix& x, const EstimatorConfig& config);

}  // namespace svtreg

#endif

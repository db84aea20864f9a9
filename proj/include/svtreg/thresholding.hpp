#ifndef SVTREG_THRESHOLDING_HPP
#define SVTREG_THRESHOLDING_HPP

#include <optional>

#include "svtreg/matrix_core.hpp"
#include "svtreg/types.hpp"

namespace svtreg {

// Non-negative weights in non-decreasing order; entries may be +inf, which
// marks positions whose singular value in the reference matrix was zero.
// With lambda > 0 an infinite weight forces the corresponding thresholded
// singular value to zero; with lambda = 0 weights are ignored entirely.
struct WeightVector {
  Vector w;
  std::optional<double> gamma;  // present when weights are d(ref)^(-gamma)

  Index size() const { return w.size(); }
};

// Throws contract_error unless 0 <= w1 <= ... <= wh within tol.
void validate_weight_order(const WeightVector& w,
                           double tol = default_tolerances().weight_order);

// Hard SVD-thresholding: keeps singular values strictly above lambda.
Matrix hsvt(const Matrix& y, double lambda);

// Soft SVD-thresholding: shrinks every singular value by lambda.
Matrix ssvt(const Matrix& y, double lambda);

// Adaptive soft thresholding: d_i -> (d_i - lambda*w_i)_+ in the SVD frame.
// Global minimizer of 1/2|Y-C|_F^2 + lambda*sum_i w_i d_i(C) under the
// non-decreasing weight constraint.
Matrix asvt(const Matrix& y, double lambda, const WeightVector& w);

// Thresholded singular values (d_i - lambda*w_i)_+ given d(y); shared by
// asvt and the regression solution paths.
Vector asvt_values(const Vector& d, double lambda, const WeightVector& w);

// sum_i w_i d_i(c); infinite weights paired with zero singular values
// contribute 0 (limit convention), paired with positive ones give +inf.
double adaptive_nuclear_norm(const Matrix& c, const WeightVector& w);
double adaptive_nuclear_norm(const Vector& d, const WeightVector& w,
                             double rank_tol = default_tolerances().rank_rel);

// w_i = d_i(reference)^(-gamma); zero singular values (per rank tolerance)
// map to +inf. gamma = 0 gives the unweighted vector of ones.
WeightVector adaptive_weights(const Matrix& reference, double gamma,
                              double rank_tol = default_tolerances().rank_rel);
WeightVector weights_from_singular_values(
    const Vector& d, double gamma,
    double rank_tol = default_tolerances().rank_rel);

}  // namespace svtreg

#endif

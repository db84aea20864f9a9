#include "svtreg/thresholding.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>

namespace svtreg {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix reassemble(const SvdFactorization& f, const Vector& values) {
  return f.u * values.asDiagonal() * f.v.transpose();
}
}  // namespace

void validate_weight_order(const WeightVector& w, double tol) {
  for (Index i = 0; i < w.w.size(); ++i) {
    if (std::isnan(w.w(i)) || w.w(i) < -tol) {
      throw contract_error("weights must be non-negative");
    }
    if (i > 0 && !(std::isinf(w.w(i)) || w.w(i) >= w.w(i - 1) - tol)) {
      throw contract_error("weights must be in non-decreasing order");
    }
    if (i > 0 && std::isinf(w.w(i - 1)) && !std::isinf(w.w(i))) {
      throw contract_error("weights must be in non-decreasing order");
    }
  }
}

Matrix hsvt(const Matrix& y, double lambda) {
  if (lambda < 0) throw contract_error("hsvt: lambda must be non-negative");
  const SvdFactorization f = thin_svd(y);
  Vector g = f.d;
  for (Index i = 0; i < g.size(); ++i) {
    if (!(g(i) > lambda)) g(i) = 0.0;  // strict comparison: ties are dropped
  }
  return reassemble(f, g);
}

Matrix ssvt(const Matrix& y, double lambda) {
  if (lambda < 0) throw contract_error("ssvt: lambda must be non-negative");
  const SvdFactorization f = thin_svd(y);
  const Vector g = (f.d.array() - lambda).max(0.0).matrix();
  return reassemble(f, g);
}

Vector asvt_values(const Vector& d, double lambda, const WeightVector& w) {
  if (lambda < 0) throw contract_error("asvt: lambda must be non-negative");
  if (w.size() != d.size()) {
    throw contract_error("asvt: weight length must equal min(rows, cols)");
  }
  validate_weight_order(w);
  if (lambda == 0.0) return d;  // unpenalized: weights (incl. inf) ignored
  Vector g(d.size());
  for (Index i = 0; i < d.size(); ++i) {
    g(i) = std::isinf(w.w(i)) ? 0.0 : std::max(0.0, d(i) - lambda * w.w(i));
  }
  return g;
}

Matrix asvt(const Matrix& y, double lambda, const WeightVector& w) {
  const SvdFactorization f = thin_svd(y);
  return reassemble(f, asvt_values(f.d, lambda, w));
}

double adaptive_nuclear_norm(const Vector& d, const WeightVector& w,
                             double rank_tol) {
  if (w.size() != d.size()) {
    throw contract_error("adaptive_nuclear_norm: weight length mismatch");
  }
  const double cutoff = d.size() > 0 ? rank_tol * d(0) : 0.0;
  double total = 0.0;
  for (Index i = 0; i < d.size(); ++i) {
    if (std::isinf(w.w(i))) {
      if (d(i) > cutoff) return kInf;
      continue;  // 0 * inf -> 0 by the limit convention
    }
    total += w.w(i) * d(i);
  }
  return total;
}

double adaptive_nuclear_norm(const Matrix& c, const WeightVector& w) {
  Eigen::BDCSVD<Matrix> svd(c);
  return adaptive_nuclear_norm(svd.singularValues(), w);
}

WeightVector weights_from_singular_values(const Vector& d, double gamma,
                                          double rank_tol) {
  if (gamma < 0) throw contract_error("weights: gamma must be non-negative");
  WeightVector out;
  out.gamma = gamma;
  out.w.resize(d.size());
  if (gamma == 0.0) {
    out.w.setOnes();
    return out;
  }
  const double cutoff = d.size() > 0 ? rank_tol * d(0) : 0.0;
  for (Index i = 0; i < d.size(); ++i) {
    out.w(i) = (d(i) > cutoff) ? std::pow(d(i), -gamma) : kInf;
  }
  return out;
}

WeightVector adaptive_weights(const Matrix& reference, double gamma,
                              double rank_tol) {
  Eigen::BDCSVD<Matrix> svd(reference);
  return weights_from_singular_values(svd.singularValues(), gamma, rank_tol);
}

}  // namespace svtreg

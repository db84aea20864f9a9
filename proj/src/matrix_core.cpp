#include "svtreg/matrix_core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace svtreg {

namespace {

// Flip paired column signs so the first entry of u.col(i) with magnitude
// above eps is positive. Makes the factorization bit-reproducible for
// matrices with distinct singular values.
void canonicalize_signs(Matrix& u, Matrix& v) {
  constexpr double eps = 1e-12;
  for (Index j = 0; j < u.cols(); ++j) {
    for (Index i = 0; i < u.rows(); ++i) {
      const double val = u(i, j);
      if (std::abs(val) > eps) {
        if (val < 0) {
          u.col(j) = -u.col(j);
          if (j < v.cols()) v.col(j) = -v.col(j);
        }
        break;
      }
    }
  }
}

}  // namespace

SvdFactorization thin_svd(const Matrix& m) {
  require_finite(m, "thin_svd");
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw numerical_error("thin_svd: SVD kernel failed to converge");
  }
  SvdFactorization out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  canonicalize_signs(out.u, out.v);
  return out;
}

std::pair<Vector, Matrix> sym_eig(const Matrix& m, double sym_tol) {
  require_finite(m, "sym_eig");
  if (m.rows() != m.cols()) {
    throw contract_error("sym_eig: matrix must be square");
  }
  const double scale = m.norm();
  if ((m - m.transpose()).norm() > sym_tol * std::max(scale, 1.0)) {
    throw contract_error("sym_eig: matrix not symmetric to tolerance");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (m + m.transpose()));
  if (eig.info() != Eigen::Success) {
    throw numerical_error("sym_eig: eigensolver failed");
  }
  // Eigen returns ascending order; reverse to non-increasing.
  const Index n = m.rows();
  Vector values(n);
  Matrix vectors(n, n);
  for (Index j = 0; j < n; ++j) {
    values(j) = eig.eigenvalues()(n - 1 - j);
    vectors.col(j) = eig.eigenvectors().col(n - 1 - j);
  }
  Matrix dummy(0, 0);
  canonicalize_signs(vectors, dummy);
  return {std::move(values), std::move(vectors)};
}

Matrix pseudo_inverse(const Matrix& m, double rel_tol) {
  require_finite(m, "pseudo_inverse");
  if (m.size() == 0) return Matrix(m.cols(), m.rows());
  const SvdFactorization f = thin_svd(m);
  const double cutoff = rel_tol * (f.d.size() > 0 ? f.d(0) : 0.0);
  Vector dinv = Vector::Zero(f.d.size());
  for (Index i = 0; i < f.d.size(); ++i) {
    if (f.d(i) > cutoff && f.d(i) > 0.0) dinv(i) = 1.0 / f.d(i);
  }
  return f.v * dinv.asDiagonal() * f.u.transpose();
}

Matrix projector(const Matrix& x) {
  require_finite(x, "projector");
  return x * pseudo_inverse(x);
}

Index matrix_rank(const Matrix& m, double rel_tol) {
  require_finite(m, "matrix_rank");
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<Matrix> svd(m);
  const Vector& d = svd.singularValues();
  if (d.size() == 0 || d(0) <= 0.0) return 0;
  const double cutoff = rel_tol * d(0);
  Index r = 0;
  for (Index i = 0; i < d.size(); ++i) {
    if (d(i) > cutoff) ++r;
  }
  return r;
}

}  // namespace svtreg

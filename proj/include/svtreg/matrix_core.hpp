#ifndef SVTREG_MATRIX_CORE_HPP
#define SVTREG_MATRIX_CORE_HPP

#include <utility>

#include "svtreg/types.hpp"

namespace svtreg {

// Thin SVD triple with non-increasing singular values and sign-canonicalized
// singular vectors (first nonzero entry of each left vector is positive).
struct SvdFactorization {
  Matrix u;  // n x h, orthonormal columns
  Vector d;  // h, non-increasing, non-negative
  Matrix v;  // q x h, orthonormal columns
};

SvdFactorization thin_svd(const Matrix& m);

// Symmetric eigendecomposition, eigenvalues in non-increasing order.
// Throws contract_error if m is not symmetric to sym_tol (relative).
std::pair<Vector, Matrix> sym_eig(const Matrix& m,
                                  double sym_tol = default_tolerances().sym);

Matrix pseudo_inverse(const Matrix& m,
                      double rel_tol = default_tolerances().pinv_rel);

// Orthogonal projector onto the column space of x.
Matrix projector(const Matrix& x);

Index matrix_rank(const Matrix& m,
                  double rel_tol = default_tolerances().rank_rel);

}  // namespace svtreg

#endif

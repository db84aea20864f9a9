#ifndef SVTREG_TYPES_HPP
#define SVTREG_TYPES_HPP

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace svtreg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Violated precondition or invalid input shape/content.
class contract_error : public std::invalid_argument {
public:
  explicit contract_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Iterative kernel failed to converge or produced non-finite values.
class numerical_error : public std::runtime_error {
public:
  explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Central tolerance record; every operation takes its tolerance from here
// unless overridden per call.
struct Tolerances {
  double svd_reconstruct = 1e-10;  // relative Frobenius reconstruction error
  double sym = 1e-8;               // symmetry check for eigendecomposition
  double rank_rel = 1e-10;         // singular values below rank_rel*d1 count as zero
  double pinv_rel = 1e-12;         // pseudo-inverse truncation
  double weight_order = 1e-12;     // slack when validating weight monotonicity
};

inline const Tolerances& default_tolerances() {
  static const Tolerances tols{};
  return tols;
}

inline void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw contract_error(std::string(what) + ": non-finite entries");
  }
}

}  // namespace svtreg

#endif

#ifndef IRFACT_FACTOR_DETAIL_HPP_
#define IRFACT_FACTOR_DETAIL_HPP_

// Helpers shared by the factorization translation units. Not installed.

#include <cmath>
#include <limits>
#include <string>

#include "irfact/error.hpp"
#include "irfact/factor.hpp"
#include "irfact/random.hpp"

namespace irf::detail {

inline void check_rank(const DataMatrix& x, int k) {
  const Eigen::Index limit = std::min(x.pixels(), x.frames());
  require(k >= 1 && k <= limit, ErrorKind::kParameter,
          "rank k=" + std::to_string(k) + " must lie in [1, min(Delta, tau)] = [1, " +
              std::to_string(limit) + "]");
}

inline void check_lambda(double lambda) {
  require(std::isfinite(lambda) && lambda >= 0, ErrorKind::kParameter,
          "lambda must be a finite non-negative value");
}

inline void check_nonnegative(const DataMatrix& x, Method m) {
  if (x.values().minCoeff() < 0) {
    fail(ErrorKind::kDomain,
         std::string(method_name(m)) +
             " requires X >= 0 entrywise; shift the data to be non-negative "
             "(e.g. subtract the global minimum) before factorizing");
  }
}

// Elementwise positive and negative parts: M = pos(M) - neg(M).
inline Matrix pos_part(const Matrix& m) { return (m.array().abs() + m.array()) * 0.5; }
inline Matrix neg_part(const Matrix& m) { return (m.array().abs() - m.array()) * 0.5; }

inline double half_sq_error(const Matrix& x, const Matrix& approx) {
  return 0.5 * (x - approx).squaredNorm();
}

// Relative-change stopping rule shared by the iterative solvers.
class Convergence {
 public:
  explicit Convergence(double rel_tol) : rel_tol_(rel_tol) {}

  // Returns true once the relative objective change drops below rel_tol.
  bool update(double objective) {
    bool done = false;
    if (objective == 0.0) {
      done = true;
    } else if (has_prev_) {
      const double change = std::abs(prev_ - objective) / std::max(std::abs(prev_), 1e-300);
      done = change < rel_tol_;
    }
    prev_ = objective;
    has_prev_ = true;
    return done;
  }

 private:
  double rel_tol_;
  double prev_ = 0.0;
  bool has_prev_ = false;
};

// Flips columns of B (and rows of A) so the largest-magnitude entry of each
// basis column is positive.
inline void canonicalize_signs(Matrix& basis, Matrix& coefficients) {
  for (Eigen::Index i = 0; i < basis.cols(); ++i) {
    Eigen::Index arg = 0;
    basis.col(i).cwiseAbs().maxCoeff(&arg);
    if (basis(arg, i) < 0) {
      basis.col(i) *= -1.0;
      coefficients.row(i) *= -1.0;
    }
  }
}

Matrix uniform_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale);

}  // namespace irf::detail

#endif  // IRFACT_FACTOR_DETAIL_HPP_

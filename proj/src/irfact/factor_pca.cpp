// PCT, CCIPCT and sparse-PCT. All three work on the row-centered matrix.

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "irfact/factor.hpp"
#include "irfact/factor_detail.hpp"

namespace irf {

namespace {

// CCIPCT amnesic parameter.
constexpr double kAmnesic = 2.0;

FactorModel centered_model(Method m, const DataMatrix& x, int k, const Vector& mean) {
  FactorModel model;
  model.method = m;
  model.rank = k;
  model.dims = x.origin_dims();
  model.row_mean = mean;
  return model;
}

// Modified Gram-Schmidt on the columns, in order. Columns that vanish after
// projection are left at zero.
void orthonormalize_columns(Matrix& b) {
  for (Eigen::Index i = 0; i < b.cols(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) b.col(i) -= b.col(j).dot(b.col(i)) * b.col(j);
    const double n = b.col(i).norm();
    if (n > 0) b.col(i) /= n;
  }
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

FactorModel pct(const DataMatrix& x, int k) {
  detail::check_rank(x, k);
  const Vector mean = x.values().rowwise().mean();
  const Matrix xc = x.values().colwise() - mean;

  Eigen::BDCSVD<Matrix> svd(xc, Eigen::ComputeThinU | Eigen::ComputeThinV);
  FactorModel model = centered_model(Method::kPct, x, k, mean);
  model.basis = svd.matrixU().leftCols(k);
  model.coefficients =
      svd.singularValues().head(k).asDiagonal() * svd.matrixV().leftCols(k).transpose();
  detail::canonicalize_signs(model.basis, model.coefficients);
  model.objective_history.push_back(detail::half_sq_error(xc, model.product()));
  model.iterations_run = 1;
  return model;
}

FactorModel ccipct(const DataMatrix& x, int k, const SolverOptions& opts) {
  opts.validate();
  detail::check_rank(x, k);
  const Vector mean = x.values().rowwise().mean();
  const Matrix xc = x.values().colwise() - mean;
  require(xc.cwiseAbs().maxCoeff() > 0, ErrorKind::kDegenerate,
          "CCIPCT input has zero variance after centering");

  const Eigen::Index tau = xc.cols();
  const int cycles = std::max(1, opts.max_iter / static_cast<int>(tau));
  Matrix v = Matrix::Zero(xc.rows(), k);
  FactorModel model = centered_model(Method::kCcipct, x, k, mean);
  model.seed = opts.seed;

  long long n = 0;
  detail::Convergence conv(opts.rel_tol);
  for (int cycle = 0; cycle < cycles; ++cycle) {
    for (Eigen::Index j = 0; j < tau; ++j) {
      ++n;
      Vector u = xc.col(j);
      // Plain averaging until the amnesic weights are positive.
      const double l = n > static_cast<long long>(kAmnesic) + 2 ? kAmnesic : 0.0;
      const double nd = static_cast<double>(n);
      for (int i = 0; i < k && i < n; ++i) {
        if (i == n - 1) {
          v.col(i) = u;
        } else {
          const double norm_prev = v.col(i).norm();
          if (norm_prev > 0) {
            v.col(i) = ((nd - 1.0 - l) / nd) * v.col(i) +
                       ((1.0 + l) / nd) * u * (u.dot(v.col(i)) / norm_prev);
          } else {
            v.col(i) = u;
          }
        }
        const double norm_v = v.col(i).norm();
        if (norm_v > 0) {
          const Vector dir = v.col(i) / norm_v;
          u -= u.dot(dir) * dir;
        }
      }
    }
    Matrix b = v;
    orthonormalize_columns(b);
    const Matrix a = b.transpose() * xc;
    const double f = detail::half_sq_error(xc, b * a);
    model.objective_history.push_back(f);
    model.iterations_run = cycle + 1;
    if (conv.update(f)) break;
  }

  model.basis = v;
  orthonormalize_columns(model.basis);
  model.coefficients = model.basis.transpose() * xc;
  detail::canonicalize_signs(model.basis, model.coefficients);
  return model;
}

FactorModel sparse_pct(const DataMatrix& x, int k, double lambda, const SolverOptions& opts) {
  opts.validate();
  detail::check_rank(x, k);
  detail::check_lambda(lambda);

  // Start from the PCT basis.
  FactorModel start = pct(x, k);
  const Vector mean = *start.row_mean;
  const Matrix xc = x.values().colwise() - mean;

  FactorModel model = centered_model(Method::kSparsePct, x, k, mean);
  model.lambda = lambda;
  model.seed = opts.seed;
  Matrix b = start.basis;
  detail::Convergence conv(opts.rel_tol);
  for (int it = 0; it < opts.max_iter; ++it) {
    const Matrix a = b.transpose() * xc;
    const Matrix gram = a * a.transpose();
    // Unpenalized least-squares basis X_c A' (A A')^+.
    Matrix update = gram.completeOrthogonalDecomposition().solve(a * xc.transpose()).transpose();
    for (Eigen::Index i = 0; i < update.cols(); ++i) {
      const double t = gram(i, i) > 0 ? lambda / gram(i, i) : 0.0;
      for (Eigen::Index p = 0; p < update.rows(); ++p) update(p, i) = soft_threshold(update(p, i), t);
      const double norm = update.col(i).norm();
      if (norm > 0) update.col(i) /= norm;
    }
    b = std::move(update);
    model.iterations_run = it + 1;
    const Matrix a_new = b.transpose() * xc;
    const double f = detail::half_sq_error(xc, b * a_new) + lambda * b.cwiseAbs().sum();
    model.objective_history.push_back(f);
    if (b.cwiseAbs().maxCoeff() == 0) break;
    if (conv.update(f)) break;
  }

  model.degenerate = b.cwiseAbs().maxCoeff() == 0;
  model.basis = b;
  model.coefficients = b.transpose() * xc;
  if (!model.degenerate) detail::canonicalize_signs(model.basis, model.coefficients);
  return model;
}

}  // namespace irf

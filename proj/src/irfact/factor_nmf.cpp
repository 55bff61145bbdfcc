// NMF family: multiplicative (gd), alternating NNLS, semi-, convex- and
// sparse-NMF. Every objective is recorded as 1/2 ||X - BA||_F^2 (+ penalty).

#include <algorithm>
#include <cmath>

#include "irfact/factor.hpp"
#include "irfact/factor_detail.hpp"
#include "irfact/random.hpp"

namespace irf {

namespace {

using detail::half_sq_error;
using detail::neg_part;
using detail::pos_part;

struct InitialFactors {
  Matrix basis;
  Matrix coefficients;
  Matrix mixing;  // convex-NMF only
};

// tau x k cluster indicator matrix from k-means on the columns of X.
Matrix kmeans_indicator(const Matrix& x, int k, std::uint64_t seed) {
  const std::vector<int> labels = kmeans_columns(x, k, seed);
  Matrix h = Matrix::Zero(x.cols(), k);
  for (Eigen::Index j = 0; j < x.cols(); ++j) h(j, labels[static_cast<std::size_t>(j)]) = 1.0;
  return h;
}

InitialFactors initialize(const Matrix& x, int k, const SolverOptions& opts, Method m) {
  InitialFactors f;
  const double mean_abs = x.cwiseAbs().mean();
  const double scale = std::sqrt(std::max(mean_abs, 1e-300) / k);
  if (opts.init == Init::kRandomUniform) {
    Rng rng = make_rng(derive_seed(opts.seed, "init"));
    if (m == Method::kConvexNmf) {
      f.mixing = detail::uniform_matrix(rng, x.cols(), k, 1.0);
      for (Eigen::Index c = 0; c < k; ++c) f.mixing.col(c) /= f.mixing.col(c).sum();
      f.coefficients = detail::uniform_matrix(rng, k, x.cols(), 2.0 / k);
    } else {
      f.basis = detail::uniform_matrix(rng, x.rows(), k, scale);
      f.coefficients = detail::uniform_matrix(rng, k, x.cols(), scale);
    }
    return f;
  }
  // k-means: indicators smoothed by 0.2 for the coefficients; centroids (or
  // size-normalized indicators for convex-NMF) for the basis.
  const Matrix h = kmeans_indicator(x, k, opts.seed);
  f.coefficients = (h.array() + 0.2).matrix().transpose();
  const Vector sizes = h.colwise().sum().transpose();
  if (m == Method::kConvexNmf) {
    f.mixing = (h.array() + 0.2).matrix() * sizes.cwiseInverse().asDiagonal();
  } else {
    f.basis = x * h * sizes.cwiseInverse().asDiagonal();
    if (requires_nonnegative(m)) f.basis = (f.basis.array().max(0.0) + 0.2 * mean_abs / k).matrix();
  }
  return f;
}

FactorModel base_model(Method m, const DataMatrix& x, int k, const SolverOptions& opts) {
  FactorModel model;
  model.method = m;
  model.rank = k;
  model.dims = x.origin_dims();
  model.seed = opts.seed;
  return model;
}

void notify(const IterationCallback& cb, int it, const Matrix& b, const Matrix& a,
            const Matrix* w = nullptr) {
  if (cb) cb(it, b, a, w);
}

// Multiplicative updates shared by nmf_gd and sparse_nmf; lambda enters only
// the basis denominator.
FactorModel multiplicative(Method m, const DataMatrix& data, int k, double lambda,
                           const SolverOptions& opts, const IterationCallback& cb) {
  const Matrix& x = data.values();
  InitialFactors init = initialize(x, k, opts, m);
  Matrix b = std::move(init.basis);
  Matrix a = std::move(init.coefficients);
  const double eps = opts.epsilon_guard;

  FactorModel model = base_model(m, data, k, opts);
  detail::Convergence conv(opts.rel_tol);
  for (int it = 0; it < opts.max_iter; ++it) {
    const Matrix aat = a * a.transpose();
    b = b.cwiseProduct(x * a.transpose())
            .cwiseQuotient(((b * aat).array() + (lambda + eps)).matrix());
    const Matrix btb = b.transpose() * b;
    a = a.cwiseProduct(b.transpose() * x).cwiseQuotient(((btb * a).array() + eps).matrix());
    const double f = half_sq_error(x, b * a) + lambda * b.sum();
    model.objective_history.push_back(f);
    model.iterations_run = it + 1;
    notify(cb, it, b, a);
    if (conv.update(f)) break;
  }

  if (lambda > 0) {
    // Exact non-negative LASSO solve for B with A fixed, row by row:
    // min 1/2 b (AA') b' - b (A x' - lambda), b >= 0.
    const Matrix aat = a * a.transpose();
    const Matrix lin = a * x.transpose();
    for (Eigen::Index p = 0; p < b.rows(); ++p) {
      b.row(p) = nnls_gram(aat, (lin.col(p).array() - lambda).matrix()).transpose();
    }
    model.objective_history.push_back(half_sq_error(x, b * a) + lambda * b.sum());
    notify(cb, model.iterations_run, b, a);
  }

  model.degenerate = b.maxCoeff() == 0 || a.maxCoeff() == 0;
  model.basis = std::move(b);
  model.coefficients = std::move(a);
  if (lambda > 0 || m == Method::kSparseNmf) model.lambda = lambda;
  return model;
}

}  // namespace

FactorModel nmf_gd(const DataMatrix& x, int k, const SolverOptions& opts, const IterationCallback& cb) {
  opts.validate();
  detail::check_rank(x, k);
  detail::check_nonnegative(x, Method::kNmfGd);
  return multiplicative(Method::kNmfGd, x, k, 0.0, opts, cb);
}

FactorModel sparse_nmf(const DataMatrix& x, int k, double lambda, const SolverOptions& opts,
                       const IterationCallback& cb) {
  opts.validate();
  detail::check_rank(x, k);
  detail::check_lambda(lambda);
  detail::check_nonnegative(x, Method::kSparseNmf);
  return multiplicative(Method::kSparseNmf, x, k, lambda, opts, cb);
}

FactorModel nmf_nnls(const DataMatrix& data, int k, const SolverOptions& opts,
                     const IterationCallback& cb) {
  opts.validate();
  detail::check_rank(data, k);
  detail::check_nonnegative(data, Method::kNmfNnls);
  const Matrix& x = data.values();
  InitialFactors init = initialize(x, k, opts, Method::kNmfNnls);
  Matrix b = std::move(init.basis);
  Matrix a = std::move(init.coefficients);

  FactorModel model = base_model(Method::kNmfNnls, data, k, opts);
  detail::Convergence conv(opts.rel_tol);
  for (int it = 0; it < opts.max_iter; ++it) {
    {
      const Matrix gram = a * a.transpose();
      const Matrix lin = a * x.transpose();  // k x Delta
      for (Eigen::Index p = 0; p < x.rows(); ++p) b.row(p) = nnls_gram(gram, lin.col(p)).transpose();
    }
    {
      const Matrix gram = b.transpose() * b;
      const Matrix lin = b.transpose() * x;  // k x tau
      for (Eigen::Index j = 0; j < x.cols(); ++j) a.col(j) = nnls_gram(gram, lin.col(j));
    }
    const double f = half_sq_error(x, b * a);
    model.objective_history.push_back(f);
    model.iterations_run = it + 1;
    notify(cb, it, b, a);
    if (conv.update(f)) break;
  }
  model.degenerate = b.maxCoeff() == 0 || a.maxCoeff() == 0;
  model.basis = std::move(b);
  model.coefficients = std::move(a);
  return model;
}

FactorModel semi_nmf(const DataMatrix& data, int k, const SolverOptions& opts,
                     const IterationCallback& cb) {
  opts.validate();
  detail::check_rank(data, k);
  const Matrix& x = data.values();
  InitialFactors init = initialize(x, k, opts, Method::kSemiNmf);
  Matrix a = std::move(init.coefficients);
  Matrix b;
  const double eps = opts.epsilon_guard;

  FactorModel model = base_model(Method::kSemiNmf, data, k, opts);
  detail::Convergence conv(opts.rel_tol);
  for (int it = 0; it < opts.max_iter; ++it) {
    // B = X A' (A A')^+; the pseudo-inverse covers rank-deficient A.
    b = (a * a.transpose()).completeOrthogonalDecomposition().solve(a * x.transpose()).transpose();
    const Matrix xtb = x.transpose() * b;
    const Matrix btb = b.transpose() * b;
    const Matrix at = a.transpose();
    const Matrix num = pos_part(xtb) + at * neg_part(btb);
    const Matrix den = neg_part(xtb) + at * pos_part(btb);
    a = at.cwiseProduct(num.cwiseQuotient((den.array() + eps).matrix()).cwiseSqrt()).transpose();
    const double f = half_sq_error(x, b * a);
    model.objective_history.push_back(f);
    model.iterations_run = it + 1;
    notify(cb, it, b, a);
    if (conv.update(f)) break;
  }
  model.degenerate = a.maxCoeff() == 0;
  model.basis = std::move(b);
  model.coefficients = std::move(a);
  return model;
}

FactorModel convex_nmf(const DataMatrix& data, int k, const SolverOptions& opts,
                       const IterationCallback& cb) {
  opts.validate();
  detail::check_rank(data, k);
  const Matrix& x = data.values();
  InitialFactors init = initialize(x, k, opts, Method::kConvexNmf);
  Matrix w = std::move(init.mixing);
  Matrix g = init.coefficients.transpose();  // tau x k, G = A'
  const double eps = opts.epsilon_guard;

  const Matrix y = x.transpose() * x;
  const Matrix yp = pos_part(y);
  const Matrix yn = neg_part(y);

  FactorModel model = base_model(Method::kConvexNmf, data, k, opts);
  detail::Convergence conv(opts.rel_tol);
  for (int it = 0; it < opts.max_iter; ++it) {
    {
      const Matrix ypw = yp * w;
      const Matrix ynw = yn * w;
      const Matrix num = ypw + g * (w.transpose() * ynw);
      const Matrix den = ynw + g * (w.transpose() * ypw);
      g = g.cwiseProduct(num.cwiseQuotient((den.array() + eps).matrix()).cwiseSqrt());
    }
    {
      const Matrix gtg = g.transpose() * g;
      const Matrix num = yp * g + yn * w * gtg;
      const Matrix den = yn * g + yp * w * gtg;
      w = w.cwiseProduct(num.cwiseQuotient((den.array() + eps).matrix()).cwiseSqrt());
    }
    const Matrix b = x * w;
    const Matrix a = g.transpose();
    const double f = half_sq_error(x, b * a);
    model.objective_history.push_back(f);
    model.iterations_run = it + 1;
    notify(cb, it, b, a, &w);
    if (conv.update(f)) break;
  }
  model.basis = x * w;
  model.coefficients = g.transpose();
  model.mixing = std::move(w);
  model.degenerate = model.coefficients.maxCoeff() == 0 || model.mixing->maxCoeff() == 0;
  return model;
}

}  // namespace irf

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <utility>

#include "irfact/factor.hpp"
#include "irfact/factor_detail.hpp"
#include "irfact/random.hpp"

namespace irf {

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 8> kNames = {{
    {Method::kPct, "pct"},
    {Method::kCcipct, "ccipct"},
    {Method::kSparsePct, "sparse_pct"},
    {Method::kNmfGd, "nmf_gd"},
    {Method::kNmfNnls, "nmf_nnls"},
    {Method::kSemiNmf, "semi_nmf"},
    {Method::kConvexNmf, "convex_nmf"},
    {Method::kSparseNmf, "sparse_nmf"},
}};

}  // namespace

std::string_view method_name(Method m) {
  for (const auto& [method, name] : kNames)
    if (method == m) return name;
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
  std::string lower(name);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  std::replace(lower.begin(), lower.end(), '-', '_');
  for (const auto& [method, n] : kNames)
    if (n == lower) return method;
  return std::nullopt;
}

std::string method_names() {
  std::string out;
  for (const auto& [method, name] : kNames) {
    if (!out.empty()) out += ", ";
    out += name;
  }
  return out;
}

bool requires_nonnegative(Method m) {
  return m == Method::kNmfGd || m == Method::kNmfNnls || m == Method::kSparseNmf;
}

bool uses_centering(Method m) {
  return m == Method::kPct || m == Method::kCcipct || m == Method::kSparsePct;
}

void SolverOptions::validate() const {
  require(max_iter >= 1, ErrorKind::kParameter, "max_iter must be >= 1");
  require(rel_tol > 0 && std::isfinite(rel_tol), ErrorKind::kParameter, "rel_tol must be > 0");
  require(epsilon_guard > 0 && std::isfinite(epsilon_guard), ErrorKind::kParameter,
          "epsilon_guard must be > 0");
}

Matrix center_rows(const Matrix& x) {
  Vector mean = x.rowwise().mean();
  return x.colwise() - mean;
}

double centered_reconstruction_error(const DataMatrix& x, const FactorModel& model) {
  const Matrix xc = center_rows(x.values());
  const Matrix approx = center_rows(model.product());
  require(approx.rows() == xc.rows() && approx.cols() == xc.cols(), ErrorKind::kDimension,
          "model does not match the data matrix shape");
  return (xc - approx).norm();
}

DataMatrix shift_to_nonnegative(const DataMatrix& x) {
  const double lo = x.values().minCoeff();
  if (lo >= 0) return x;
  return DataMatrix(Matrix(x.values().array() - lo), x.origin_dims());
}

FactorModel factorize(const DataMatrix& x, const FactorRequest& r) {
  switch (r.method) {
    case Method::kPct: return pct(x, r.rank);
    case Method::kCcipct: return ccipct(x, r.rank, r.options);
    case Method::kSparsePct: return sparse_pct(x, r.rank, r.lambda, r.options);
    case Method::kNmfGd: return nmf_gd(x, r.rank, r.options);
    case Method::kNmfNnls: return nmf_nnls(x, r.rank, r.options);
    case Method::kSemiNmf: return semi_nmf(x, r.rank, r.options);
    case Method::kConvexNmf: return convex_nmf(x, r.rank, r.options);
    case Method::kSparseNmf: return sparse_nmf(x, r.rank, r.lambda, r.options);
  }
  fail(ErrorKind::kParameter, "unknown factorization method");
}

Vector nnls_gram(const Matrix& gram, const Vector& linear) {
  const Eigen::Index n = linear.size();
  require(gram.rows() == n && gram.cols() == n, ErrorKind::kDimension,
          "NNLS gram matrix must be square and match the linear term");
  Vector x = Vector::Zero(n);
  if (n == 0) return x;
  std::vector<char> passive(static_cast<std::size_t>(n), 0);
  const double scale = gram.cwiseAbs().maxCoeff() + linear.cwiseAbs().maxCoeff();
  const double eps = std::numeric_limits<double>::epsilon();

  auto solve_passive = [&](Vector& z) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index i = 0; i < n; ++i)
      if (passive[static_cast<std::size_t>(i)]) idx.push_back(i);
    const auto p = static_cast<Eigen::Index>(idx.size());
    Matrix gp(p, p);
    Vector cp(p);
    for (Eigen::Index a = 0; a < p; ++a) {
      cp(a) = linear(idx[a]);
      for (Eigen::Index b = 0; b < p; ++b) gp(a, b) = gram(idx[a], idx[b]);
    }
    // Cholesky when the passive block is well conditioned, else a rank-revealing solve.
    Eigen::LLT<Matrix> llt(gp);
    Vector zp;
    if (llt.info() == Eigen::Success &&
        llt.matrixL().toDenseMatrix().diagonal().minCoeff() >
            1e-7 * std::sqrt(gp.diagonal().maxCoeff())) {
      zp = llt.solve(cp);
    } else {
      zp = gp.completeOrthogonalDecomposition().solve(cp);
    }
    z.setZero();
    for (Eigen::Index a = 0; a < p; ++a) z(idx[a]) = zp(a);
  };

  Vector z(n);
  const int max_outer = static_cast<int>(3 * n + 30);
  for (int outer = 0; outer < max_outer; ++outer) {
    Vector w = linear - gram * x;
    const double tol = 10.0 * eps * static_cast<double>(n) * (scale * (1.0 + x.cwiseAbs().maxCoeff()));
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!passive[static_cast<std::size_t>(i)] && w(i) > best_w) {
        best_w = w(i);
        best = i;
      }
    }
    if (best < 0) break;
    passive[static_cast<std::size_t>(best)] = 1;

    bool first = true;
    for (int inner = 0; inner < 3 * n + 30; ++inner) {
      solve_passive(z);
      if (first && z(best) <= 0) {
        // w(best) > 0 only through rounding: the KKT point is already reached.
        passive[static_cast<std::size_t>(best)] = 0;
        return x;
      }
      first = false;
      double alpha = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < n; ++i) {
        if (passive[static_cast<std::size_t>(i)] && z(i) <= 0) {
          alpha = std::min(alpha, x(i) / (x(i) - z(i)));
        }
      }
      if (!std::isfinite(alpha)) {
        x = z;
        break;
      }
      x += alpha * (z - x);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (passive[static_cast<std::size_t>(i)] && x(i) <= eps * scale) {
          passive[static_cast<std::size_t>(i)] = 0;
          x(i) = 0.0;
        }
      }
    }
  }
  return x.cwiseMax(0.0);
}

std::vector<int> kmeans_columns(const Matrix& x, int k, std::uint64_t seed, int max_iter) {
  const Eigen::Index n = x.cols();
  require(k >= 1 && k <= n, ErrorKind::kParameter, "k-means needs 1 <= k <= number of columns");
  Rng rng = make_rng(derive_seed(seed, "kmeans"));

  // k-means++ seeding.
  Matrix centers(x.rows(), k);
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  centers.col(0) = x.col(first(rng));
  Vector d2 = (x.colwise() - centers.col(0)).colwise().squaredNorm().transpose();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0) {
      double u = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (pick = 0; pick < n - 1; ++pick) {
        u -= d2(pick);
        if (u < 0) break;
      }
    } else {
      pick = first(rng);
    }
    centers.col(c) = x.col(pick);
    d2 = d2.cwiseMin((x.colwise() - centers.col(c)).colwise().squaredNorm().transpose());
  }

  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    Vector dist(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::Index arg = 0;
      dist(j) = (centers.colwise() - x.col(j)).colwise().squaredNorm().minCoeff(&arg);
      if (labels[static_cast<std::size_t>(j)] != static_cast<int>(arg)) {
        labels[static_cast<std::size_t>(j)] = static_cast<int>(arg);
        changed = true;
      }
    }
    // Refill empty clusters with the point farthest from its center.
    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
    for (int c = 0; c < k; ++c) {
      if (sizes[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index far = 0;
      dist.maxCoeff(&far);
      --sizes[static_cast<std::size_t>(labels[static_cast<std::size_t>(far)])];
      labels[static_cast<std::size_t>(far)] = c;
      sizes[static_cast<std::size_t>(c)] = 1;
      dist(far) = 0;
      changed = true;
    }
    centers.setZero();
    for (Eigen::Index j = 0; j < n; ++j) centers.col(labels[static_cast<std::size_t>(j)]) += x.col(j);
    for (int c = 0; c < k; ++c) centers.col(c) /= sizes[static_cast<std::size_t>(c)];
    if (!changed) break;
  }
  return labels;
}

Image component_image(const FactorModel& model, int i) {
  require(i >= 0 && i < model.basis.cols(), ErrorKind::kParameter,
          "component index " + std::to_string(i) + " out of range [0, " +
              std::to_string(model.basis.cols()) + ")");
  return devectorize(model.basis.col(i), model.dims);
}

namespace {

Image normalize_unit(const Image& img) {
  const double lo = img.minCoeff();
  const double span = img.maxCoeff() - lo;
  if (span <= 0) return Image::Zero(img.rows(), img.cols());
  return (img.array() - lo) / span;
}

}  // namespace

ComponentSelection select_component(const FactorModel& model, const BinaryMask& roi,
                                    SelectionCriterion criterion, int index) {
  require(model.basis.cols() >= 1, ErrorKind::kParameter, "model has no components");
  ComponentSelection out;
  if (criterion == SelectionCriterion::kIndex) {
    out.index = index;
    out.image = normalize_unit(component_image(model, index));
    return out;
  }
  require(roi.dims() == model.dims, ErrorKind::kDimension, "ROI dimensions do not match the model");
  const std::size_t inside = roi.count();
  require(inside > 0, ErrorKind::kParameter, "ROI is empty");
  require(inside < model.dims.pixels(), ErrorKind::kParameter, "ROI covers the whole image");
  const double eps = 1e-12;
  double best = -1.0;
  for (int i = 0; i < model.basis.cols(); ++i) {
    const Image img = component_image(model, i);
    const auto in = roi.pixels();
    const double sum_in = in.select(img.array(), 0.0).sum();
    const double mean_in = sum_in / static_cast<double>(inside);
    const double mean_out = (img.sum() - sum_in) / static_cast<double>(model.dims.pixels() - inside);
    const double mean = img.mean();
    const double sd = std::sqrt((img.array() - mean).square().mean());
    const double score = std::abs(mean_in - mean_out) / (sd + eps);
    out.scores.push_back(score);
    if (score > best) {
      best = score;
      out.index = i;
    }
  }
  out.image = normalize_unit(component_image(model, out.index));
  return out;
}

namespace detail {

Matrix uniform_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(rows, cols);
  // Fill in a fixed (column-major) order so results depend only on the seed.
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = u(rng) * scale;
  return m;
}

}  // namespace detail

}  // namespace irf

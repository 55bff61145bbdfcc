// Reference computations used by the tests. Each one is written from the
// definition, without calling the library routine it checks.
#ifndef IRFACT_TESTS_ORACLES_HPP_
#define IRFACT_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;

inline Matrix random_matrix(int rows, int cols, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = u(rng);
  return m;
}

inline Matrix center_rows(const Matrix& x) {
  Matrix c = x;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double s = 0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) s += x(i, j);
    c.row(i).array() -= s / static_cast<double>(x.cols());
  }
  return c;
}

// Squared Frobenius energy beyond the leading k singular values, from the
// eigenvalues of the smaller Gram matrix.
inline double svd_tail_energy(const Matrix& xc, int k) {
  const Matrix g = xc.rows() >= xc.cols() ? Matrix(xc.transpose() * xc) : Matrix(xc * xc.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(g);
  Eigen::VectorXd ev = es.eigenvalues();  // ascending
  double tail = 0;
  for (Eigen::Index i = 0; i < ev.size() - k; ++i) tail += std::max(0.0, ev(i));
  return tail;
}

// Top-k left singular vectors of xc via the same eigen-decomposition.
inline Matrix leading_subspace(const Matrix& xc, int k) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(xc * xc.transpose());
  return es.eigenvectors().rightCols(k);
}

// ||Q_a' Q_b||_F^2 / k for orthonormalized bases of equal width.
inline double subspace_affinity(const Matrix& a, const Matrix& b) {
  Eigen::HouseholderQR<Matrix> qa(a), qb(b);
  const Matrix ua = qa.householderQ() * Matrix::Identity(a.rows(), a.cols());
  const Matrix ub = qb.householderQ() * Matrix::Identity(b.rows(), b.cols());
  return (ua.transpose() * ub).squaredNorm() / static_cast<double>(a.cols());
}

inline double jaccard(const std::vector<bool>& a, const std::vector<bool>& b) {
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += a[i] && b[i];
    uni += a[i] || b[i];
  }
  return static_cast<double>(inter) / static_cast<double>(uni);
}

// H with mid-ranks and tie correction, by direct counting.
inline double kruskal_h(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  const double n = static_cast<double>(pooled.size());
  auto rank_of = [&](double v) {
    double below = 0, equal = 0;
    for (double w : pooled) {
      below += w < v;
      equal += w == v;
    }
    return below + (equal + 1) / 2;
  };
  double ra = 0, rb = 0;
  for (double v : a) ra += rank_of(v);
  for (double v : b) rb += rank_of(v);
  double h = 12.0 / (n * (n + 1)) * (ra * ra / a.size() + rb * rb / b.size()) - 3 * (n + 1);
  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double ties = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    ties += t * t * t - t;
    i = j;
  }
  const double corr = 1 - ties / (n * n * n - n);
  return corr > 0 ? h / corr : 0.0;
}

// Exhaustive permutation p-value: fraction of all relabelings with H at
// least the observed one.
inline double permutation_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  const std::size_t n = pooled.size(), na = a.size();
  const double observed = kruskal_h(a, b);
  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(na), true);
  std::size_t total = 0, extreme = 0;
  do {
    std::vector<double> ga, gb;
    for (std::size_t i = 0; i < n; ++i) (pick[i] ? ga : gb).push_back(pooled[i]);
    ++total;
    if (kruskal_h(ga, gb) >= observed - 1e-9) ++extreme;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return static_cast<double>(extreme) / static_cast<double>(total);
}

// Concordant pairs (ties count one half) over n+ n-.
inline double u_statistic_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  double s = 0, np = 0, nn = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    ++np;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      s += scores[i] > scores[j] ? 1.0 : scores[i] == scores[j] ? 0.5 : 0.0;
    }
  }
  for (int l : labels) nn += l == 0;
  return s / (np * nn);
}

}  // namespace oracle

#endif  // IRFACT_TESTS_ORACLES_HPP_

#ifndef IRFACT_FACTOR_HPP_
#define IRFACT_FACTOR_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "irfact/seqio.hpp"

namespace irf {

enum class Method {
  kPct,
  kCcipct,
  kSparsePct,
  kNmfGd,
  kNmfNnls,
  kSemiNmf,
  kConvexNmf,
  kSparseNmf,
};

inline constexpr Method kAllMethods[] = {Method::kPct,     Method::kCcipct,  Method::kSparsePct,
                                         Method::kNmfGd,   Method::kNmfNnls, Method::kSemiNmf,
                                         Method::kConvexNmf, Method::kSparseNmf};

std::string_view method_name(Method m);
std::optional<Method> parse_method(std::string_view name);
// Lists the accepted method names, comma separated.
std::string method_names();
// NMF_GD, NMF_NNLS and SPARSE_NMF reject negative data.
bool requires_nonnegative(Method m);
// PCT, CCIPCT and SPARSE_PCT factorize the row-centered matrix.
bool uses_centering(Method m);

enum class Init { kRandomUniform, kKMeans };

struct SolverOptions {
  int max_iter = 500;
  double rel_tol = 1e-6;
  Init init = Init::kRandomUniform;
  std::uint64_t seed = 0;
  double epsilon_guard = 1e-12;

  void validate() const;
};

// Called after every iteration with the current factors (W only for
// convex-NMF). Intended for invariant spot checks on small problems.
using IterationCallback =
    std::function<void(int iteration, const Matrix& basis, const Matrix& coefficients,
                       const Matrix* mixing)>;

struct FactorModel {
  Method method = Method::kPct;
  int rank = 0;
  Matrix basis;         // B, Delta x k
  Matrix coefficients;  // A, k x tau
  std::optional<Matrix> mixing;  // W, tau x k (convex-NMF only)
  std::optional<double> lambda;  // sparse methods only
  std::vector<double> objective_history;
  int iterations_run = 0;
  std::uint64_t seed = 0;
  // Row means removed before factorizing (centered methods only).
  std::optional<Vector> row_mean;
  // All-zero factors, e.g. an over-regularized sparse fit.
  bool degenerate = false;
  Dims dims;

  // B*A, i.e. the approximation of X (centered X for centered methods).
  Matrix product() const { return basis * coefficients; }
};

struct FactorRequest {
  Method method = Method::kPct;
  int rank = 1;
  double lambda = 0.0;
  SolverOptions options;
};

FactorModel pct(const DataMatrix& x, int k);
FactorModel ccipct(const DataMatrix& x, int k, const SolverOptions& opts = {});
FactorModel sparse_pct(const DataMatrix& x, int k, double lambda, const SolverOptions& opts = {});
FactorModel nmf_gd(const DataMatrix& x, int k, const SolverOptions& opts = {},
                   const IterationCallback& cb = {});
FactorModel nmf_nnls(const DataMatrix& x, int k, const SolverOptions& opts = {},
                     const IterationCallback& cb = {});
FactorModel semi_nmf(const DataMatrix& x, int k, const SolverOptions& opts = {},
                     const IterationCallback& cb = {});
FactorModel convex_nmf(const DataMatrix& x, int k, const SolverOptions& opts = {},
                       const IterationCallback& cb = {});
FactorModel sparse_nmf(const DataMatrix& x, int k, double lambda, const SolverOptions& opts = {},
                       const IterationCallback& cb = {});

FactorModel factorize(const DataMatrix& x, const FactorRequest& request);

// Row-wise temporal mean removal: X_c = X - mean(X, along time) 1^T.
Matrix center_rows(const Matrix& x);

// ||X_c - (B A) P||_F where P removes the temporal mean. Comparable across
// every method, and bounded below by the rank-k PCT error.
double centered_reconstruction_error(const DataMatrix& x, const FactorModel& model);

// Subtracts min(X) when it is negative; returns X unchanged otherwise.
DataMatrix shift_to_nonnegative(const DataMatrix& x);

// Active-set (Lawson-Hanson) solver for min 1/2 z'Gz - c'z subject to z >= 0,
// with G symmetric positive semi-definite. With G = M'M and c = M'y this is
// the NNLS problem min ||Mz - y||.
Vector nnls_gram(const Matrix& gram, const Vector& linear);

// Lloyd's k-means with k-means++ seeding on the columns of x.
std::vector<int> kmeans_columns(const Matrix& x, int k, std::uint64_t seed, int max_iter = 100);

enum class SelectionCriterion { kMaxRoiContrast, kIndex };

struct ComponentSelection {
  int index = 0;
  Image image;  // min-max normalized to [0, 1]
  std::vector<double> scores;  // per-component ROI contrast (kMaxRoiContrast only)
};

ComponentSelection select_component(const FactorModel& model, const BinaryMask& roi,
                                    SelectionCriterion criterion, int index = 0);

// Column i of B as an N x M image (not normalized).
Image component_image(const FactorModel& model, int i);

}  // namespace irf

#endif  // IRFACT_FACTOR_HPP_

#ifndef IRFACT_TEXTURE_HPP_
#define IRFACT_TEXTURE_HPP_

#include <array>
#include <optional>
#include <vector>

#include "irfact/seqio.hpp"

namespace irf {

using LevelImage = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr int kOutsideRoi = -1;

struct Quantized {
  LevelImage levels;  // kOutsideRoi outside the ROI
  int level_count = 0;
  bool degenerate = false;  // constant ROI, every level is 0
};

// Min-max binning of the ROI values into {0, ..., L-1}:
// level = min(L - 1, floor(L (v - min) / (max - min))).
Quantized quantize(const Image& image, const BinaryMask& roi, int levels);

struct Offset {
  double distance = 1;
  double angle = 0;  // radians, 0 = +column, pi/2 = +row

  int row_step() const;  // round(d sin(theta))
  int col_step() const;  // round(d cos(theta))
};

std::vector<Offset> default_offsets();  // {(1, 0), (1, pi/2)}

struct Tlcm {
  int levels = 0;
  Matrix p;  // L x L, sums to 1
  std::vector<Offset> offsets;
  bool symmetric = true;
};

// Counts level pairs (q(p), q(p + offset)) with both pixels in the ROI over all
// offsets, adds the transpose when symmetric, and normalizes.
Tlcm tlcm(const LevelImage& levels, const BinaryMask& roi, const std::vector<Offset>& offsets,
          int level_count, bool symmetric = true);

struct TlcmFeatures {
  double contrast = 0;
  double dissimilarity = 0;
  double homogeneity = 0;
  double energy = 0;
  double correlation = 0;
  bool correlation_degenerate = false;  // a marginal has zero variance

  std::array<double, 5> values() const {
    return {contrast, dissimilarity, homogeneity, energy, correlation};
  }
};

inline constexpr std::array<const char*, 5> kFeatureNames = {
    "contrast", "dissimilarity", "homogeneity", "energy", "correlation"};

// With `squared_dissimilarity` the dissimilarity uses |i - j|^2, which makes it
// equal to the contrast.
TlcmFeatures features(const Tlcm& t, bool squared_dissimilarity = false);
TlcmFeatures features(const Matrix& p, bool squared_dissimilarity = false);

struct KruskalWallis {
  double h = 0;
  double p_value = 1;                  // chi-square approximation, g - 1 dof
  std::optional<double> p_exact;       // exact permutation p, two groups only
  int dof = 1;
  bool degenerate = false;             // all pooled values equal
};

// Mid-ranks with tie correction. p_exact is computed for two groups with at
// most kExactLimit pooled values.
inline constexpr std::size_t kExactLimit = 60;
KruskalWallis kruskal_wallis(const std::vector<std::vector<double>>& groups);
KruskalWallis kruskal_wallis(const std::vector<double>& a, const std::vector<double>& b);

struct LogisticOptions {
  double ridge = 1e-6;
  double gradient_tol = 1e-8;
  int max_iter = 100;
};

struct LogisticModel {
  Vector mean;          // per-feature standardization
  Vector scale;
  Vector coefficients;  // [intercept, beta_1 .. beta_p] on standardized features
  bool converged = false;
  bool separated = false;  // training scores perfectly split the classes
  int iterations = 0;
  std::vector<double> log_likelihood;  // per iteration, after the update
  std::vector<double> penalized_log_likelihood;

  // Linear predictor for raw (unstandardized) feature rows.
  Vector score(const Matrix& features) const;
};

// features: n x p, labels in {0, 1}.
LogisticModel logistic_fit(const Matrix& features, const std::vector<int>& labels,
                           const LogisticOptions& opts = {});

struct RocPoint {
  double threshold;
  double fpr;
  double tpr;
};

struct LogisticEvaluation {
  double accuracy = 0;
  std::vector<RocPoint> roc;  // from (0,0) to (1,1)
  double auc = 0;
};

LogisticEvaluation logistic_eval(const LogisticModel& model, const Matrix& features,
                                 const std::vector<int>& labels);
// ROC and trapezoid AUC for arbitrary scores (positive class scores higher).
LogisticEvaluation roc_from_scores(const Vector& scores, const std::vector<int>& labels);

// Accuracy with each subject predicted by a model fit on all the others.
double logistic_loo_accuracy(const Matrix& features, const std::vector<int>& labels,
                             const LogisticOptions& opts = {});

Matrix feature_matrix(const std::vector<TlcmFeatures>& rows);

}  // namespace irf

#endif  // IRFACT_TEXTURE_HPP_

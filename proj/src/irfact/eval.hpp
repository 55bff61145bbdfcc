#ifndef IRFACT_EVAL_HPP_
#define IRFACT_EVAL_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "irfact/factor.hpp"
#include "irfact/seqio.hpp"

namespace irf {

// |detected & gt| / |detected | gt|. When `domain` is given both masks are
// restricted to it first (per-defect scoring).
double jaccard(const BinaryMask& detected, const BinaryMask& gt,
               const BinaryMask* domain = nullptr);

struct Binarized {
  BinaryMask mask;
  bool degenerate = false;  // constant image: every pixel is foreground
};

// Foreground iff value >= min + quantile * (max - min).
Binarized binarize(const Image& image, double quantile);

enum class Polarity { kNormal, kInverted };

struct SweepResult {
  std::vector<double> thresholds;         // quantiles step, 2 step, ..., < 1
  std::vector<double> jaccard_normal;     // per threshold
  std::vector<double> jaccard_inverted;   // per threshold; empty unless invert
  double best_threshold = 0;
  double best_jaccard = 0;
  Polarity best_polarity = Polarity::kNormal;
};

// Sweeps quantile thresholds (and, with `invert`, the negated image). Ties
// keep the first maximum: normal polarity before inverted, lower threshold
// before higher.
SweepResult threshold_sweep(const Image& image, const BinaryMask& gt, double step = 0.05,
                            bool invert = true, const BinaryMask* domain = nullptr);

// Square window of half-width `2 * radius` pixels around the mask's centroid,
// where radius is the equivalent-disc radius of the mask. Used as the
// evaluation domain when scoring one defect.
BinaryMask defect_window(const BinaryMask& defect);

struct SnrResult {
  double decibels = 0;
  bool degenerate = false;  // mu_S == mu_N, decibels is -infinity
};

// 10 log10(|mu_S - mu_N|^2 / sigma_N^2), population std over the noise ROI.
SnrResult snr(const Image& image, const BinaryMask& signal_roi, const BinaryMask& noise_roi);

struct RobustnessPoint {
  double level = 0;
  double snr = 0;
  bool snr_degenerate = false;
  double best_jaccard = 0;
  double best_threshold = 0;
  Polarity polarity = Polarity::kNormal;
  int component = 0;
};

struct RobustnessSettings {
  FactorRequest factor;
  double step = 0.05;
  bool invert = true;
  // Subtract min(X) before methods that need X >= 0 when noise drives it negative.
  bool shift_nonnegative = true;
};

// For each level: add noise (seed derived per level), factorize, select the
// component with maximal ROI contrast against `gt`, then score SNR and the
// threshold sweep. Output order matches `levels`.
std::vector<RobustnessPoint> robustness_curve(const DataMatrix& x, const RobustnessSettings& settings,
                                              const BinaryMask& gt, const BinaryMask& signal_roi,
                                              const BinaryMask& noise_roi,
                                              const std::vector<double>& levels,
                                              std::uint64_t seed);

}  // namespace irf

#endif  // IRFACT_EVAL_HPP_

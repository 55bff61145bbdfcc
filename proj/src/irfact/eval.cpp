#include "irfact/eval.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "irfact/error.hpp"
#include "irfact/random.hpp"

namespace irf {

double jaccard(const BinaryMask& detected, const BinaryMask& gt, const BinaryMask* domain) {
  require(detected.dims() == gt.dims(), ErrorKind::kDimension,
          "detected and ground-truth masks differ in size");
  MaskArray d = detected.pixels();
  MaskArray g = gt.pixels();
  if (domain != nullptr) {
    require(domain->dims() == gt.dims(), ErrorKind::kDimension, "domain mask differs in size");
    d = d && domain->pixels();
    g = g && domain->pixels();
  }
  const auto gt_count = g.count();
  require(gt_count > 0, ErrorKind::kParameter, "ground truth is empty");
  const auto inter = (d && g).count();
  const auto uni = (d || g).count();
  return static_cast<double>(inter) / static_cast<double>(uni);
}

Binarized binarize(const Image& image, double quantile) {
  require(image.size() > 0 && image.allFinite(), ErrorKind::kParameter, "image must be finite");
  require(quantile > 0 && quantile < 1, ErrorKind::kParameter, "quantile must lie in (0, 1)");
  const double lo = image.minCoeff();
  const double hi = image.maxCoeff();
  if (hi == lo) return {BinaryMask(Dims{static_cast<std::size_t>(image.rows()),
                                        static_cast<std::size_t>(image.cols())},
                                   true),
                        true};
  const double cut = lo + quantile * (hi - lo);
  return {BinaryMask(MaskArray(image.array() >= cut)), false};
}

SweepResult threshold_sweep(const Image& image, const BinaryMask& gt, double step, bool invert,
                            const BinaryMask* domain) {
  require(step > 0 && step <= 0.5, ErrorKind::kParameter, "sweep step must lie in (0, 0.5]");
  require(static_cast<std::size_t>(image.rows()) == gt.dims().rows &&
              static_cast<std::size_t>(image.cols()) == gt.dims().cols,
          ErrorKind::kDimension, "image and ground truth differ in size");
  SweepResult out;
  // q_i = i * step for i = 1.. while q_i < 1 (with rounding slack).
  for (int i = 1;; ++i) {
    const double q = i * step;
    if (q >= 1.0 - 1e-9) break;
    out.thresholds.push_back(q);
  }
  const Image negated = -image;
  out.best_jaccard = -1;
  for (double q : out.thresholds) {
    const double j = jaccard(binarize(image, q).mask, gt, domain);
    out.jaccard_normal.push_back(j);
    if (j > out.best_jaccard) {
      out.best_jaccard = j;
      out.best_threshold = q;
      out.best_polarity = Polarity::kNormal;
    }
  }
  if (invert) {
    for (double q : out.thresholds) {
      const double j = jaccard(binarize(negated, q).mask, gt, domain);
      out.jaccard_inverted.push_back(j);
      if (j > out.best_jaccard) {
        out.best_jaccard = j;
        out.best_threshold = q;
        out.best_polarity = Polarity::kInverted;
      }
    }
  }
  return out;
}

BinaryMask defect_window(const BinaryMask& defect) {
  require(!defect.empty(), ErrorKind::kParameter, "defect mask is empty");
  const Dims d = defect.dims();
  double sr = 0, sc = 0;
  for (std::size_t r = 0; r < d.rows; ++r)
    for (std::size_t c = 0; c < d.cols; ++c)
      if (defect(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))) {
        sr += static_cast<double>(r);
        sc += static_cast<double>(c);
      }
  const double n = static_cast<double>(defect.count());
  const double cr = sr / n;
  const double cc = sc / n;
  const double half = 2.0 * std::sqrt(n / M_PI);
  BinaryMask w(d);
  for (std::size_t r = 0; r < d.rows; ++r)
    for (std::size_t c = 0; c < d.cols; ++c)
      if (std::abs(static_cast<double>(r) - cr) <= half && std::abs(static_cast<double>(c) - cc) <= half)
        w.set(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c), true);
  return w | defect;
}

SnrResult snr(const Image& image, const BinaryMask& signal_roi, const BinaryMask& noise_roi) {
  const Dims dims{static_cast<std::size_t>(image.rows()), static_cast<std::size_t>(image.cols())};
  require(signal_roi.dims() == dims && noise_roi.dims() == dims, ErrorKind::kDimension,
          "ROI dimensions do not match the image");
  require(!signal_roi.empty(), ErrorKind::kParameter, "signal ROI is empty");
  require(noise_roi.count() >= 2, ErrorKind::kParameter, "noise ROI needs at least 2 pixels");
  require((signal_roi & noise_roi).empty(), ErrorKind::kParameter,
          "signal and noise ROIs must be disjoint");
  const auto s = signal_roi.pixels();
  const auto nz = noise_roi.pixels();
  const double ns = static_cast<double>(signal_roi.count());
  const double nn = static_cast<double>(noise_roi.count());
  const double mu_s = s.select(image.array(), 0.0).sum() / ns;
  const double mu_n = nz.select(image.array(), 0.0).sum() / nn;
  const double var_n = nz.select((image.array() - mu_n).square(), 0.0).sum() / nn;
  require(var_n > 0, ErrorKind::kDegenerate, "noise region has zero variance");
  const double diff = mu_s - mu_n;
  if (diff == 0) return {-std::numeric_limits<double>::infinity(), true};
  return {10.0 * std::log10(diff * diff / var_n), false};
}

std::vector<RobustnessPoint> robustness_curve(const DataMatrix& x, const RobustnessSettings& settings,
                                              const BinaryMask& gt, const BinaryMask& signal_roi,
                                              const BinaryMask& noise_roi,
                                              const std::vector<double>& levels,
                                              std::uint64_t seed) {
  std::vector<RobustnessPoint> out;
  out.reserve(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double level = levels[i];
    require(level >= 0, ErrorKind::kParameter, "noise levels must be >= 0");
    DataMatrix noisy = add_gaussian_noise(x, level, derive_seed(seed, "noise/" + std::to_string(i)));
    if (settings.shift_nonnegative && requires_nonnegative(settings.factor.method))
      noisy = shift_to_nonnegative(noisy);
    const FactorModel model = factorize(noisy, settings.factor);
    const ComponentSelection sel = select_component(model, gt, SelectionCriterion::kMaxRoiContrast);
    const SnrResult s = snr(sel.image, signal_roi, noise_roi);
    const SweepResult sweep = threshold_sweep(sel.image, gt, settings.step, settings.invert);
    out.push_back({level, s.decibels, s.degenerate, sweep.best_jaccard, sweep.best_threshold,
                   sweep.best_polarity, sel.index});
  }
  return out;
}

}  // namespace irf

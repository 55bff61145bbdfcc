#include "irfact/texture.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "irfact/error.hpp"

namespace irf {

Quantized quantize(const Image& image, const BinaryMask& roi, int levels) {
  require(levels >= 2, ErrorKind::kParameter, "quantization needs at least 2 levels");
  require(roi.dims().rows == static_cast<std::size_t>(image.rows()) &&
              roi.dims().cols == static_cast<std::size_t>(image.cols()),
          ErrorKind::kDimension, "ROI and image differ in size");
  require(!roi.empty(), ErrorKind::kParameter, "ROI is empty");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Eigen::Index r = 0; r < image.rows(); ++r)
    for (Eigen::Index c = 0; c < image.cols(); ++c)
      if (roi(r, c)) {
        require(std::isfinite(image(r, c)), ErrorKind::kDomain, "ROI contains non-finite values");
        lo = std::min(lo, image(r, c));
        hi = std::max(hi, image(r, c));
      }
  Quantized q;
  q.level_count = levels;
  q.levels = LevelImage::Constant(image.rows(), image.cols(), kOutsideRoi);
  q.degenerate = hi == lo;
  const double range = hi - lo;
  for (Eigen::Index r = 0; r < image.rows(); ++r)
    for (Eigen::Index c = 0; c < image.cols(); ++c) {
      if (!roi(r, c)) continue;
      if (q.degenerate) {
        q.levels(r, c) = 0;
        continue;
      }
      const double t = (image(r, c) - lo) * levels / range;
      q.levels(r, c) = std::min(levels - 1, static_cast<int>(std::floor(t)));
    }
  return q;
}

int Offset::row_step() const { return static_cast<int>(std::lround(distance * std::sin(angle))); }
int Offset::col_step() const { return static_cast<int>(std::lround(distance * std::cos(angle))); }

std::vector<Offset> default_offsets() { return {{1.0, 0.0}, {1.0, M_PI / 2}}; }

Tlcm tlcm(const LevelImage& levels, const BinaryMask& roi, const std::vector<Offset>& offsets,
          int level_count, bool symmetric) {
  require(level_count >= 2, ErrorKind::kParameter, "TLCM needs at least 2 levels");
  require(!offsets.empty(), ErrorKind::kParameter, "TLCM needs at least one offset");
  require(roi.dims().rows == static_cast<std::size_t>(levels.rows()) &&
              roi.dims().cols == static_cast<std::size_t>(levels.cols()),
          ErrorKind::kDimension, "ROI and level image differ in size");
  Matrix counts = Matrix::Zero(level_count, level_count);
  const Eigen::Index rows = levels.rows();
  const Eigen::Index cols = levels.cols();
  auto valid = [&](Eigen::Index r, Eigen::Index c) {
    if (!roi(r, c)) return false;
    const int v = levels(r, c);
    require(v >= 0 && v < level_count, ErrorKind::kDomain, "level outside [0, L) inside the ROI");
    return true;
  };
  for (const Offset& off : offsets) {
    require(off.distance >= 0 && std::isfinite(off.distance) && std::isfinite(off.angle),
            ErrorKind::kParameter, "invalid offset");
    const int dr = off.row_step();
    const int dc = off.col_step();
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Eigen::Index r2 = r + dr;
      if (r2 < 0 || r2 >= rows) continue;
      for (Eigen::Index c = 0; c < cols; ++c) {
        const Eigen::Index c2 = c + dc;
        if (c2 < 0 || c2 >= cols) continue;
        if (!valid(r, c) || !valid(r2, c2)) continue;
        counts(levels(r, c), levels(r2, c2)) += 1.0;
      }
    }
  }
  const double total = counts.sum();
  require(total > 0, ErrorKind::kDegenerate, "no pixel pairs inside the ROI for any offset");
  if (symmetric) counts += counts.transpose().eval();
  Tlcm t;
  t.levels = level_count;
  t.p = counts / counts.sum();
  t.offsets = offsets;
  t.symmetric = symmetric;
  return t;
}

TlcmFeatures features(const Tlcm& t, bool squared_dissimilarity) {
  return features(t.p, squared_dissimilarity);
}

TlcmFeatures features(const Matrix& p, bool squared_dissimilarity) {
  require(p.rows() == p.cols() && p.rows() >= 1, ErrorKind::kDimension, "TLCM must be square");
  const Eigen::Index n = p.rows();
  TlcmFeatures f;
  double mu_i = 0, mu_j = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = p(i, j);
      const double d = static_cast<double>(i - j);
      f.contrast += v * d * d;
      f.dissimilarity += v * (squared_dissimilarity ? d * d : std::abs(d));
      f.homogeneity += v / (1.0 + d * d);
      f.energy += v * v;
      mu_i += v * static_cast<double>(i);
      mu_j += v * static_cast<double>(j);
    }
  f.energy = std::sqrt(f.energy);
  double var_i = 0, var_j = 0, cov = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = p(i, j);
      const double di = static_cast<double>(i) - mu_i;
      const double dj = static_cast<double>(j) - mu_j;
      var_i += v * di * di;
      var_j += v * dj * dj;
      cov += v * di * dj;
    }
  if (var_i <= 1e-14 || var_j <= 1e-14) {
    f.correlation = 0;
    f.correlation_degenerate = true;
  } else {
    f.correlation = std::clamp(cov / std::sqrt(var_i * var_j), -1.0, 1.0);
  }
  return f;
}

namespace {

struct Ranked {
  std::vector<long> doubled;  // 2 * mid-rank, always an integer
  double tie_sum = 0;         // sum over tie groups of t^3 - t
};

Ranked rank_pooled(const std::vector<double>& pooled) {
  const std::size_t n = pooled.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
  Ranked out;
  out.doubled.assign(n, 0);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    // Ranks i+1 .. j+1 share the mid-rank (i + j + 2) / 2.
    const long twice = static_cast<long>(i + j + 2);
    for (std::size_t m = i; m <= j; ++m) out.doubled[order[m]] = twice;
    const double t = static_cast<double>(j - i + 1);
    out.tie_sum += t * t * t - t;
    i = j + 1;
  }
  return out;
}

// P(|2 R_1 - n_1 (n + 1)| >= observed) over all equally likely assignments of
// the pooled ranks to group 1 (size n1).
double exact_two_group_p(const std::vector<long>& doubled, std::size_t n1, long observed_dev) {
  const std::size_t n = doubled.size();
  const long max_sum = std::accumulate(doubled.begin(), doubled.end(), 0L);
  // ways[j][s]: number of j-subsets with doubled rank sum s.
  std::vector<std::vector<double>> ways(n1 + 1, std::vector<double>(max_sum + 1, 0.0));
  ways[0][0] = 1.0;
  for (std::size_t item = 0; item < n; ++item) {
    const long r = doubled[item];
    for (std::size_t j = std::min(n1, item + 1); j >= 1; --j)
      for (long s = max_sum; s >= r; --s) ways[j][s] += ways[j - 1][s - r];
  }
  const long centre = static_cast<long>(n1) * static_cast<long>(n + 1);
  double hit = 0, total = 0;
  for (long s = 0; s <= max_sum; ++s) {
    const double w = ways[n1][s];
    if (w == 0) continue;
    total += w;
    if (std::labs(s - centre) >= observed_dev) hit += w;
  }
  return hit / total;
}

}  // namespace

KruskalWallis kruskal_wallis(const std::vector<std::vector<double>>& groups) {
  require(groups.size() >= 2, ErrorKind::kParameter, "Kruskal-Wallis needs at least 2 groups");
  std::vector<double> pooled;
  for (const auto& g : groups) {
    require(g.size() >= 2, ErrorKind::kParameter, "each group needs at least 2 values");
    for (double v : g) {
      require(std::isfinite(v), ErrorKind::kDomain, "Kruskal-Wallis values must be finite");
      pooled.push_back(v);
    }
  }
  const double n = static_cast<double>(pooled.size());
  const Ranked ranked = rank_pooled(pooled);
  KruskalWallis out;
  out.dof = static_cast<int>(groups.size()) - 1;
  const double correction = 1.0 - ranked.tie_sum / (n * n * n - n);
  if (correction <= 0) {
    out.degenerate = true;
    out.h = 0;
    out.p_value = 1;
    if (groups.size() == 2) out.p_exact = 1.0;
    return out;
  }
  double sum_term = 0;
  std::vector<long> group_doubled;
  std::size_t offset = 0;
  for (const auto& g : groups) {
    long twice = 0;
    for (std::size_t i = 0; i < g.size(); ++i) twice += ranked.doubled[offset + i];
    group_doubled.push_back(twice);
    const double r = 0.5 * static_cast<double>(twice);
    sum_term += r * r / static_cast<double>(g.size());
    offset += g.size();
  }
  const double h = (12.0 / (n * (n + 1)) * sum_term - 3.0 * (n + 1)) / correction;
  out.h = std::max(0.0, h);
  out.p_value = boost::math::gamma_q(0.5 * out.dof, 0.5 * out.h);
  if (groups.size() == 2 && pooled.size() <= kExactLimit) {
    const std::size_t n1 = groups[0].size();
    const long centre = static_cast<long>(n1) * static_cast<long>(pooled.size() + 1);
    out.p_exact = exact_two_group_p(ranked.doubled, n1, std::labs(group_doubled[0] - centre));
  }
  return out;
}

KruskalWallis kruskal_wallis(const std::vector<double>& a, const std::vector<double>& b) {
  return kruskal_wallis(std::vector<std::vector<double>>{a, b});
}

namespace {

double log1pexp(double eta) { return eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta)); }

double sigmoid(double eta) {
  if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

double log_likelihood(const Matrix& design, const Vector& y, const Vector& beta) {
  const Vector eta = design * beta;
  double ll = 0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) ll += y(i) * eta(i) - log1pexp(eta(i));
  return ll;
}

void check_labels(const Matrix& features, const std::vector<int>& labels) {
  require(static_cast<std::size_t>(features.rows()) == labels.size(), ErrorKind::kDimension,
          "feature rows and labels differ in count");
  require(features.allFinite(), ErrorKind::kDomain, "features must be finite");
  std::size_t pos = 0;
  for (int l : labels) {
    require(l == 0 || l == 1, ErrorKind::kParameter, "labels must be 0 or 1");
    pos += static_cast<std::size_t>(l);
  }
  require(pos > 0 && pos < labels.size(), ErrorKind::kParameter,
          "logistic regression needs both classes");
}

}  // namespace

Vector LogisticModel::score(const Matrix& features) const {
  require(features.cols() == mean.size(), ErrorKind::kDimension, "feature count mismatch");
  const Matrix z = (features.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
  return (z * coefficients.tail(coefficients.size() - 1)).array() + coefficients(0);
}

LogisticModel logistic_fit(const Matrix& features, const std::vector<int>& labels,
                           const LogisticOptions& opts) {
  check_labels(features, labels);
  require(opts.ridge >= 0 && opts.gradient_tol > 0 && opts.max_iter >= 1, ErrorKind::kParameter,
          "invalid logistic options");
  std::size_t pos = 0;
  for (int l : labels) pos += static_cast<std::size_t>(l);
  require(pos >= 2 && labels.size() - pos >= 2, ErrorKind::kParameter,
          "logistic regression needs at least 2 subjects per class");

  const Eigen::Index n = features.rows();
  const Eigen::Index p = features.cols();
  LogisticModel model;
  model.mean = features.colwise().mean().transpose();
  model.scale = ((features.rowwise() - model.mean.transpose()).array().square().colwise().mean())
                    .sqrt()
                    .transpose();
  for (Eigen::Index j = 0; j < p; ++j)
    if (!(model.scale(j) > 0)) model.scale(j) = 1.0;

  Matrix design(n, p + 1);
  design.col(0).setOnes();
  design.rightCols(p) =
      (features.rowwise() - model.mean.transpose()).array().rowwise() / model.scale.transpose().array();
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = labels[static_cast<std::size_t>(i)];

  Vector beta = Vector::Zero(p + 1);
  auto objective = [&](const Vector& b) {
    return log_likelihood(design, y, b) - 0.5 * opts.ridge * b.squaredNorm();
  };
  double current = objective(beta);
  for (int it = 0; it < opts.max_iter; ++it) {
    const Vector eta = design * beta;
    Vector prob(n), weight(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      prob(i) = sigmoid(eta(i));
      weight(i) = prob(i) * (1.0 - prob(i));
    }
    const Vector grad = design.transpose() * (y - prob) - opts.ridge * beta;
    if (grad.norm() < opts.gradient_tol) {
      model.converged = true;
      break;
    }
    Matrix hess = design.transpose() * weight.asDiagonal() * design;
    hess.diagonal().array() += opts.ridge;
    const Vector delta = hess.ldlt().solve(grad);
    // Step halving keeps the penalized log-likelihood monotone.
    double t = 1.0;
    Vector candidate = beta + delta;
    double next = objective(candidate);
    for (int h = 0; h < 40 && !(next >= current); ++h) {
      t *= 0.5;
      candidate = beta + t * delta;
      next = objective(candidate);
    }
    if (!(next >= current)) break;  // no ascent direction left at working precision
    beta = candidate;
    current = next;
    model.iterations = it + 1;
    model.penalized_log_likelihood.push_back(current);
    model.log_likelihood.push_back(log_likelihood(design, y, beta));
  }
  if (!model.converged) {
    const Vector eta = design * beta;
    Vector prob(n);
    for (Eigen::Index i = 0; i < n; ++i) prob(i) = sigmoid(eta(i));
    model.converged = (design.transpose() * (y - prob) - opts.ridge * beta).norm() < opts.gradient_tol;
  }
  model.coefficients = beta;

  const Vector s = design * beta;
  double min_pos = std::numeric_limits<double>::infinity();
  double max_neg = -min_pos;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y(i) > 0.5) min_pos = std::min(min_pos, s(i));
    else max_neg = std::max(max_neg, s(i));
  }
  model.separated = min_pos > max_neg;
  return model;
}

LogisticEvaluation roc_from_scores(const Vector& scores, const std::vector<int>& labels) {
  require(static_cast<std::size_t>(scores.size()) == labels.size(), ErrorKind::kDimension,
          "scores and labels differ in count");
  double n_pos = 0, n_neg = 0;
  for (int l : labels) {
    require(l == 0 || l == 1, ErrorKind::kParameter, "labels must be 0 or 1");
    (l == 1 ? n_pos : n_neg) += 1;
  }
  require(n_pos > 0 && n_neg > 0, ErrorKind::kParameter, "ROC needs both classes");
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores(a) > scores(b); });
  LogisticEvaluation ev;
  ev.roc.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  double tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double thr = scores(order[i]);
    while (i < order.size() && scores(order[i]) == thr) {
      (labels[order[i]] == 1 ? tp : fp) += 1;
      ++i;
    }
    ev.roc.push_back({thr, fp / n_neg, tp / n_pos});
  }
  for (std::size_t i = 1; i < ev.roc.size(); ++i)
    ev.auc += (ev.roc[i].fpr - ev.roc[i - 1].fpr) * 0.5 * (ev.roc[i].tpr + ev.roc[i - 1].tpr);
  return ev;
}

LogisticEvaluation logistic_eval(const LogisticModel& model, const Matrix& features,
                                 const std::vector<int>& labels) {
  check_labels(features, labels);
  const Vector s = model.score(features);
  LogisticEvaluation ev = roc_from_scores(s, labels);
  double correct = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const int predicted = sigmoid(s(i)) >= 0.5 ? 1 : 0;
    if (predicted == labels[static_cast<std::size_t>(i)]) correct += 1;
  }
  ev.accuracy = correct / static_cast<double>(s.size());
  return ev;
}

double logistic_loo_accuracy(const Matrix& features, const std::vector<int>& labels,
                             const LogisticOptions& opts) {
  check_labels(features, labels);
  const Eigen::Index n = features.rows();
  double correct = 0;
  for (Eigen::Index hold = 0; hold < n; ++hold) {
    Matrix train(n - 1, features.cols());
    std::vector<int> train_labels;
    for (Eigen::Index i = 0, r = 0; i < n; ++i) {
      if (i == hold) continue;
      train.row(r++) = features.row(i);
      train_labels.push_back(labels[static_cast<std::size_t>(i)]);
    }
    const LogisticModel m = logistic_fit(train, train_labels, opts);
    const double s = m.score(features.row(hold))(0);
    const int predicted = sigmoid(s) >= 0.5 ? 1 : 0;
    if (predicted == labels[static_cast<std::size_t>(hold)]) correct += 1;
  }
  return correct / static_cast<double>(n);
}

Matrix feature_matrix(const std::vector<TlcmFeatures>& rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), 5);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto v = rows[i].values();
    for (int j = 0; j < 5; ++j) m(static_cast<Eigen::Index>(i), j) = v[static_cast<std::size_t>(j)];
  }
  return m;
}

}  // namespace irf

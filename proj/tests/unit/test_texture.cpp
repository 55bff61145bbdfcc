#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <doctest.h>

#include "irfact/error.hpp"
#include "irfact/texture.hpp"
#include "../support/oracles.hpp"

using namespace irf;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an irf::Error");
  return ErrorKind::kIo;
}

BinaryMask full(Eigen::Index r, Eigen::Index c) { return BinaryMask(Dims{static_cast<std::size_t>(r), static_cast<std::size_t>(c)}, true); }

// Counts pairs one offset at a time by enumerating every pixel.
Matrix brute_tlcm(const LevelImage& q, int levels, const std::vector<std::pair<int, int>>& steps, bool symmetric) {
  Matrix p = Matrix::Zero(levels, levels);
  for (auto [dr, dc] : steps)
    for (Eigen::Index r = 0; r < q.rows(); ++r)
      for (Eigen::Index c = 0; c < q.cols(); ++c) {
        const Eigen::Index r2 = r + dr, c2 = c + dc;
        if (r2 < 0 || c2 < 0 || r2 >= q.rows() || c2 >= q.cols()) continue;
        if (q(r, c) < 0 || q(r2, c2) < 0) continue;
        p(q(r, c), q(r2, c2)) += 1;
        if (symmetric) p(q(r2, c2), q(r, c)) += 1;
      }
  return p / p.sum();
}

Matrix random_p(int l, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  Matrix p(l, l);
  for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = u(rng) * u(rng);
  return p / p.sum();
}

}  // namespace

TEST_CASE("quantize: hand binning, identity and constant ROI") {
  Image im(1, 4);
  im << 0, 10, 20, 30;
  const Quantized q = quantize(im, full(1, 4), 2);
  CHECK(q.levels(0, 0) == 0);
  CHECK(q.levels(0, 1) == 0);
  CHECK(q.levels(0, 2) == 1);
  CHECK(q.levels(0, 3) == 1);
  CHECK_FALSE(q.degenerate);

  Image ramp(16, 16);
  for (int i = 0; i < 256; ++i) ramp(i / 16, i % 16) = i;
  const Quantized id = quantize(ramp, full(16, 16), 256);
  for (int i = 0; i < 256; ++i) CHECK(id.levels(i / 16, i % 16) == i);

  BinaryMask roi(Dims{1, 4});
  roi.set(0, 1, true);
  roi.set(0, 2, true);
  im << 100, 5, 5, -100;
  const Quantized k = quantize(im, roi, 8);
  CHECK(k.degenerate);
  CHECK(k.levels(0, 1) == 0);
  CHECK(k.levels(0, 0) == kOutsideRoi);
  CHECK(k.levels(0, 3) == kOutsideRoi);
  CHECK(kind_of([&] { quantize(im, BinaryMask(Dims{1, 4}), 8); }) == ErrorKind::kParameter);
  CHECK(kind_of([&] { quantize(im, roi, 1); }) == ErrorKind::kParameter);
}

TEST_CASE("offsets map to rounded pixel steps") {
  CHECK(Offset{1, 0}.col_step() == 1);
  CHECK(Offset{1, 0}.row_step() == 0);
  CHECK(Offset{1, std::numbers::pi / 2}.row_step() == 1);
  CHECK(Offset{1, std::numbers::pi / 2}.col_step() == 0);
  CHECK(Offset{2, std::numbers::pi / 4}.row_step() == 1);
  CHECK(Offset{2, std::numbers::pi / 4}.col_step() == 1);
  CHECK(default_offsets().size() == 2);
}

TEST_CASE("tlcm: 2x2 example matches pair enumeration") {
  LevelImage q(2, 2);
  q << 0, 0, 1, 1;
  const Tlcm t = tlcm(q, full(2, 2), {Offset{1, 0}}, 2, false);
  Matrix expected(2, 2);
  expected << 0.5, 0, 0, 0.5;
  CHECK(t.p == expected);
  CHECK(t.p == brute_tlcm(q, 2, {{0, 1}}, false));
  CHECK(tlcm(q, full(2, 2), {Offset{1, 0}}, 2, true).p == expected);
}

TEST_CASE("tlcm: checkerboard has a zero diagonal") {
  LevelImage q(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) q(r, c) = (r + c) % 2;
  const Tlcm t = tlcm(q, full(4, 4), {Offset{1, 0}}, 2, true);
  CHECK(t.p(0, 0) == 0.0);
  CHECK(t.p(1, 1) == 0.0);
  CHECK(t.p == brute_tlcm(q, 2, {{0, 1}}, true));
  CHECK(t.p(0, 1) == 0.5);
}

TEST_CASE("tlcm: random level images agree with enumeration, sum to 1 and are symmetric") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> lv(0, 5);
  std::bernoulli_distribution in_roi(0.8);
  for (int trial = 0; trial < 30; ++trial) {
    LevelImage q(7, 9);
    BinaryMask roi(Dims{7, 9});
    for (Eigen::Index r = 0; r < 7; ++r)
      for (Eigen::Index c = 0; c < 9; ++c) {
        const bool inside = in_roi(rng);
        roi.set(r, c, inside);
        q(r, c) = inside ? lv(rng) : kOutsideRoi;
      }
    const std::vector<Offset> offs = {{1, 0}, {1, std::numbers::pi / 2}, {2, std::numbers::pi / 4}};
    for (bool sym : {false, true}) {
      const Tlcm t = tlcm(q, roi, offs, 6, sym);
      const Matrix ref = brute_tlcm(q, 6, {{0, 1}, {1, 0}, {1, 1}}, sym);
      CHECK((t.p - ref).cwiseAbs().maxCoeff() <= 1e-15);
      CHECK(std::abs(t.p.sum() - 1) <= 1e-12);
      CHECK(t.p.minCoeff() >= 0);
      if (sym) CHECK(t.p == t.p.transpose());
    }
  }
}

TEST_CASE("tlcm with no valid pairs is degenerate") {
  LevelImage q(1, 1);
  q << 0;
  CHECK(kind_of([&] { tlcm(q, full(1, 1), {Offset{1, 0}}, 2); }) == ErrorKind::kDegenerate);
  CHECK(kind_of([&] { tlcm(q, full(1, 1), {}, 2); }) == ErrorKind::kParameter);
}

TEST_CASE("features: diagonal, uniform and point-mass matrices") {
  Matrix d(2, 2);
  d << 0.5, 0, 0, 0.5;
  const TlcmFeatures f = features(d);
  CHECK(std::abs(f.contrast) <= 1e-12);
  CHECK(std::abs(f.dissimilarity) <= 1e-12);
  CHECK(std::abs(f.homogeneity - 1) <= 1e-12);
  CHECK(std::abs(f.energy - std::sqrt(0.5)) <= 1e-12);
  CHECK(std::abs(f.correlation - 1) <= 1e-12);
  CHECK_FALSE(f.correlation_degenerate);

  for (int l : {2, 5, 32}) {
    const TlcmFeatures u = features(Matrix::Constant(l, l, 1.0 / (l * l)));
    CHECK(std::abs(u.correlation) <= 1e-12);
    CHECK(u.energy == doctest::Approx(1.0 / l).epsilon(1e-12));
  }

  Matrix pm = Matrix::Zero(3, 3);
  pm(0, 0) = 1;
  const TlcmFeatures m = features(pm);
  CHECK(m.energy == 1.0);
  CHECK(m.homogeneity == 1.0);
  CHECK(m.contrast == 0.0);
  CHECK(m.correlation == 0.0);
  CHECK(m.correlation_degenerate);
}

TEST_CASE("features: squared dissimilarity reproduces contrast") {
  std::mt19937_64 rng(8);
  const Matrix p = random_p(6, rng);
  CHECK(features(p, true).dissimilarity == doctest::Approx(features(p).contrast).epsilon(1e-14));
}

TEST_CASE("features: ranges and dissimilarity <= sqrt(contrast) on random matrices") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const int l = 2 + trial % 10;
    const TlcmFeatures f = features(random_p(l, rng));
    CHECK(f.dissimilarity <= std::sqrt(f.contrast) + 1e-12);
    CHECK(f.contrast >= 0);
    CHECK(f.energy > 0);
    CHECK(f.energy <= 1);
    CHECK(f.homogeneity > 0);
    CHECK(f.homogeneity <= 1);
    CHECK(f.correlation >= -1);
    CHECK(f.correlation <= 1);
  }
}

TEST_CASE("features depend only on the quantized levels") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0, 1);
  Image im(10, 10);
  for (Eigen::Index i = 0; i < im.size(); ++i) im.data()[i] = std::floor(8 * u(rng)) + 0.5;
  im(0, 0) = 0;
  im(9, 9) = 8;
  // Moving values inside their bin keeps every level.
  Image moved = im;
  for (Eigen::Index i = 0; i < moved.size(); ++i)
    if (i != 0 && i != moved.size() - 1) moved.data()[i] += 0.4 * (u(rng) - 0.5);
  const Quantized a = quantize(im, full(10, 10), 8), b = quantize(moved, full(10, 10), 8);
  REQUIRE(a.levels == b.levels);
  const TlcmFeatures fa = features(tlcm(a.levels, full(10, 10), default_offsets(), 8));
  const TlcmFeatures fb = features(tlcm(b.levels, full(10, 10), default_offsets(), 8));
  CHECK(fa.values() == fb.values());
}

TEST_CASE("kruskal_wallis: worked example and identical groups") {
  const KruskalWallis k = kruskal_wallis({1, 2, 3}, {4, 5, 6});
  CHECK(std::abs(k.h - 3.857) <= 0.001);
  CHECK(k.h == doctest::Approx(oracle::kruskal_h({1, 2, 3}, {4, 5, 6})).epsilon(1e-14));
  CHECK(k.p_value == doctest::Approx(0.0495).epsilon(0.01));
  CHECK(k.dof == 1);
  REQUIRE(k.p_exact.has_value());
  CHECK(*k.p_exact == doctest::Approx(0.1).epsilon(1e-12));

  const KruskalWallis z = kruskal_wallis({1, 2}, {1, 2});
  CHECK(z.h == 0.0);
  CHECK(z.p_value == doctest::Approx(1.0));

  const KruskalWallis c = kruskal_wallis({3, 3}, {3, 3, 3});
  CHECK(c.degenerate);
  CHECK(c.h == 0.0);
  CHECK(c.p_value == 1.0);
  CHECK(kind_of([&] { kruskal_wallis({1}, {2, 3}); }) == ErrorKind::kParameter);
}

TEST_CASE("kruskal_wallis: exact p matches exhaustive permutation for groups up to 8") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> size(2, 8);
  std::uniform_int_distribution<int> val(0, 9);  // small range forces ties
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<double> a(static_cast<std::size_t>(size(rng))), b(static_cast<std::size_t>(size(rng)));
    for (double& v : a) v = val(rng);
    for (double& v : b) v = val(rng) + 2;
    const KruskalWallis k = kruskal_wallis(a, b);
    if (k.degenerate) continue;
    CHECK(k.h == doctest::Approx(oracle::kruskal_h(a, b)).epsilon(1e-12));
    REQUIRE(k.p_exact.has_value());
    CHECK(std::abs(*k.p_exact - oracle::permutation_p(a, b)) <= 1e-12);
  }
}

TEST_CASE("kruskal_wallis is invariant under increasing transforms") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(6), b(7);
    for (double& v : a) v = g(rng);
    for (double& v : b) v = g(rng) + 0.5;
    auto tf = [](std::vector<double> v) {
      for (double& x : v) x = std::exp(3 * x) + 10;
      return v;
    };
    const KruskalWallis k1 = kruskal_wallis(a, b), k2 = kruskal_wallis(tf(a), tf(b));
    CHECK(k1.h == k2.h);
    CHECK(k1.p_value == k2.p_value);
    CHECK(*k1.p_exact == *k2.p_exact);
  }
}

TEST_CASE("kruskal_wallis with three groups uses two degrees of freedom") {
  const KruskalWallis k = kruskal_wallis(std::vector<std::vector<double>>{{1, 2}, {3, 4}, {5, 6}});
  CHECK(k.dof == 2);
  CHECK_FALSE(k.p_exact.has_value());
  CHECK(k.h == doctest::Approx(32.0 / 7.0).epsilon(1e-12));
  CHECK(k.p_value == doctest::Approx(std::exp(-k.h / 2)).epsilon(1e-12));
}

TEST_CASE("logistic: separable data, flags and perfect evaluation") {
  Matrix x(6, 1);
  x << -3, -2, -1, 1, 2, 3;
  const std::vector<int> y = {0, 0, 0, 1, 1, 1};
  const LogisticModel m = logistic_fit(x, y);
  CHECK(m.separated);
  const LogisticEvaluation e = logistic_eval(m, x, y);
  CHECK(e.accuracy == 1.0);
  CHECK(e.auc == 1.0);
  CHECK(m.coefficients.allFinite());
  CHECK(kind_of([&] { logistic_fit(x, std::vector<int>(6, 1)); }) == ErrorKind::kParameter);
  CHECK(kind_of([&] { logistic_fit(x, {0, 1, 1, 1, 1, 1}); }) == ErrorKind::kParameter);
}

TEST_CASE("logistic: symmetric data gives a zero intercept") {
  Matrix x(4, 1);
  x << -2, -1, 1, 2;
  const LogisticModel m = logistic_fit(x, {0, 1, 0, 1});
  CHECK(std::abs(m.coefficients(0)) <= 1e-8);
  CHECK(m.converged);
}

TEST_CASE("logistic: permuted labels give small coefficients and near-prior accuracy") {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> g(0, 1);
  const int n = 2000;
  Matrix x(n, 5);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 5; ++j) x(i, j) = g(rng);
    y[static_cast<std::size_t>(i)] = i % 2;
  }
  std::shuffle(y.begin(), y.end(), rng);
  const LogisticModel m = logistic_fit(x, y);
  CHECK(m.coefficients.cwiseAbs().maxCoeff() < 0.15);
  CHECK(std::abs(logistic_eval(m, x, y).accuracy - 0.5) < 0.05);
}

TEST_CASE("logistic: log-likelihood never decreases across iterations") {
  std::mt19937_64 rng(15);
  std::normal_distribution<double> g(0, 1);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix x(40, 3);
    std::vector<int> y(40);
    for (int i = 0; i < 40; ++i) {
      for (int j = 0; j < 3; ++j) x(i, j) = g(rng);
      y[static_cast<std::size_t>(i)] = x(i, 0) + 0.8 * g(rng) > 0 ? 1 : 0;
    }
    const LogisticModel m = logistic_fit(x, y);
    const auto& ll = m.penalized_log_likelihood;
    for (std::size_t t = 1; t < ll.size(); ++t) CHECK(ll[t] >= ll[t - 1] - 1e-10);
  }
}

TEST_CASE("roc: AUC equals the U statistic, constant scores give 0.5") {
  std::mt19937_64 rng(16);
  std::uniform_int_distribution<int> s(0, 6);  // coarse scores create ties
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd scores(20);
    std::vector<int> y(20);
    for (int i = 0; i < 20; ++i) {
      y[static_cast<std::size_t>(i)] = i < 9 ? 1 : 0;
      scores(i) = s(rng) + (y[static_cast<std::size_t>(i)] ? 1 : 0);
    }
    const LogisticEvaluation e = roc_from_scores(scores, y);
    const std::vector<double> sv(scores.data(), scores.data() + 20);
    CHECK(e.auc == doctest::Approx(oracle::u_statistic_auc(sv, y)).epsilon(1e-14));
    CHECK(e.roc.front().fpr == 0.0);
    CHECK(e.roc.front().tpr == 0.0);
    CHECK(e.roc.back().fpr == 1.0);
    CHECK(e.roc.back().tpr == 1.0);
  }
  const LogisticEvaluation c = roc_from_scores(Eigen::VectorXd::Constant(6, 2.0), {0, 1, 0, 1, 1, 0});
  CHECK(c.auc == 0.5);
}

TEST_CASE("leave-one-out accuracy on well separated data") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0, 1);
  Matrix x(20, 2);
  std::vector<int> y(20);
  for (int i = 0; i < 20; ++i) {
    y[static_cast<std::size_t>(i)] = i < 10;
    x(i, 0) = g(rng) + (i < 10 ? 4 : -4);
    x(i, 1) = g(rng);
  }
  CHECK(logistic_loo_accuracy(x, y) >= 0.95);
}

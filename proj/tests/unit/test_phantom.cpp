#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "irfact/error.hpp"
#include "irfact/phantom.hpp"

using namespace irf;

namespace {

SpecimenSpec small_plate() {
  SpecimenSpec s;
  s.name = "test";
  s.width = 0.04;
  s.height = 0.04;
  s.thickness = 0.004;
  s.grid = {16, 16, 8};
  s.conductivity = 0.2;
  s.density = 1190;
  s.specific_heat = 1470;
  return s;
}

ActiveAcquisition short_acq() {
  ActiveAcquisition a;
  a.flash_energy = 5000;
  a.flash_duration = 0.005;
  a.sampling_rate = 2;
  a.duration = 10;
  return a;
}

double spread(const Image& im) { return im.maxCoeff() - im.minCoeff(); }

}  // namespace

TEST_CASE("presets carry the documented defect counts and depths") {
  const SpecimenPreset al = find_preset("al");
  CHECK(al.specimen.defects.size() == 4);
  for (const Defect& d : al.specimen.defects) {
    CHECK(d.depth >= 0.0035 - 1e-12);
    CHECK(d.depth <= 0.0045 + 1e-12);
  }
  const SpecimenPreset plexi = find_preset("PLEXI");
  CHECK(plexi.specimen.defects.size() == 6);
  CHECK(plexi.specimen.thickness == doctest::Approx(0.004));
  for (const Defect& d : plexi.specimen.defects) CHECK(d.depth < plexi.specimen.thickness);
  const SpecimenPreset cfrp = find_preset("CFRP");
  CHECK(cfrp.specimen.defects.size() == 25);
  for (const Defect& d : cfrp.specimen.defects) {
    CHECK(d.depth >= 0.0002 - 1e-12);
    CHECK(d.depth <= 0.001 + 1e-12);
  }
  for (const auto& p : builtin_specimens()) CHECK_NOTHROW(p.specimen.validate());
  CHECK_THROWS_AS(find_preset("steel"), Error);
}

TEST_CASE("specimen validation rejects impossible geometry") {
  SpecimenSpec s = small_plate();
  s.defects.push_back({0.02, 0.02, 0.005, 0.005, 0});
  CHECK_THROWS_AS(s.validate(), Error);
  s.defects[0] = {0.001, 0.02, 0.005, 0.002, 0};
  CHECK_THROWS_AS(s.validate(), Error);
  s.defects[0] = {0.02, 0.02, 0.005, 0.002, 0};
  CHECK_NOTHROW(s.validate());
  s.conductivity = 0;
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("a plate without defects stays spatially uniform") {
  const ActiveResult r = simulate_active(small_plate(), short_acq());
  CHECK(r.sequence.frame_count() == 20);
  for (const Image& f : r.sequence.frames()) CHECK(spread(f) <= 1e-9 * std::abs(f.maxCoeff()));
  CHECK(r.ground_truth.empty());
}

TEST_CASE("a shallow defect shows more contrast than a deep one") {
  SpecimenSpec s = small_plate();
  s.width = 0.08;
  s.grid = {16, 32, 8};
  s.defects = {{0.02, 0.02, 0.006, 0.001, 0}, {0.06, 0.02, 0.006, 0.0025, 0}};
  const ActiveResult r = simulate_active(s, short_acq());
  REQUIRE(r.defect_masks.size() == 2);
  CHECK(r.ground_truth.count() == r.defect_masks[0].count() + r.defect_masks[1].count());
  auto peak_contrast = [&](double x) {
    const auto col = static_cast<Eigen::Index>(x / s.width * 32);
    double best = 0;
    for (const Image& f : r.sequence.frames()) best = std::max(best, f(4, col) - f(15, 16));
    return best;
  };
  CHECK(peak_contrast(0.02) > peak_contrast(0.06));
  CHECK(peak_contrast(0.06) > 0);
  for (const BinaryMask& m : r.defect_masks) CHECK((m & r.sound_region).empty());
}

TEST_CASE("simulation is deterministic") {
  SpecimenSpec s = small_plate();
  s.defects = {{0.02, 0.02, 0.006, 0.002, 0}};
  const ActiveResult a = simulate_active(s, short_acq());
  const ActiveResult b = simulate_active(s, short_acq());
  for (std::size_t t = 0; t < a.sequence.frame_count(); ++t) CHECK(a.sequence.frame(t) == b.sequence.frame(t));
}

TEST_CASE("heat kernel: cosine mode decays at the analytic rate") {
  const std::size_t n = 64;
  const double lz = 0.01, kappa = 1.0, cap = 1e6;
  const double dz = lz / n;
  HeatGrid g({1, 1, n}, 1.0, 1.0, dz, cap, std::vector<double>(n, kappa));
  for (std::size_t k = 0; k < n; ++k)
    g.temperature()[k] = std::cos(std::numbers::pi * (static_cast<double>(k) + 0.5) / n);
  const double alpha = kappa / cap;
  const double t_half = std::log(2.0) * lz * lz / (alpha * std::numbers::pi * std::numbers::pi);
  const double dt = 0.5 * g.max_stable_step();
  const int steps = static_cast<int>(std::ceil(t_half / dt));
  const double h = t_half / steps;
  for (int i = 0; i < steps; ++i) g.step(h);
  const double amp = std::exp(-alpha * std::numbers::pi * std::numbers::pi * t_half / (lz * lz));
  CHECK(amp == doctest::Approx(0.5));
  double worst = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double exact = amp * std::cos(std::numbers::pi * (static_cast<double>(k) + 0.5) / n);
    worst = std::max(worst, std::abs(g.temperature()[k] - exact) / amp);
  }
  CHECK(worst <= 0.01);
}

TEST_CASE("heat kernel: insulated energy conservation and maximum principle") {
  const GridShape shape{6, 7, 5};
  std::vector<double> k(shape.rows * shape.cols * shape.layers, 2.0);
  for (std::size_t i = 0; i < k.size(); i += 7) k[i] = 0.0;  // scattered voids
  HeatGrid g(shape, 1e-3, 1e-3, 5e-4, 2e6, k);
  const double dt = 0.9 * g.max_stable_step();
  g.step(dt, 1000.0);
  const double e0 = g.total_energy();
  double peak = *std::max_element(g.temperature().begin(), g.temperature().end());
  CHECK(e0 > 0);
  for (int i = 0; i < 2000; ++i) {
    g.step(dt);
    const double m = *std::max_element(g.temperature().begin(), g.temperature().end());
    CHECK(m <= peak * (1 + 1e-12));
    peak = m;
  }
  CHECK(std::abs(g.total_energy() - e0) <= 1e-4 * e0);
}

TEST_CASE("grid refinement changes the last frame by at most 2% RMS") {
  SpecimenSpec coarse = small_plate();
  coarse.defects = {{0.02, 0.02, 0.008, 0.002, 0}};
  SpecimenSpec fine = coarse;
  fine.grid = {32, 32, 8};
  const ActiveAcquisition acq = short_acq();
  const Image a = simulate_active(coarse, acq).sequence.frames().back();
  const Image b = simulate_active(fine, acq).sequence.frames().back();
  Image pooled(16, 16);
  for (int r = 0; r < 16; ++r)
    for (int c = 0; c < 16; ++c)
      pooled(r, c) = 0.25 * (b(2 * r, 2 * c) + b(2 * r + 1, 2 * c) + b(2 * r, 2 * c + 1) + b(2 * r + 1, 2 * c + 1));
  const double rms = std::sqrt((a - pooled).array().square().mean());
  const double ref = std::sqrt(a.array().square().mean());
  CHECK(rms <= 0.02 * ref);
}

TEST_CASE("bioheat: Pennes steady state without conduction") {
  BioheatSpec s;
  s.rows = 4;
  s.cols = 4;
  s.conductivity = 0;
  s.perfusion_rate = 2.0;
  const double tau = s.density * s.specific_heat / (s.perfusion_rate * s.blood_specific_heat);
  const PassiveResult r = simulate_passive(s, 12 * tau, 10 / tau);
  const double expected = s.arterial_temp + s.metabolic_rate / (s.perfusion_rate * s.blood_specific_heat);
  const Image& last = r.sequence.frames().back();
  for (Eigen::Index i = 0; i < last.size(); ++i)
    CHECK(std::abs(last.data()[i] - expected) <= 1e-3 * (expected - s.arterial_temp));
  CHECK_FALSE(r.symptomatic);
  CHECK(r.lesion_mask.empty());
}

TEST_CASE("bioheat: homogeneous tissue stays uniform, a lesion runs hotter") {
  BioheatSpec s;
  s.rows = 24;
  s.cols = 24;
  const PassiveResult flat = simulate_passive(s, 600, 1.0 / 60);
  for (const Image& f : flat.sequence.frames()) CHECK(spread(f) <= 1e-9 * f.maxCoeff());

  s.lesions.push_back({0.06, 0.06, 0.01, 1.0, 2.0});
  const PassiveResult hot = simulate_passive(s, 3600, 1.0 / 600);
  CHECK(hot.symptomatic);
  CHECK_FALSE(hot.lesion_mask.empty());
  const Image& f = hot.sequence.frames().back();
  CHECK(f(12, 12) > f(0, 0));

  s.lesions[0].metabolic_multiplier = 0.5;
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("cohort: labels, ids and reproducibility") {
  CohortSpec spec;
  spec.subjects = 4;
  spec.symptomatic = 2;
  spec.tissue.rows = 16;
  spec.tissue.cols = 16;
  spec.duration = 300;
  spec.sampling_rate = 1.0 / 60;
  const auto a = simulate_cohort(spec, 5);
  const auto b = simulate_cohort(spec, 5);
  REQUIRE(a.size() == 4);
  CHECK(a[0].id == "S01");
  CHECK(a[3].id == "S04");
  CHECK(a[0].label == 1);
  CHECK(a[1].label == 1);
  CHECK(a[2].label == 0);
  CHECK_FALSE(a[0].result.lesion_mask.empty());
  CHECK(a[3].result.lesion_mask.empty());
  for (std::size_t i = 0; i < 4; ++i)
    CHECK(a[i].result.sequence.frames().back() == b[i].result.sequence.frames().back());
  const auto c = simulate_cohort(spec, 6);
  CHECK(a[2].result.sequence.frames().back() != c[2].result.sequence.frames().back());
  spec.symptomatic = 5;
  CHECK_THROWS_AS(spec.validate(), Error);
}

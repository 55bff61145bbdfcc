#include "irfact/phantom.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>

#include "irfact/error.hpp"
#include "irfact/random.hpp"

namespace irf {

namespace {

double harmonic(double a, double b) { return (a > 0 && b > 0) ? 2.0 * a * b / (a + b) : 0.0; }

bool inside_disc(double px, double py, double cx, double cy, double r) {
  const double dx = px - cx;
  const double dy = py - cy;
  return dx * dx + dy * dy <= r * r;
}

BinaryMask disc_mask(std::size_t rows, std::size_t cols, double dx, double dy, double cx, double cy,
                     double r) {
  BinaryMask m(Dims{rows, cols});
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      if (inside_disc((j + 0.5) * dx, (i + 0.5) * dy, cx, cy, r))
        m.set(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j), true);
  return m;
}

void check_positive(double v, const char* what) {
  require(std::isfinite(v) && v > 0, ErrorKind::kParameter, std::string(what) + " must be > 0");
}

// Energy (J/m^2) of a rectangular pulse of length `duration` falling in [t0, t1).
double pulse_energy(double energy, double duration, double t0, double t1) {
  const double overlap = std::min(t1, duration) - std::max(t0, 0.0);
  return overlap > 0 ? energy * overlap / duration : 0.0;
}

// Zero-mean, unit-variance smooth random field: white noise blurred by a
// separable Gaussian of `sigma` cells with mirrored edges.
Image smooth_field(std::size_t rows, std::size_t cols, double sigma, std::uint64_t seed) {
  Rng rng = make_rng(derive_seed(seed, "perfusion-field"));
  std::normal_distribution<double> normal(0.0, 1.0);
  Image noise(rows, cols);
  for (Eigen::Index i = 0; i < noise.size(); ++i) noise.data()[i] = normal(rng);
  if (sigma <= 0) return noise;

  const int radius = std::max(1, static_cast<int>(std::ceil(3 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  for (int t = -radius; t <= radius; ++t) kernel[t + radius] = std::exp(-0.5 * t * t / (sigma * sigma));
  auto mirror = [](long i, long n) {
    while (i < 0 || i >= n) i = i < 0 ? -i - 1 : 2 * n - i - 1;
    return i;
  };
  const long nr = static_cast<long>(rows);
  const long nc = static_cast<long>(cols);
  Image tmp = Image::Zero(rows, cols);
  for (long i = 0; i < nr; ++i)
    for (long j = 0; j < nc; ++j)
      for (int t = -radius; t <= radius; ++t) tmp(i, j) += kernel[t + radius] * noise(i, mirror(j + t, nc));
  Image out = Image::Zero(rows, cols);
  for (long i = 0; i < nr; ++i)
    for (long j = 0; j < nc; ++j)
      for (int t = -radius; t <= radius; ++t) out(i, j) += kernel[t + radius] * tmp(mirror(i + t, nr), j);
  const double mean = out.mean();
  out.array() -= mean;
  const double sd = std::sqrt(out.array().square().mean());
  if (sd > 0) out /= sd;
  return out;
}

}  // namespace

void SpecimenSpec::validate() const {
  check_positive(width, "plate width");
  check_positive(height, "plate height");
  check_positive(thickness, "plate thickness");
  check_positive(conductivity, "conductivity");
  check_positive(density, "density");
  check_positive(specific_heat, "specific heat");
  require(grid.rows >= 1 && grid.cols >= 1 && grid.layers >= 2, ErrorKind::kParameter,
          "grid needs at least 1x1 cells and 2 layers");
  const double dz = thickness / static_cast<double>(grid.layers);
  for (std::size_t i = 0; i < defects.size(); ++i) {
    const Defect& d = defects[i];
    const std::string tag = "defect " + std::to_string(i) + ": ";
    check_positive(d.radius, "defect radius");
    require(d.x - d.radius > 0 && d.x + d.radius < width && d.y - d.radius > 0 &&
                d.y + d.radius < height,
            ErrorKind::kParameter, tag + "must lie strictly inside the plate");
    require(d.depth > 0 && d.depth < thickness, ErrorKind::kParameter,
            tag + "depth must lie in (0, thickness)");
    require(d.depth >= dz, ErrorKind::kParameter, tag + "depth is shallower than one grid layer");
    require(d.depth < thickness - 0.5 * dz, ErrorKind::kParameter,
            tag + "hole is thinner than one grid layer");
    require(d.conductivity_multiplier >= 0, ErrorKind::kParameter,
            tag + "conductivity multiplier must be >= 0");
  }
}

HeatGrid::HeatGrid(GridShape shape, double dx, double dy, double dz, double heat_capacity,
                   std::vector<double> conductivity)
    : shape_(shape),
      dz_(dz),
      heat_capacity_(heat_capacity),
      cell_volume_(dx * dy * dz),
      conductivity_(std::move(conductivity)) {
  const std::size_t n = shape.rows * shape.cols * shape.layers;
  require(n > 0 && conductivity_.size() == n, ErrorKind::kDimension,
          "conductivity field does not match the grid");
  require(dx > 0 && dy > 0 && dz > 0 && heat_capacity > 0, ErrorKind::kParameter,
          "grid spacing and heat capacity must be positive");
  gx_.assign(n, 0.0);
  gy_.assign(n, 0.0);
  gz_.assign(n, 0.0);
  temperature_.assign(n, 0.0);
  scratch_.assign(n, 0.0);
  std::vector<double> rate(n, 0.0);
  for (std::size_t l = 0; l < shape.layers; ++l) {
    for (std::size_t r = 0; r < shape.rows; ++r) {
      for (std::size_t c = 0; c < shape.cols; ++c) {
        const std::size_t i = index(l, r, c);
        if (c + 1 < shape.cols) {
          gx_[i] = harmonic(conductivity_[i], conductivity_[i + 1]) / (heat_capacity * dx * dx);
          rate[i] += gx_[i];
          rate[i + 1] += gx_[i];
        }
        if (r + 1 < shape.rows) {
          const std::size_t j = index(l, r + 1, c);
          gy_[i] = harmonic(conductivity_[i], conductivity_[j]) / (heat_capacity * dy * dy);
          rate[i] += gy_[i];
          rate[j] += gy_[i];
        }
        if (l + 1 < shape.layers) {
          const std::size_t j = index(l + 1, r, c);
          gz_[i] = harmonic(conductivity_[i], conductivity_[j]) / (heat_capacity * dz * dz);
          rate[i] += gz_[i];
          rate[j] += gz_[i];
        }
      }
    }
  }
  max_rate_ = *std::max_element(rate.begin(), rate.end());
  const double dmin = std::min({dx, dy, dz});
  const double kmax = *std::max_element(conductivity_.begin(), conductivity_.end());
  // Spec-style bound; never looser than the actual per-cell rate bound.
  stable_step_ = kmax > 0 ? dmin * dmin * heat_capacity / (6.0 * kmax) : 1.0;
  if (max_rate_ > 0) stable_step_ = std::min(stable_step_, 1.0 / max_rate_);
}

double HeatGrid::max_stable_step() const { return stable_step_; }

void HeatGrid::step(double dt, double front_energy) {
  const std::size_t rows = shape_.rows;
  const std::size_t cols = shape_.cols;
  const std::size_t plane = rows * cols;
  const std::size_t n = temperature_.size();
  std::fill(scratch_.begin(), scratch_.end(), 0.0);
  const double* t = temperature_.data();
  double* acc = scratch_.data();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % cols;
    if (c + 1 < cols && gx_[i] != 0.0) {
      const double f = gx_[i] * (t[i + 1] - t[i]);
      acc[i] += f;
      acc[i + 1] -= f;
    }
    if (gy_[i] != 0.0) {
      const double f = gy_[i] * (t[i + cols] - t[i]);
      acc[i] += f;
      acc[i + cols] -= f;
    }
    if (gz_[i] != 0.0) {
      const double f = gz_[i] * (t[i + plane] - t[i]);
      acc[i] += f;
      acc[i + plane] -= f;
    }
  }
  for (std::size_t i = 0; i < n; ++i) temperature_[i] += dt * acc[i];
  if (front_energy != 0.0) {
    const double rise = front_energy / (heat_capacity_ * dz_);
    for (std::size_t i = 0; i < plane; ++i)
      if (conductivity_[i] > 0) temperature_[i] += rise;
  }
}

Image HeatGrid::layer_image(std::size_t layer) const {
  Image img(shape_.rows, shape_.cols);
  const std::size_t plane = shape_.rows * shape_.cols;
  std::copy_n(temperature_.begin() + static_cast<std::ptrdiff_t>(layer * plane), plane, img.data());
  return img;
}

double HeatGrid::total_energy() const {
  double sum = 0.0;
  for (double v : temperature_) sum += v;
  return sum * heat_capacity_ * cell_volume_;
}

ActiveResult simulate_active(const SpecimenSpec& spec, const ActiveAcquisition& acq) {
  spec.validate();
  check_positive(acq.sampling_rate, "sampling rate");
  check_positive(acq.duration, "acquisition duration");
  check_positive(acq.flash_duration, "flash duration");
  require(std::isfinite(acq.flash_energy) && acq.flash_energy >= 0, ErrorKind::kParameter,
          "flash energy must be >= 0");
  const auto frames = static_cast<std::size_t>(std::llround(acq.duration * acq.sampling_rate));
  require(frames >= 2, ErrorKind::kParameter, "acquisition must yield at least 2 frames");

  const GridShape g = spec.grid;
  const double dx = spec.width / static_cast<double>(g.cols);
  const double dy = spec.height / static_cast<double>(g.rows);
  const double dz = spec.thickness / static_cast<double>(g.layers);

  std::vector<double> kappa(g.rows * g.cols * g.layers, spec.conductivity);
  std::vector<BinaryMask> masks;
  for (std::size_t k = 0; k < spec.defects.size(); ++k) {
    const Defect& d = spec.defects[k];
    BinaryMask m = disc_mask(g.rows, g.cols, dx, dy, d.x, d.y, d.radius);
    require(!m.empty(), ErrorKind::kParameter,
            "defect " + std::to_string(k) + " is smaller than one pixel");
    for (std::size_t l = 0; l < g.layers; ++l) {
      if ((l + 0.5) * dz <= d.depth) continue;
      for (std::size_t r = 0; r < g.rows; ++r)
        for (std::size_t c = 0; c < g.cols; ++c)
          if (m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)))
            kappa[(l * g.rows + r) * g.cols + c] = spec.conductivity * d.conductivity_multiplier;
    }
    masks.push_back(std::move(m));
  }

  BinaryMask gt(Dims{g.rows, g.cols});
  BinaryMask near(Dims{g.rows, g.cols});
  for (std::size_t k = 0; k < spec.defects.size(); ++k) {
    const Defect& d = spec.defects[k];
    gt = gt | masks[k];
    near = near | disc_mask(g.rows, g.cols, dx, dy, d.x, d.y, 2.0 * d.radius);
  }

  HeatGrid grid(g, dx, dy, dz, spec.density * spec.specific_heat, std::move(kappa));
  const double frame_dt = 1.0 / acq.sampling_rate;
  const auto substeps = static_cast<long long>(std::ceil(frame_dt / grid.max_stable_step()));
  const double dt = frame_dt / static_cast<double>(substeps);

  std::vector<Image> images;
  images.reserve(frames);
  long long step = 0;
  for (std::size_t j = 0; j < frames; ++j) {
    for (long long s = 0; s < substeps; ++s, ++step) {
      const double t0 = static_cast<double>(step) * dt;
      grid.step(dt, pulse_energy(acq.flash_energy, acq.flash_duration, t0, t0 + dt));
    }
    images.push_back(grid.layer_image(0));
  }
  return ActiveResult{ThermalSequence(std::move(images), acq.sampling_rate), std::move(masks),
                      std::move(gt), ~near};
}

std::vector<SpecimenPreset> builtin_specimens() {
  std::vector<SpecimenPreset> out;
  {
    // Aluminium 6061: kappa 167 W/(m K), rho 2700 kg/m^3, C_p 896 J/(kg K).
    // 4 flat-bottom holes, sound material 3.5-4.5 mm above the hole bottom.
    SpecimenSpec s;
    s.name = "AL";
    s.width = s.height = 0.1;
    s.thickness = 0.006;
    s.grid = {64, 64, 24};
    s.conductivity = 167;
    s.density = 2700;
    s.specific_heat = 896;
    s.defects = {{0.027, 0.027, 0.010, 0.0035},
                 {0.073, 0.027, 0.009, 0.00375},
                 {0.027, 0.073, 0.008, 0.004},
                 {0.073, 0.073, 0.010, 0.0045}};
    out.push_back({s, {1e4, 5e-3, 50, 1.0}});
  }
  {
    // PMMA: kappa 0.19 W/(m K), rho 1190 kg/m^3, C_p 1466 J/(kg K).
    // 4 mm plate, 6 holes at 1.0-3.5 mm.
    SpecimenSpec s;
    s.name = "PLEXI";
    s.width = 0.15;
    s.height = 0.1;
    s.thickness = 0.004;
    s.grid = {48, 72, 20};
    s.conductivity = 0.19;
    s.density = 1190;
    s.specific_heat = 1466;
    s.defects = {{0.025, 0.03, 0.008, 0.001},  {0.075, 0.03, 0.008, 0.0015},
                 {0.125, 0.03, 0.008, 0.002},  {0.025, 0.07, 0.010, 0.0025},
                 {0.075, 0.07, 0.010, 0.003},  {0.125, 0.07, 0.010, 0.0035}};
    out.push_back({s, {1e4, 5e-3, 2, 60.0}});
  }
  {
    // Quasi-isotropic CFRP, through-thickness values: kappa 0.8 W/(m K),
    // rho 1600 kg/m^3, C_p 1200 J/(kg K). 5 x 5 holes: depth varies by row
    // (0.2-1.0 mm), radius by column (1.5-7.5 mm).
    SpecimenSpec s;
    s.name = "CFRP";
    s.width = s.height = 0.15;
    s.thickness = 0.002;
    s.grid = {64, 64, 20};
    s.conductivity = 0.8;
    s.density = 1600;
    s.specific_heat = 1200;
    const double radii[5] = {0.0015, 0.0025, 0.0035, 0.005, 0.0075};
    const double depths[5] = {0.0002, 0.0004, 0.0006, 0.0008, 0.001};
    for (int r = 0; r < 5; ++r)
      for (int c = 0; c < 5; ++c)
        s.defects.push_back({0.015 + 0.03 * c, 0.015 + 0.03 * r, radii[c], depths[r]});
    out.push_back({s, {1e4, 5e-3, 20, 5.0}});
  }
  return out;
}

SpecimenPreset find_preset(const std::string& name) {
  std::string upper = name;
  for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper == "CFRP-LIKE") upper = "CFRP";
  for (SpecimenPreset& p : builtin_specimens())
    if (p.specimen.name == upper) return p;
  fail(ErrorKind::kParameter, "unknown specimen preset '" + name + "' (expected AL, PLEXI or CFRP)");
}

void BioheatSpec::validate() const {
  check_positive(width, "phantom width");
  check_positive(height, "phantom height");
  require(rows >= 1 && cols >= 1, ErrorKind::kParameter, "grid must be at least 1x1");
  require(std::isfinite(conductivity) && conductivity >= 0, ErrorKind::kParameter,
          "conductivity must be >= 0");
  check_positive(density, "density");
  check_positive(specific_heat, "specific heat");
  require(std::isfinite(perfusion_rate) && perfusion_rate >= 0, ErrorKind::kParameter,
          "perfusion rate must be >= 0");
  check_positive(blood_specific_heat, "blood specific heat");
  require(std::isfinite(surface_loss) && surface_loss >= 0, ErrorKind::kParameter,
          "surface loss must be >= 0");
  check_positive(layer_thickness, "layer thickness");
  require(std::isfinite(metabolic_rate) && std::isfinite(arterial_temp) && std::isfinite(ambient_temp),
          ErrorKind::kParameter, "temperatures and metabolic rate must be finite");
  require(background_variation >= 0 && background_length >= 0, ErrorKind::kParameter,
          "background variation settings must be >= 0");
  for (std::size_t i = 0; i < lesions.size(); ++i) {
    const Lesion& l = lesions[i];
    const std::string tag = "lesion " + std::to_string(i) + ": ";
    check_positive(l.radius, "lesion radius");
    require(l.x - l.radius >= 0 && l.x + l.radius <= width && l.y - l.radius >= 0 &&
                l.y + l.radius <= height,
            ErrorKind::kParameter, tag + "must lie inside the grid");
    require(l.perfusion_multiplier >= 1 && l.metabolic_multiplier >= 1, ErrorKind::kParameter,
            tag + "multipliers must be >= 1");
  }
}

PassiveResult simulate_passive(const BioheatSpec& spec, double duration, double fs) {
  spec.validate();
  check_positive(duration, "duration");
  check_positive(fs, "sampling rate");
  const auto frames = static_cast<std::size_t>(std::llround(duration * fs));
  require(frames >= 2, ErrorKind::kParameter, "acquisition must yield at least 2 frames");

  const std::size_t rows = spec.rows;
  const std::size_t cols = spec.cols;
  const std::size_t n = rows * cols;
  const double dx = spec.width / static_cast<double>(cols);
  const double dy = spec.height / static_cast<double>(rows);
  const double cap = spec.density * spec.specific_heat;
  const double loss = spec.surface_loss / spec.layer_thickness;

  Image field = Image::Zero(rows, cols);
  if (spec.background_variation > 0)
    field = smooth_field(rows, cols, spec.background_length / std::min(dx, dy), spec.seed);

  BinaryMask lesion_mask(Dims{rows, cols});
  // Per-cell linear reaction: dT/dt = ... + source - sink * T.
  std::vector<double> sink(n), source(n);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      double omega = spec.perfusion_rate *
                     std::max(0.0, 1.0 + spec.background_variation * field(r, c));
      double q = spec.metabolic_rate * std::max(0.0, 1.0 + spec.background_variation * field(r, c));
      for (const Lesion& l : spec.lesions) {
        if (inside_disc((c + 0.5) * dx, (r + 0.5) * dy, l.x, l.y, l.radius)) {
          omega *= l.perfusion_multiplier;
          q *= l.metabolic_multiplier;
          lesion_mask.set(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c), true);
        }
      }
      const std::size_t i = r * cols + c;
      sink[i] = omega * spec.blood_specific_heat + loss;
      source[i] = omega * spec.blood_specific_heat * spec.arterial_temp + q + loss * spec.ambient_temp;
    }
  }

  const double gx = spec.conductivity / (cap * dx * dx);
  const double gy = spec.conductivity / (cap * dy * dy);
  const double max_sink = *std::max_element(sink.begin(), sink.end());
  const double max_rate = 2.0 * (gx + gy) + max_sink / cap;
  const double frame_dt = 1.0 / fs;
  const auto substeps =
      max_rate > 0 ? std::max<long long>(1, static_cast<long long>(std::ceil(frame_dt * max_rate))) : 1;
  const double dt = frame_dt / static_cast<double>(substeps);

  std::vector<double> t(n, spec.arterial_temp), acc(n);
  std::vector<Image> images;
  images.reserve(frames);
  for (std::size_t j = 0; j < frames; ++j) {
    for (long long s = 0; s < substeps; ++s) {
      for (std::size_t i = 0; i < n; ++i) acc[i] = (source[i] - sink[i] * t[i]) / cap;
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
          const std::size_t i = r * cols + c;
          if (c + 1 < cols) {
            const double f = gx * (t[i + 1] - t[i]);
            acc[i] += f;
            acc[i + 1] -= f;
          }
          if (r + 1 < rows) {
            const double f = gy * (t[i + cols] - t[i]);
            acc[i] += f;
            acc[i + cols] -= f;
          }
        }
      }
      for (std::size_t i = 0; i < n; ++i) t[i] += dt * acc[i];
    }
    images.push_back(Eigen::Map<const Image>(t.data(), static_cast<Eigen::Index>(rows),
                                             static_cast<Eigen::Index>(cols)));
  }
  return PassiveResult{ThermalSequence(std::move(images), fs), !spec.lesions.empty(),
                       std::move(lesion_mask)};
}

void CohortSpec::validate() const {
  require(subjects >= 1, ErrorKind::kParameter, "cohort needs at least one subject");
  require(symptomatic <= subjects, ErrorKind::kParameter, "more symptomatic subjects than subjects");
  check_positive(duration, "duration");
  check_positive(sampling_rate, "sampling rate");
  require(lesion_radius_min > 0 && lesion_radius_max >= lesion_radius_min, ErrorKind::kParameter,
          "lesion radius range must satisfy 0 < min <= max");
  require(2.0 * lesion_radius_max < std::min(tissue.width, tissue.height), ErrorKind::kParameter,
          "lesions do not fit inside the tissue patch");
  require(perfusion_multiplier >= 1 && metabolic_multiplier >= 1, ErrorKind::kParameter,
          "lesion multipliers must be >= 1");
  require(background_variation >= 0 && noise_percent >= 0, ErrorKind::kParameter,
          "background variation and noise must be >= 0");
  tissue.validate();
}

std::vector<CohortSubject> simulate_cohort(const CohortSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::vector<CohortSubject> out;
  out.reserve(spec.subjects);
  const int width = std::max(2, static_cast<int>(std::to_string(spec.subjects).size()));
  for (std::size_t i = 0; i < spec.subjects; ++i) {
    const std::uint64_t subject_seed = derive_seed(seed, "subject/" + std::to_string(i));
    Rng rng = make_rng(derive_seed(subject_seed, "anatomy"));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    BioheatSpec tissue = spec.tissue;
    tissue.background_variation = spec.background_variation;
    tissue.seed = derive_seed(subject_seed, "background");
    tissue.lesions.clear();
    const bool lesion = i < spec.symptomatic;
    if (lesion) {
      Lesion l;
      l.radius = spec.lesion_radius_min + unit(rng) * (spec.lesion_radius_max - spec.lesion_radius_min);
      const double margin_x = l.radius + 0.1 * tissue.width;
      const double margin_y = l.radius + 0.1 * tissue.height;
      l.x = margin_x + unit(rng) * std::max(0.0, tissue.width - 2 * margin_x);
      l.y = margin_y + unit(rng) * std::max(0.0, tissue.height - 2 * margin_y);
      l.perfusion_multiplier = spec.perfusion_multiplier;
      l.metabolic_multiplier = spec.metabolic_multiplier;
      tissue.lesions.push_back(l);
    }
    PassiveResult r = simulate_passive(tissue, spec.duration, spec.sampling_rate);
    r.sequence = add_gaussian_noise(r.sequence, spec.noise_percent, derive_seed(subject_seed, "noise"));
    std::string id = std::to_string(i + 1);
    id.insert(0, static_cast<std::size_t>(std::max(0, width - static_cast<int>(id.size()))), '0');
    out.push_back({"S" + id, lesion ? 1 : 0, std::move(r)});
  }
  return out;
}

}  // namespace irf

#ifndef IRFACT_PHANTOM_HPP_
#define IRFACT_PHANTOM_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "irfact/seqio.hpp"

namespace irf {

struct GridShape {
  std::size_t rows = 64;    // N, along y
  std::size_t cols = 64;    // M, along x
  std::size_t layers = 16;  // L, along depth
};

// Flat-bottom hole drilled from the back face. `depth` is the sound material
// remaining between the front (inspected) face and the hole bottom; the hole
// extends from there to the back face.
struct Defect {
  double x = 0;       // center, m
  double y = 0;       // center, m
  double radius = 0;  // m
  double depth = 0;   // m below the front face
  double conductivity_multiplier = 0.0;  // 0 = insulating void
};

struct SpecimenSpec {
  std::string name;
  double width = 0.1;       // m, along x
  double height = 0.1;      // m, along y
  double thickness = 0.005; // m
  GridShape grid;
  double conductivity = 1;     // W/(m K)
  double density = 1000;       // kg/m^3
  double specific_heat = 1000; // J/(kg K)
  std::vector<Defect> defects;

  // Throws ErrorKind::kParameter for impossible geometry or material values.
  void validate() const;
};

struct ActiveAcquisition {
  double flash_energy = 1e4;     // J/m^2 absorbed by the front face
  double flash_duration = 5e-3;  // s
  double sampling_rate = 50;     // Hz
  double duration = 1.0;         // s
};

struct SpecimenPreset {
  SpecimenSpec specimen;
  ActiveAcquisition acquisition;
};

struct ActiveResult {
  ThermalSequence sequence;
  std::vector<BinaryMask> defect_masks;  // front-face projection per defect
  BinaryMask ground_truth;               // union of defect_masks
  BinaryMask sound_region;               // pixels farther than 2 radii from every defect
};

// Pulsed (flash) thermography of a plate with flat-bottom holes. The front
// face temperature rise above the initial uniform state is sampled at
// t_j = (j + 1) / fs.
ActiveResult simulate_active(const SpecimenSpec& spec, const ActiveAcquisition& acq);

// AL, PLEXI and CFRP-like plates with their default acquisitions.
std::vector<SpecimenPreset> builtin_specimens();
// Case-insensitive lookup; throws ErrorKind::kParameter when unknown.
SpecimenPreset find_preset(const std::string& name);

// Explicit finite-volume solver for the 3-D heat equation on a regular grid
// with zero-flux walls. The front face (layer 0) can receive a surface
// energy input. Face conductances use the harmonic mean of the adjacent cell
// conductivities, so zero-conductivity cells are thermally isolated.
class HeatGrid {
 public:
  HeatGrid(GridShape shape, double dx, double dy, double dz, double heat_capacity,
           std::vector<double> conductivity);

  // min(dx, dy, dz)^2 * rho C_p / (6 kappa_max).
  double max_stable_step() const;

  // One explicit Euler step; `front_energy` (J/m^2) is deposited uniformly
  // into the conducting front-layer cells during the step.
  void step(double dt, double front_energy = 0.0);

  std::vector<double>& temperature() { return temperature_; }
  const std::vector<double>& temperature() const { return temperature_; }
  std::size_t index(std::size_t layer, std::size_t row, std::size_t col) const {
    return (layer * shape_.rows + row) * shape_.cols + col;
  }
  Image layer_image(std::size_t layer) const;
  // Sum of rho C_p T V over all cells, J (relative to T = 0).
  double total_energy() const;
  GridShape shape() const { return shape_; }

 private:
  GridShape shape_;
  double dz_;
  double heat_capacity_;
  double cell_volume_;
  std::vector<double> conductivity_;
  // Per-cell rate coefficients kappa_face / (rho C_p d^2) toward the +x, +y
  // and +z neighbours (0 at walls and voids).
  std::vector<double> gx_, gy_, gz_;
  std::vector<double> temperature_;
  std::vector<double> scratch_;
  double max_rate_ = 0.0;
  double stable_step_ = 1.0;
};

struct Lesion {
  double x = 0;       // m
  double y = 0;       // m
  double radius = 0;  // m
  double perfusion_multiplier = 1.0;
  double metabolic_multiplier = 1.0;
};

// 2-D Pennes bioheat phantom. Defaults describe breast-like tissue.
struct BioheatSpec {
  double width = 0.12;   // m
  double height = 0.12;  // m
  std::size_t rows = 64;
  std::size_t cols = 64;
  double conductivity = 0.42;        // W/(m K)
  double density = 1000;             // kg/m^3
  double specific_heat = 3500;       // J/(kg K)
  double perfusion_rate = 0.2;       // omega_b, kg/(m^3 s)
  double blood_specific_heat = 3770; // C_b, J/(kg K)
  double arterial_temp = 310.15;     // T_a, K
  double metabolic_rate = 450;       // q, W/m^3
  double surface_loss = 0.0;         // h, W/(m^2 K)
  double ambient_temp = 293.15;      // T_env, K
  double layer_thickness = 0.02;     // m; converts h to a volumetric loss
  std::vector<Lesion> lesions;
  // Relative amplitude of a smooth random field modulating perfusion and
  // metabolic rate (0 = homogeneous).
  double background_variation = 0.0;
  double background_length = 0.004;  // m, correlation length of that field
  std::uint64_t seed = 0;

  void validate() const;
};

struct PassiveResult {
  ThermalSequence sequence;
  bool symptomatic = false;
  BinaryMask lesion_mask;
};

// Integrates rho C_p dT/dt = div(kappa grad T) + omega_b C_b (T_a - T) + q
//                            - (h / thickness) (T - T_env)
// from T(0) = T_a with zero-flux edges, sampling at t_j = (j + 1) / fs.
PassiveResult simulate_passive(const BioheatSpec& spec, double duration, double fs);

// Screening-style cohort: the first `symptomatic` subjects carry one lesion at
// a random position and radius; every subject gets its own background field
// and sensor noise.
struct CohortSpec {
  std::size_t subjects = 20;
  std::size_t symptomatic = 10;
  BioheatSpec tissue;
  double duration = 23 * 60.0;       // s
  double sampling_rate = 1.0 / 60;   // Hz, 23 frames by default
  double lesion_radius_min = 0.006;  // m
  double lesion_radius_max = 0.012;  // m
  double perfusion_multiplier = 4.0;
  double metabolic_multiplier = 20.0;
  double background_variation = 0.3;
  double noise_percent = 0.01;       // of the sequence dynamic range

  void validate() const;
};

struct CohortSubject {
  std::string id;
  int label = 0;  // 1 = lesion present
  PassiveResult result;
};

std::vector<CohortSubject> simulate_cohort(const CohortSpec& spec, std::uint64_t seed);

}  // namespace irf

#endif  // IRFACT_PHANTOM_HPP_

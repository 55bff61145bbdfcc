#include <cstdio>
#include <sstream>

#include "commands.hpp"
#include "common.hpp"

namespace cli {

namespace {

std::string two_digits(std::size_t i) {
  std::string s = std::to_string(i);
  return s.size() < 2 ? "0" + s : s;
}

irf_defect parse_defect(const Config& c, const Entry& e) {
  std::vector<double> v;
  std::istringstream in(e.value);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CliError(kExitUsage, "line " + std::to_string(e.line) +
                                     ": [specimen] defect: expected 'x, y, radius, depth[, multiplier]'");
    }
  }
  if (v.size() != 4 && v.size() != 5)
    throw CliError(kExitUsage, "line " + std::to_string(e.line) +
                                   ": [specimen] defect needs 4 or 5 numbers (x, y, radius, depth[, multiplier])");
  (void)c;
  return irf_defect{v[0], v[1], v[2], v[3], v.size() == 5 ? v[4] : 0.0};
}

void simulate_active(const Context& ctx) {
  const Config& c = ctx.config;
  const std::string preset = c.get_string("simulate", "preset", "AL");
  irf_specimen spec{};
  irf_acquisition acq{};
  check(irf_preset_get(preset.c_str(), &spec, &acq), "preset '" + preset + "'");
  const std::string name = c.get_string("specimen", "name", spec.name);
  spec.name = name.c_str();
  spec.width = c.get_double("specimen", "width", spec.width);
  spec.height = c.get_double("specimen", "height", spec.height);
  spec.thickness = c.get_double("specimen", "thickness", spec.thickness);
  spec.rows = static_cast<std::size_t>(c.get_u64("specimen", "rows", spec.rows));
  spec.cols = static_cast<std::size_t>(c.get_u64("specimen", "cols", spec.cols));
  spec.layers = static_cast<std::size_t>(c.get_u64("specimen", "layers", spec.layers));
  spec.conductivity = c.get_double("specimen", "conductivity", spec.conductivity);
  spec.density = c.get_double("specimen", "density", spec.density);
  spec.specific_heat = c.get_double("specimen", "specific_heat", spec.specific_heat);
  std::vector<irf_defect> defects(spec.defects, spec.defects + spec.defect_count);
  if (c.has("specimen", "defect")) {
    defects.clear();
    for (const Entry& e : c.all("specimen", "defect")) defects.push_back(parse_defect(c, e));
  }
  spec.defects = defects.data();
  spec.defect_count = defects.size();
  acq.flash_energy = c.get_double("acquisition", "flash_energy", acq.flash_energy);
  acq.flash_duration = c.get_double("acquisition", "flash_duration", acq.flash_duration);
  acq.sampling_rate = c.get_double("acquisition", "sampling_rate", acq.sampling_rate);
  acq.duration = c.get_double("acquisition", "duration", acq.duration);
  const double noise = c.get_double("simulate", "noise", 0.0);
  if (noise < 0) c.fail("simulate", "noise", "noise must be >= 0");

  irf_active* raw = nullptr;
  check(irf_simulate_active(&spec, &acq, &raw), "simulate");
  ActivePtr result(raw);
  Outputs out(ctx.output);

  const irf_sequence* seq = irf_active_sequence(result.get());
  SequencePtr noisy;
  if (noise > 0) {
    irf_sequence* n = nullptr;
    check(irf_sequence_add_noise(seq, noise, irf_derive_seed(ctx.seed, "simulate/noise"), &n),
          "adding noise");
    noisy.reset(n);
    seq = noisy.get();
  }
  check(irf_sequence_save(seq, out.path("sequence.thrm").string().c_str()), "writing sequence");
  check(irf_mask_save(irf_active_ground_truth(result.get()), out.path("ground_truth.pgm").string().c_str()),
        "writing ground truth");
  check(irf_mask_save(irf_active_sound_region(result.get()), out.path("sound_region.pgm").string().c_str()),
        "writing sound region");

  std::string csv = csv_row({"defect", "x_m", "y_m", "radius_m", "depth_m", "conductivity_multiplier", "mask"});
  nlohmann::json jdefects = nlohmann::json::array();
  for (std::size_t i = 0; i < irf_active_defect_count(result.get()); ++i) {
    const std::string file = "defect_" + two_digits(i + 1) + ".pgm";
    check(irf_mask_save(irf_active_defect_mask(result.get(), i), out.path(file).string().c_str()),
          "writing defect mask");
    const irf_defect& d = defects[i];
    csv += csv_row({std::to_string(i + 1), fmt(d.x), fmt(d.y), fmt(d.radius), fmt(d.depth),
                    fmt(d.conductivity_multiplier), file});
    jdefects.push_back({{"x", d.x}, {"y", d.y}, {"radius", d.radius}, {"depth", d.depth},
                        {"conductivity_multiplier", d.conductivity_multiplier}, {"mask", file}});
  }
  write_text_atomic(out.path("defects.csv"), csv);

  std::size_t rows = 0, cols = 0, frames = 0;
  double fs = 0;
  check(irf_sequence_shape(seq, &rows, &cols, &frames, &fs), "sequence shape");
  nlohmann::json m = ctx.header();
  m["mode"] = "active";
  m["specimen"] = {{"name", name},
                   {"width", spec.width},
                   {"height", spec.height},
                   {"thickness", spec.thickness},
                   {"grid", {spec.rows, spec.cols, spec.layers}},
                   {"conductivity", spec.conductivity},
                   {"density", spec.density},
                   {"specific_heat", spec.specific_heat},
                   {"defects", jdefects}};
  m["acquisition"] = {{"flash_energy", acq.flash_energy},
                      {"flash_duration", acq.flash_duration},
                      {"sampling_rate", acq.sampling_rate},
                      {"duration", acq.duration},
                      {"noise", noise}};
  m["sequence"] = {{"rows", rows}, {"cols", cols}, {"frames", frames}, {"sampling_rate", fs}};
  m["outputs"] = out.hashes();
  write_json(ctx.output / "manifest.json", m);
  std::printf("simulated %s: %zux%zu pixels, %zu frames, %zu defects -> %s\n", name.c_str(), rows, cols,
              frames, defects.size(), ctx.output.string().c_str());
}

void simulate_passive(const Context& ctx) {
  const Config& c = ctx.config;
  irf_cohort_spec spec;
  irf_cohort_spec_default(&spec);
  spec.subjects = static_cast<std::size_t>(c.get_u64("cohort", "subjects", spec.subjects));
  spec.symptomatic = static_cast<std::size_t>(c.get_u64("cohort", "symptomatic", spec.subjects / 2));
  spec.duration = c.get_double("cohort", "duration", spec.duration);
  spec.sampling_rate = c.get_double("cohort", "sampling_rate", spec.sampling_rate);
  spec.lesion_radius_min = c.get_double("cohort", "lesion_radius_min", spec.lesion_radius_min);
  spec.lesion_radius_max = c.get_double("cohort", "lesion_radius_max", spec.lesion_radius_max);
  spec.perfusion_multiplier = c.get_double("cohort", "perfusion_multiplier", spec.perfusion_multiplier);
  spec.metabolic_multiplier = c.get_double("cohort", "metabolic_multiplier", spec.metabolic_multiplier);
  spec.background_variation = c.get_double("cohort", "background_variation", spec.background_variation);
  spec.noise_percent = c.get_double("cohort", "noise_percent", spec.noise_percent);
  irf_tissue& t = spec.tissue;
  t.background_length = c.get_double("cohort", "background_length", t.background_length);
  t.rows = static_cast<std::size_t>(c.get_u64("cohort", "rows", t.rows));
  t.cols = static_cast<std::size_t>(c.get_u64("cohort", "cols", t.cols));
  t.width = c.get_double("cohort", "width", t.width);
  t.height = c.get_double("cohort", "height", t.height);
  t.perfusion_rate = c.get_double("cohort", "perfusion_rate", t.perfusion_rate);
  t.metabolic_rate = c.get_double("cohort", "metabolic_rate", t.metabolic_rate);
  t.conductivity = c.get_double("cohort", "conductivity", t.conductivity);

  irf_cohort* raw = nullptr;
  check(irf_simulate_cohort(&spec, irf_derive_seed(ctx.seed, "simulate/cohort"), &raw), "simulate");
  CohortPtr cohort(raw);
  Outputs out(ctx.output);
  std::string csv = csv_row({"subject_id", "sequence", "lesion_mask", "label"});
  for (std::size_t i = 0; i < irf_cohort_size(cohort.get()); ++i) {
    const std::string id = irf_cohort_id(cohort.get(), i);
    const std::string seq_file = "subjects/" + id + ".thrm";
    const std::string mask_file = "subjects/" + id + "_lesion.pgm";
    check(irf_sequence_save(irf_cohort_sequence(cohort.get(), i), out.path(seq_file).string().c_str()),
          "writing " + seq_file);
    check(irf_mask_save(irf_cohort_lesion_mask(cohort.get(), i), out.path(mask_file).string().c_str()),
          "writing " + mask_file);
    csv += csv_row({id, seq_file, mask_file, std::to_string(irf_cohort_label(cohort.get(), i))});
  }
  write_text_atomic(out.path("cohort.csv"), csv);

  nlohmann::json m = ctx.header();
  m["mode"] = "passive";
  m["cohort"] = {{"subjects", spec.subjects},
                 {"symptomatic", spec.symptomatic},
                 {"duration", spec.duration},
                 {"sampling_rate", spec.sampling_rate},
                 {"lesion_radius", {spec.lesion_radius_min, spec.lesion_radius_max}},
                 {"perfusion_multiplier", spec.perfusion_multiplier},
                 {"metabolic_multiplier", spec.metabolic_multiplier},
                 {"background_variation", spec.background_variation},
                 {"background_length", t.background_length},
                 {"noise_percent", spec.noise_percent},
                 {"grid", {t.rows, t.cols}},
                 {"size", {t.width, t.height}},
                 {"perfusion_rate", t.perfusion_rate},
                 {"metabolic_rate", t.metabolic_rate},
                 {"conductivity", t.conductivity}};
  m["outputs"] = out.hashes();
  write_json(ctx.output / "manifest.json", m);
  std::printf("simulated cohort of %zu subjects (%zu with lesions) -> %s\n", spec.subjects,
              spec.symptomatic, ctx.output.string().c_str());
}

}  // namespace

void cmd_simulate(const Context& ctx) {
  const std::string mode = ctx.config.get_string("simulate", "mode", "active");
  if (mode == "active") simulate_active(ctx);
  else if (mode == "passive") simulate_passive(ctx);
  else ctx.config.fail("simulate", "mode", "expected 'active' or 'passive'");
}

}  // namespace cli

#include "irfact/irfact.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <limits>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "irfact/error.hpp"
#include "irfact/eval.hpp"
#include "irfact/factor.hpp"
#include "irfact/phantom.hpp"
#include "irfact/random.hpp"
#include "irfact/seqio.hpp"
#include "irfact/texture.hpp"

struct irf_sequence {
  irf::ThermalSequence value;
};

struct irf_mask {
  irf::BinaryMask value;
};

struct irf_active {
  irf_sequence sequence;
  std::vector<irf_mask> defects;
  irf_mask ground_truth;
  irf_mask sound_region;
};

struct irf_cohort {
  struct Subject {
    std::string id;
    int label;
    irf_sequence sequence;
    irf_mask lesion;
  };
  std::vector<Subject> subjects;
};

struct irf_model {
  irf::FactorModel value;
  irf::DataMatrix data;  // the matrix the model was fit on
  std::string method;
};

struct irf_sweep {
  irf::SweepResult value;
};

struct irf_logistic {
  irf::LogisticModel value;
};

namespace {

thread_local std::string g_last_error;

irf_status status_of(irf::ErrorKind kind) {
  switch (kind) {
    case irf::ErrorKind::kParameter: return IRF_E_PARAMETER;
    case irf::ErrorKind::kDimension: return IRF_E_DIMENSION;
    case irf::ErrorKind::kFormat: return IRF_E_FORMAT;
    case irf::ErrorKind::kDomain: return IRF_E_DOMAIN;
    case irf::ErrorKind::kDegenerate: return IRF_E_DEGENERATE;
    case irf::ErrorKind::kIo: return IRF_E_IO;
  }
  return IRF_E_INTERNAL;
}

template <typename F>
irf_status guard(F&& body) {
  try {
    body();
    return IRF_OK;
  } catch (const irf::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return IRF_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return IRF_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return IRF_E_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) irf::fail(irf::ErrorKind::kParameter, std::string(what) + " must not be NULL");
}

void need_capacity(std::size_t needed, std::size_t capacity) {
  if (capacity < needed)
    irf::fail(irf::ErrorKind::kParameter, "output buffer holds " + std::to_string(capacity) +
                                              " values, " + std::to_string(needed) + " required");
}

irf::Image image_from(const double* data, std::size_t rows, std::size_t cols) {
  need(data, "image");
  irf::require(rows > 0 && cols > 0, irf::ErrorKind::kParameter, "image must be non-empty");
  return Eigen::Map<const irf::Image>(data, static_cast<Eigen::Index>(rows),
                                      static_cast<Eigen::Index>(cols));
}

void copy_image(const irf::Image& image, double* out, std::size_t capacity) {
  need(out, "output");
  need_capacity(static_cast<std::size_t>(image.size()), capacity);
  std::memcpy(out, image.data(), sizeof(double) * static_cast<std::size_t>(image.size()));
}

irf::SolverOptions options_from(const irf_factor_request& r) {
  irf::SolverOptions o;
  o.max_iter = r.max_iter;
  o.rel_tol = r.rel_tol;
  o.init = r.init == IRF_INIT_KMEANS ? irf::Init::kKMeans : irf::Init::kRandomUniform;
  o.seed = r.seed;
  o.epsilon_guard = r.epsilon_guard;
  return o;
}

irf::FactorRequest request_from(const irf_factor_request* r) {
  need(r, "request");
  need(r->method, "method");
  const auto m = irf::parse_method(r->method);
  if (!m)
    irf::fail(irf::ErrorKind::kParameter,
              "unknown method '" + std::string(r->method) + "'; valid methods: " + irf::method_names());
  irf::require(r->init == IRF_INIT_RANDOM_UNIFORM || r->init == IRF_INIT_KMEANS,
               irf::ErrorKind::kParameter, "unknown initialization");
  irf::FactorRequest req;
  req.method = *m;
  req.rank = r->rank;
  req.lambda = r->lambda;
  req.options = options_from(*r);
  return req;
}

const std::vector<irf::SpecimenPreset>& presets() {
  static const std::vector<irf::SpecimenPreset> p = irf::builtin_specimens();
  return p;
}

// Preset defect arrays exposed through irf_preset_get.
const std::vector<std::vector<irf_defect>>& preset_defects() {
  static const std::vector<std::vector<irf_defect>> d = [] {
    std::vector<std::vector<irf_defect>> out;
    for (const auto& p : presets()) {
      std::vector<irf_defect> v;
      for (const auto& x : p.specimen.defects)
        v.push_back({x.x, x.y, x.radius, x.depth, x.conductivity_multiplier});
      out.push_back(std::move(v));
    }
    return out;
  }();
  return d;
}

irf::Matrix row_major_matrix(const double* data, std::size_t n, std::size_t p) {
  need(data, "features");
  using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMat>(data, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
}

std::vector<int> labels_from(const int* labels, std::size_t n) {
  need(labels, "labels");
  return std::vector<int>(labels, labels + n);
}

}  // namespace

extern "C" {

const char* irf_last_error(void) { return g_last_error.c_str(); }

const char* irf_status_name(irf_status s) {
  switch (s) {
    case IRF_OK: return "ok";
    case IRF_E_PARAMETER: return "parameter error";
    case IRF_E_DIMENSION: return "dimension error";
    case IRF_E_FORMAT: return "format error";
    case IRF_E_DOMAIN: return "domain error";
    case IRF_E_DEGENERATE: return "degenerate input";
    case IRF_E_IO: return "I/O error";
    case IRF_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* irf_version(void) { return IRFACT_VERSION; }

uint64_t irf_derive_seed(uint64_t seed, const char* stage) {
  return irf::derive_seed(seed, stage ? stage : "");
}

irf_status irf_sequence_create(const double* data, size_t rows, size_t cols, size_t frames,
                               double sampling_rate, irf_sequence** out) {
  return guard([&] {
    need(data, "data");
    need(out, "out");
    irf::require(rows > 0 && cols > 0, irf::ErrorKind::kParameter, "frames must be non-empty");
    std::vector<irf::Image> images;
    images.reserve(frames);
    for (std::size_t j = 0; j < frames; ++j) images.push_back(image_from(data + j * rows * cols, rows, cols));
    std::optional<double> fs;
    if (sampling_rate > 0) fs = sampling_rate;
    *out = new irf_sequence{irf::ThermalSequence(std::move(images), fs)};
  });
}

irf_status irf_sequence_load(const char* path, irf_sequence** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new irf_sequence{irf::load_sequence(path)};
  });
}

irf_status irf_sequence_save(const irf_sequence* seq, const char* path) {
  return guard([&] {
    need(seq, "sequence");
    need(path, "path");
    irf::save_sequence(seq->value, path);
  });
}

void irf_sequence_free(irf_sequence* seq) { delete seq; }

irf_status irf_sequence_shape(const irf_sequence* seq, size_t* rows, size_t* cols, size_t* frames,
                              double* sampling_rate) {
  return guard([&] {
    need(seq, "sequence");
    const irf::Dims d = seq->value.dims();
    if (rows) *rows = d.rows;
    if (cols) *cols = d.cols;
    if (frames) *frames = seq->value.frame_count();
    if (sampling_rate) *sampling_rate = seq->value.sampling_rate().value_or(0.0);
  });
}

irf_status irf_sequence_frame(const irf_sequence* seq, size_t index, double* out, size_t capacity) {
  return guard([&] {
    need(seq, "sequence");
    irf::require(index < seq->value.frame_count(), irf::ErrorKind::kParameter, "frame index out of range");
    copy_image(seq->value.frame(index), out, capacity);
  });
}

irf_status irf_sequence_add_noise(const irf_sequence* seq, double percent, uint64_t seed,
                                  irf_sequence** out) {
  return guard([&] {
    need(seq, "sequence");
    need(out, "out");
    *out = new irf_sequence{irf::add_gaussian_noise(seq->value, percent, seed)};
  });
}

irf_status irf_mask_create(size_t rows, size_t cols, irf_mask** out) {
  return guard([&] {
    need(out, "out");
    irf::require(rows > 0 && cols > 0, irf::ErrorKind::kParameter, "mask must be non-empty");
    *out = new irf_mask{irf::BinaryMask(irf::Dims{rows, cols})};
  });
}

irf_status irf_mask_load(const char* path, irf_mask** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new irf_mask{irf::load_mask_pgm(path)};
  });
}

irf_status irf_mask_save(const irf_mask* mask, const char* path) {
  return guard([&] {
    need(mask, "mask");
    need(path, "path");
    irf::save_mask_pgm(mask->value, path);
  });
}

irf_status irf_mask_copy(const irf_mask* mask, irf_mask** out) {
  return guard([&] {
    need(mask, "mask");
    need(out, "out");
    *out = new irf_mask{mask->value};
  });
}

void irf_mask_free(irf_mask* mask) { delete mask; }

irf_status irf_mask_shape(const irf_mask* mask, size_t* rows, size_t* cols) {
  return guard([&] {
    need(mask, "mask");
    if (rows) *rows = mask->value.dims().rows;
    if (cols) *cols = mask->value.dims().cols;
  });
}

irf_status irf_mask_get(const irf_mask* mask, size_t row, size_t col, int* value) {
  return guard([&] {
    need(mask, "mask");
    need(value, "value");
    const irf::Dims d = mask->value.dims();
    irf::require(row < d.rows && col < d.cols, irf::ErrorKind::kParameter, "mask index out of range");
    *value = mask->value(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) ? 1 : 0;
  });
}

irf_status irf_mask_set(irf_mask* mask, size_t row, size_t col, int value) {
  return guard([&] {
    need(mask, "mask");
    const irf::Dims d = mask->value.dims();
    irf::require(row < d.rows && col < d.cols, irf::ErrorKind::kParameter, "mask index out of range");
    mask->value.set(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col), value != 0);
  });
}

irf_status irf_mask_count(const irf_mask* mask, size_t* count) {
  return guard([&] {
    need(mask, "mask");
    need(count, "count");
    *count = mask->value.count();
  });
}

irf_status irf_mask_union(irf_mask* target, const irf_mask* other) {
  return guard([&] {
    need(target, "target");
    need(other, "other");
    irf::require(target->value.dims() == other->value.dims(), irf::ErrorKind::kDimension,
                 "mask shapes differ");
    target->value = target->value | other->value;
  });
}

irf_status irf_mask_intersect(irf_mask* target, const irf_mask* other) {
  return guard([&] {
    need(target, "target");
    need(other, "other");
    irf::require(target->value.dims() == other->value.dims(), irf::ErrorKind::kDimension,
                 "mask shapes differ");
    target->value = target->value & other->value;
  });
}

irf_status irf_mask_invert(irf_mask* target) {
  return guard([&] {
    need(target, "target");
    target->value = ~target->value;
  });
}

irf_status irf_image_save_pgm16(const double* image, size_t rows, size_t cols, const char* path) {
  return guard([&] {
    need(path, "path");
    irf::save_image_pgm16(image_from(image, rows, cols), path);
  });
}

irf_status irf_image_load_pgm(const char* path, size_t* rows, size_t* cols, double* out,
                              size_t capacity) {
  return guard([&] {
    need(path, "path");
    const irf::Image im = irf::load_image_pgm(path);
    if (rows) *rows = static_cast<std::size_t>(im.rows());
    if (cols) *cols = static_cast<std::size_t>(im.cols());
    if (out != nullptr) copy_image(im, out, capacity);
  });
}

irf_status irf_matrix_save(const double* data, size_t rows, size_t cols, const char* path) {
  return guard([&] {
    need(path, "path");
    irf::save_matrix_blob(image_from(data, rows, cols), path);
  });
}

irf_status irf_matrix_load(const char* path, size_t* rows, size_t* cols, double* out,
                           size_t capacity) {
  return guard([&] {
    need(path, "path");
    const irf::Image m(irf::load_matrix_blob(path));
    if (rows) *rows = static_cast<std::size_t>(m.rows());
    if (cols) *cols = static_cast<std::size_t>(m.cols());
    if (out != nullptr) copy_image(m, out, capacity);
  });
}

size_t irf_preset_count(void) { return presets().size(); }

const char* irf_preset_name(size_t index) {
  return index < presets().size() ? presets()[index].specimen.name.c_str() : nullptr;
}

irf_status irf_preset_get(const char* name, irf_specimen* specimen, irf_acquisition* acquisition) {
  return guard([&] {
    need(name, "name");
    const irf::SpecimenPreset found = irf::find_preset(name);
    for (std::size_t i = 0; i < presets().size(); ++i) {
      const irf::SpecimenPreset& p = presets()[i];
      if (p.specimen.name != found.specimen.name) continue;
      const irf::SpecimenSpec& s = p.specimen;
      if (specimen) {
        *specimen = irf_specimen{s.name.c_str(), s.width, s.height, s.thickness,
                                 s.grid.rows, s.grid.cols, s.grid.layers,
                                 s.conductivity, s.density, s.specific_heat,
                                 preset_defects()[i].data(), preset_defects()[i].size()};
      }
      if (acquisition) {
        *acquisition = irf_acquisition{p.acquisition.flash_energy, p.acquisition.flash_duration,
                                       p.acquisition.sampling_rate, p.acquisition.duration};
      }
      return;
    }
  });
}

irf_status irf_simulate_active(const irf_specimen* specimen, const irf_acquisition* acq,
                               irf_active** out) {
  return guard([&] {
    need(specimen, "specimen");
    need(acq, "acquisition");
    need(out, "out");
    irf::SpecimenSpec s;
    s.name = specimen->name ? specimen->name : "";
    s.width = specimen->width;
    s.height = specimen->height;
    s.thickness = specimen->thickness;
    s.grid = {specimen->rows, specimen->cols, specimen->layers};
    s.conductivity = specimen->conductivity;
    s.density = specimen->density;
    s.specific_heat = specimen->specific_heat;
    if (specimen->defect_count > 0) need(specimen->defects, "defects");
    for (std::size_t i = 0; i < specimen->defect_count; ++i) {
      const irf_defect& d = specimen->defects[i];
      s.defects.push_back({d.x, d.y, d.radius, d.depth, d.conductivity_multiplier});
    }
    const irf::ActiveAcquisition a{acq->flash_energy, acq->flash_duration, acq->sampling_rate,
                                   acq->duration};
    irf::ActiveResult r = irf::simulate_active(s, a);
    std::vector<irf_mask> defects;
    for (auto& m : r.defect_masks) defects.push_back(irf_mask{std::move(m)});
    *out = new irf_active{irf_sequence{std::move(r.sequence)}, std::move(defects),
                          irf_mask{std::move(r.ground_truth)}, irf_mask{std::move(r.sound_region)}};
  });
}

void irf_active_free(irf_active* result) { delete result; }

const irf_sequence* irf_active_sequence(const irf_active* result) {
  return result ? &result->sequence : nullptr;
}

size_t irf_active_defect_count(const irf_active* result) { return result ? result->defects.size() : 0; }

const irf_mask* irf_active_defect_mask(const irf_active* result, size_t index) {
  return result && index < result->defects.size() ? &result->defects[index] : nullptr;
}

const irf_mask* irf_active_ground_truth(const irf_active* result) {
  return result ? &result->ground_truth : nullptr;
}

const irf_mask* irf_active_sound_region(const irf_active* result) {
  return result ? &result->sound_region : nullptr;
}

void irf_cohort_spec_default(irf_cohort_spec* spec) {
  if (spec == nullptr) return;
  const irf::CohortSpec d;
  const irf::BioheatSpec& t = d.tissue;
  *spec = irf_cohort_spec{d.subjects,
                          d.symptomatic,
                          irf_tissue{t.width, t.height, t.rows, t.cols, t.conductivity, t.density,
                                     t.specific_heat, t.perfusion_rate, t.blood_specific_heat,
                                     t.arterial_temp, t.metabolic_rate, t.surface_loss,
                                     t.ambient_temp, t.layer_thickness, t.background_length},
                          d.duration,
                          d.sampling_rate,
                          d.lesion_radius_min,
                          d.lesion_radius_max,
                          d.perfusion_multiplier,
                          d.metabolic_multiplier,
                          d.background_variation,
                          d.noise_percent};
}

irf_status irf_simulate_cohort(const irf_cohort_spec* spec, uint64_t seed, irf_cohort** out) {
  return guard([&] {
    need(spec, "spec");
    need(out, "out");
    irf::CohortSpec c;
    c.subjects = spec->subjects;
    c.symptomatic = spec->symptomatic;
    const irf_tissue& t = spec->tissue;
    c.tissue.width = t.width;
    c.tissue.height = t.height;
    c.tissue.rows = t.rows;
    c.tissue.cols = t.cols;
    c.tissue.conductivity = t.conductivity;
    c.tissue.density = t.density;
    c.tissue.specific_heat = t.specific_heat;
    c.tissue.perfusion_rate = t.perfusion_rate;
    c.tissue.blood_specific_heat = t.blood_specific_heat;
    c.tissue.arterial_temp = t.arterial_temp;
    c.tissue.metabolic_rate = t.metabolic_rate;
    c.tissue.surface_loss = t.surface_loss;
    c.tissue.ambient_temp = t.ambient_temp;
    c.tissue.layer_thickness = t.layer_thickness;
    c.tissue.background_length = t.background_length;
    c.duration = spec->duration;
    c.sampling_rate = spec->sampling_rate;
    c.lesion_radius_min = spec->lesion_radius_min;
    c.lesion_radius_max = spec->lesion_radius_max;
    c.perfusion_multiplier = spec->perfusion_multiplier;
    c.metabolic_multiplier = spec->metabolic_multiplier;
    c.background_variation = spec->background_variation;
    c.noise_percent = spec->noise_percent;
    auto subjects = irf::simulate_cohort(c, seed);
    auto* cohort = new irf_cohort;
    for (auto& s : subjects)
      cohort->subjects.push_back({s.id, s.label, irf_sequence{std::move(s.result.sequence)},
                                  irf_mask{std::move(s.result.lesion_mask)}});
    *out = cohort;
  });
}

void irf_cohort_free(irf_cohort* cohort) { delete cohort; }

size_t irf_cohort_size(const irf_cohort* cohort) { return cohort ? cohort->subjects.size() : 0; }

const char* irf_cohort_id(const irf_cohort* cohort, size_t index) {
  return cohort && index < cohort->subjects.size() ? cohort->subjects[index].id.c_str() : nullptr;
}

int irf_cohort_label(const irf_cohort* cohort, size_t index) {
  return cohort && index < cohort->subjects.size() ? cohort->subjects[index].label : -1;
}

const irf_sequence* irf_cohort_sequence(const irf_cohort* cohort, size_t index) {
  return cohort && index < cohort->subjects.size() ? &cohort->subjects[index].sequence : nullptr;
}

const irf_mask* irf_cohort_lesion_mask(const irf_cohort* cohort, size_t index) {
  return cohort && index < cohort->subjects.size() ? &cohort->subjects[index].lesion : nullptr;
}

void irf_factor_request_default(irf_factor_request* request) {
  if (request == nullptr) return;
  const irf::SolverOptions o;
  *request = irf_factor_request{"pct", 7, 0.0, o.max_iter, o.rel_tol,
                                IRF_INIT_RANDOM_UNIFORM, o.seed, o.epsilon_guard, 1};
}

const char* irf_method_names(void) {
  static const std::string names = irf::method_names();
  return names.c_str();
}

int irf_method_is_valid(const char* name) {
  return name != nullptr && irf::parse_method(name).has_value() ? 1 : 0;
}

irf_status irf_factorize(const irf_sequence* seq, const irf_factor_request* request, irf_model** out) {
  return guard([&] {
    need(seq, "sequence");
    need(out, "out");
    const irf::FactorRequest req = request_from(request);
    irf::DataMatrix x = irf::vectorize(seq->value);
    if (request->shift_nonnegative && irf::requires_nonnegative(req.method))
      x = irf::shift_to_nonnegative(x);
    irf::FactorModel m = irf::factorize(x, req);
    std::string name(irf::method_name(m.method));
    *out = new irf_model{std::move(m), std::move(x), std::move(name)};
  });
}

void irf_model_free(irf_model* model) { delete model; }

irf_status irf_model_get_info(const irf_model* model, irf_model_info* info) {
  return guard([&] {
    need(model, "model");
    need(info, "info");
    const irf::FactorModel& m = model->value;
    *info = irf_model_info{model->method.c_str(),
                           m.rank,
                           m.iterations_run,
                           m.degenerate ? 1 : 0,
                           m.lambda.has_value() ? 1 : 0,
                           m.lambda.value_or(0.0),
                           m.mixing.has_value() ? 1 : 0,
                           m.seed,
                           static_cast<std::size_t>(m.basis.rows()),
                           static_cast<std::size_t>(m.coefficients.cols()),
                           m.dims.rows,
                           m.dims.cols,
                           m.objective_history.size()};
  });
}

irf_status irf_model_history(const irf_model* model, double* out, size_t capacity) {
  return guard([&] {
    need(model, "model");
    const auto& h = model->value.objective_history;
    if (h.empty()) return;
    need(out, "output");
    need_capacity(h.size(), capacity);
    std::copy(h.begin(), h.end(), out);
  });
}

namespace {

const irf::Matrix& factor_of(const irf_model* model, char which) {
  need(model, "model");
  switch (which) {
    case 'B': return model->value.basis;
    case 'A': return model->value.coefficients;
    case 'W':
      if (!model->value.mixing) irf::fail(irf::ErrorKind::kParameter, "model has no mixing matrix");
      return *model->value.mixing;
    default: irf::fail(irf::ErrorKind::kParameter, "factor must be 'B', 'A' or 'W'");
  }
}

}  // namespace

irf_status irf_model_factor_shape(const irf_model* model, char which, size_t* rows, size_t* cols) {
  return guard([&] {
    const irf::Matrix& f = factor_of(model, which);
    if (rows) *rows = static_cast<std::size_t>(f.rows());
    if (cols) *cols = static_cast<std::size_t>(f.cols());
  });
}

irf_status irf_model_factor(const irf_model* model, char which, double* out, size_t capacity) {
  return guard([&] {
    const irf::Matrix& f = factor_of(model, which);
    copy_image(irf::Image(f), out, capacity);
  });
}

irf_status irf_model_component(const irf_model* model, int index, double* out, size_t capacity) {
  return guard([&] {
    need(model, "model");
    copy_image(irf::component_image(model->value, index), out, capacity);
  });
}

irf_status irf_model_convex_deviation(const irf_model* model, double* deviation) {
  return guard([&] {
    need(model, "model");
    need(deviation, "deviation");
    irf::require(model->value.mixing.has_value(), irf::ErrorKind::kParameter,
                 "model has no mixing matrix");
    const irf::Matrix& b = model->value.basis;
    const double diff = (b - model->data.values() * *model->value.mixing).cwiseAbs().maxCoeff();
    const double scale = b.cwiseAbs().maxCoeff();
    *deviation = scale > 0 ? diff / scale : diff;
  });
}

irf_status irf_model_centered_error(const irf_model* model, double* error) {
  return guard([&] {
    need(model, "model");
    need(error, "error");
    *error = irf::centered_reconstruction_error(model->data, model->value);
  });
}

irf_status irf_model_select(const irf_model* model, const irf_mask* roi, irf_criterion criterion,
                            int index, int* selected, double* image, size_t capacity,
                            double* scores, size_t scores_capacity) {
  return guard([&] {
    need(model, "model");
    irf::require(criterion == IRF_SELECT_MAX_ROI_CONTRAST || criterion == IRF_SELECT_INDEX,
                 irf::ErrorKind::kParameter, "unknown selection criterion");
    const irf::BinaryMask whole(model->value.dims, true);
    const irf::BinaryMask& r = roi ? roi->value : whole;
    const irf::ComponentSelection sel = irf::select_component(
        model->value, r,
        criterion == IRF_SELECT_INDEX ? irf::SelectionCriterion::kIndex
                                      : irf::SelectionCriterion::kMaxRoiContrast,
        index);
    if (selected) *selected = sel.index;
    if (image) copy_image(sel.image, image, capacity);
    if (scores) {
      need_capacity(sel.scores.size(), scores_capacity);
      std::copy(sel.scores.begin(), sel.scores.end(), scores);
    }
  });
}

irf_status irf_jaccard(const irf_mask* detected, const irf_mask* gt, const irf_mask* domain,
                       double* score) {
  return guard([&] {
    need(detected, "detected");
    need(gt, "gt");
    need(score, "score");
    *score = irf::jaccard(detected->value, gt->value, domain ? &domain->value : nullptr);
  });
}

irf_status irf_binarize(const double* image, size_t rows, size_t cols, double quantile,
                        irf_mask** out, int* degenerate) {
  return guard([&] {
    need(out, "out");
    irf::Binarized b = irf::binarize(image_from(image, rows, cols), quantile);
    if (degenerate) *degenerate = b.degenerate ? 1 : 0;
    *out = new irf_mask{std::move(b.mask)};
  });
}

irf_status irf_threshold_sweep(const double* image, size_t rows, size_t cols, const irf_mask* gt,
                               double step, int invert, const irf_mask* domain, irf_sweep** out) {
  return guard([&] {
    need(gt, "gt");
    need(out, "out");
    *out = new irf_sweep{irf::threshold_sweep(image_from(image, rows, cols), gt->value, step,
                                              invert != 0, domain ? &domain->value : nullptr)};
  });
}

void irf_sweep_free(irf_sweep* sweep) { delete sweep; }

size_t irf_sweep_size(const irf_sweep* sweep) { return sweep ? sweep->value.thresholds.size() : 0; }

irf_status irf_sweep_entry(const irf_sweep* sweep, size_t index, double* threshold,
                           double* jaccard_normal, double* jaccard_inverted) {
  return guard([&] {
    need(sweep, "sweep");
    const irf::SweepResult& s = sweep->value;
    irf::require(index < s.thresholds.size(), irf::ErrorKind::kParameter, "sweep index out of range");
    if (threshold) *threshold = s.thresholds[index];
    if (jaccard_normal) *jaccard_normal = s.jaccard_normal[index];
    if (jaccard_inverted)
      *jaccard_inverted = s.jaccard_inverted.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                     : s.jaccard_inverted[index];
  });
}

irf_status irf_sweep_best(const irf_sweep* sweep, double* threshold, double* jaccard, int* polarity) {
  return guard([&] {
    need(sweep, "sweep");
    if (threshold) *threshold = sweep->value.best_threshold;
    if (jaccard) *jaccard = sweep->value.best_jaccard;
    if (polarity) *polarity = sweep->value.best_polarity == irf::Polarity::kInverted ? 1 : 0;
  });
}

irf_status irf_defect_window(const irf_mask* defect, irf_mask** out) {
  return guard([&] {
    need(defect, "defect");
    need(out, "out");
    *out = new irf_mask{irf::defect_window(defect->value)};
  });
}

irf_status irf_snr(const double* image, size_t rows, size_t cols, const irf_mask* signal_roi,
                   const irf_mask* noise_roi, double* decibels, int* degenerate) {
  return guard([&] {
    need(signal_roi, "signal_roi");
    need(noise_roi, "noise_roi");
    need(decibels, "decibels");
    const irf::SnrResult r = irf::snr(image_from(image, rows, cols), signal_roi->value, noise_roi->value);
    *decibels = r.decibels;
    if (degenerate) *degenerate = r.degenerate ? 1 : 0;
  });
}

irf_status irf_robustness_curve(const irf_sequence* seq, const irf_factor_request* request,
                                const irf_mask* gt, const irf_mask* signal_roi,
                                const irf_mask* noise_roi, const double* levels,
                                size_t level_count, double step, int invert, uint64_t seed,
                                irf_robustness_point* out) {
  return guard([&] {
    need(seq, "sequence");
    need(gt, "gt");
    need(signal_roi, "signal_roi");
    need(noise_roi, "noise_roi");
    if (level_count > 0) {
      need(levels, "levels");
      need(out, "out");
    }
    irf::RobustnessSettings st;
    st.factor = request_from(request);
    st.step = step;
    st.invert = invert != 0;
    st.shift_nonnegative = request->shift_nonnegative != 0;
    const auto points = irf::robustness_curve(irf::vectorize(seq->value), st, gt->value,
                                              signal_roi->value, noise_roi->value,
                                              std::vector<double>(levels, levels + level_count), seed);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& p = points[i];
      out[i] = irf_robustness_point{p.level, p.snr, p.best_jaccard, p.best_threshold,
                                    p.snr_degenerate ? 1 : 0,
                                    p.polarity == irf::Polarity::kInverted ? 1 : 0, p.component};
    }
  });
}

irf_status irf_texture_features(const double* image, size_t rows, size_t cols, const irf_mask* roi,
                                int levels, const irf_offset* offsets, size_t offset_count,
                                int symmetric, int squared_dissimilarity, irf_features* out,
                                double* tlcm, size_t tlcm_capacity) {
  return guard([&] {
    need(out, "out");
    const irf::Image im = image_from(image, rows, cols);
    const irf::BinaryMask whole(irf::Dims{rows, cols}, true);
    const irf::BinaryMask& r = roi ? roi->value : whole;
    std::vector<irf::Offset> offs;
    if (offset_count == 0) {
      offs = irf::default_offsets();
    } else {
      need(offsets, "offsets");
      for (std::size_t i = 0; i < offset_count; ++i) offs.push_back({offsets[i].distance, offsets[i].angle});
    }
    const irf::Quantized q = irf::quantize(im, r, levels);
    const irf::Tlcm t = irf::tlcm(q.levels, r, offs, levels, symmetric != 0);
    const irf::TlcmFeatures f = irf::features(t, squared_dissimilarity != 0);
    *out = irf_features{f.contrast, f.dissimilarity, f.homogeneity, f.energy, f.correlation,
                        f.correlation_degenerate ? 1 : 0, q.degenerate ? 1 : 0};
    if (tlcm) copy_image(irf::Image(t.p), tlcm, tlcm_capacity);
  });
}

irf_status irf_tlcm_features(const double* p, size_t levels, int squared_dissimilarity,
                             irf_features* out) {
  return guard([&] {
    need(out, "out");
    const irf::Image pm = image_from(p, levels, levels);
    irf::require((pm.array() >= 0).all() && std::abs(pm.sum() - 1.0) <= 1e-9,
                 irf::ErrorKind::kDomain, "co-occurrence matrix must be non-negative and sum to 1");
    const irf::TlcmFeatures f = irf::features(irf::Matrix(pm), squared_dissimilarity != 0);
    *out = irf_features{f.contrast, f.dissimilarity, f.homogeneity, f.energy, f.correlation,
                        f.correlation_degenerate ? 1 : 0, 0};
  });
}

irf_status irf_kruskal_wallis(const double* a, size_t na, const double* b, size_t nb, irf_kruskal* out) {
  return guard([&] {
    need(a, "a");
    need(b, "b");
    need(out, "out");
    const irf::KruskalWallis k =
        irf::kruskal_wallis(std::vector<double>(a, a + na), std::vector<double>(b, b + nb));
    *out = irf_kruskal{k.h, k.p_value, k.p_exact.value_or(std::numeric_limits<double>::quiet_NaN()),
                       k.p_exact.has_value() ? 1 : 0, k.dof, k.degenerate ? 1 : 0};
  });
}

void irf_logistic_options_default(irf_logistic_options* opts) {
  if (opts == nullptr) return;
  const irf::LogisticOptions d;
  *opts = irf_logistic_options{d.ridge, d.gradient_tol, d.max_iter};
}

namespace {

irf::LogisticOptions logistic_options(const irf_logistic_options* o) {
  irf::LogisticOptions opts;
  if (o) {
    opts.ridge = o->ridge;
    opts.gradient_tol = o->gradient_tol;
    opts.max_iter = o->max_iter;
  }
  return opts;
}

}  // namespace

irf_status irf_logistic_fit(const double* features, size_t n, size_t p, const int* labels,
                            const irf_logistic_options* opts, irf_logistic** out) {
  return guard([&] {
    need(out, "out");
    *out = new irf_logistic{irf::logistic_fit(row_major_matrix(features, n, p), labels_from(labels, n),
                                              logistic_options(opts))};
  });
}

void irf_logistic_free(irf_logistic* model) { delete model; }

irf_status irf_logistic_get_info(const irf_logistic* model, irf_logistic_info* info) {
  return guard([&] {
    need(model, "model");
    need(info, "info");
    const irf::LogisticModel& m = model->value;
    *info = irf_logistic_info{m.converged ? 1 : 0, m.separated ? 1 : 0, m.iterations,
                              static_cast<std::size_t>(m.mean.size())};
  });
}

irf_status irf_logistic_parameters(const irf_logistic* model, double* coefficients, double* mean,
                                   double* scale) {
  return guard([&] {
    need(model, "model");
    const irf::LogisticModel& m = model->value;
    if (coefficients) std::copy(m.coefficients.begin(), m.coefficients.end(), coefficients);
    if (mean) std::copy(m.mean.begin(), m.mean.end(), mean);
    if (scale) std::copy(m.scale.begin(), m.scale.end(), scale);
  });
}

irf_status irf_logistic_scores(const irf_logistic* model, const double* features, size_t n,
                               double* scores) {
  return guard([&] {
    need(model, "model");
    need(scores, "scores");
    const irf::Vector s =
        model->value.score(row_major_matrix(features, n, static_cast<std::size_t>(model->value.mean.size())));
    std::copy(s.begin(), s.end(), scores);
  });
}

irf_status irf_logistic_eval(const irf_logistic* model, const double* features, size_t n,
                             const int* labels, double* accuracy, double* auc, irf_roc_point* roc,
                             size_t roc_capacity, size_t* roc_count) {
  return guard([&] {
    need(model, "model");
    const irf::LogisticEvaluation ev = irf::logistic_eval(
        model->value, row_major_matrix(features, n, static_cast<std::size_t>(model->value.mean.size())),
        labels_from(labels, n));
    if (accuracy) *accuracy = ev.accuracy;
    if (auc) *auc = ev.auc;
    if (roc_count) *roc_count = ev.roc.size();
    if (roc) {
      need_capacity(ev.roc.size(), roc_capacity);
      for (std::size_t i = 0; i < ev.roc.size(); ++i)
        roc[i] = irf_roc_point{ev.roc[i].threshold, ev.roc[i].fpr, ev.roc[i].tpr};
    }
  });
}

irf_status irf_logistic_loo_accuracy(const double* features, size_t n, size_t p, const int* labels,
                                     const irf_logistic_options* opts, double* accuracy) {
  return guard([&] {
    need(accuracy, "accuracy");
    *accuracy = irf::logistic_loo_accuracy(row_major_matrix(features, n, p), labels_from(labels, n),
                                           logistic_options(opts));
  });
}

}  // extern "C"

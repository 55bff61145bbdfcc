/* C interface to the irfact thermal-sequence factorization library.
 *
 * Every function returns an irf_status; on failure a message describing the
 * error is available from irf_last_error() on the calling thread until the
 * next failing call. Handles are opaque and released with the matching
 * *_free function (NULL is accepted). Images are row-major double buffers.
 * Functions that copy arrays out take a capacity and fail with
 * IRF_E_PARAMETER when it is too small; the required size is always
 * reported through the accompanying size query. */
#ifndef IRFACT_IRFACT_H_
#define IRFACT_IRFACT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(IRFACT_BUILDING_LIBRARY)
#define IRF_API __attribute__((visibility("default")))
#else
#define IRF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum irf_status {
  IRF_OK = 0,
  IRF_E_PARAMETER = 1,  /* invalid argument or option */
  IRF_E_DIMENSION = 2,  /* shape mismatch */
  IRF_E_FORMAT = 3,     /* malformed file */
  IRF_E_DOMAIN = 4,     /* value outside the method's domain */
  IRF_E_DEGENERATE = 5, /* numerically degenerate input */
  IRF_E_IO = 6,         /* file system failure */
  IRF_E_INTERNAL = 7    /* unexpected failure, e.g. out of memory */
} irf_status;

IRF_API const char* irf_last_error(void);
IRF_API const char* irf_status_name(irf_status s);
IRF_API const char* irf_version(void);

/* Named sub-seed: a hash of `seed` and `stage`. */
IRF_API uint64_t irf_derive_seed(uint64_t seed, const char* stage);

/* ---- sequences and masks ---------------------------------------------- */

typedef struct irf_sequence irf_sequence;
typedef struct irf_mask irf_mask;

/* `data` holds `frames` row-major rows x cols images back to back.
 * sampling_rate <= 0 means unknown. */
IRF_API irf_status irf_sequence_create(const double* data, size_t rows, size_t cols, size_t frames,
                                       double sampling_rate, irf_sequence** out);
IRF_API irf_status irf_sequence_load(const char* path, irf_sequence** out);
IRF_API irf_status irf_sequence_save(const irf_sequence* seq, const char* path);
IRF_API void irf_sequence_free(irf_sequence* seq);
IRF_API irf_status irf_sequence_shape(const irf_sequence* seq, size_t* rows, size_t* cols,
                                      size_t* frames, double* sampling_rate);
IRF_API irf_status irf_sequence_frame(const irf_sequence* seq, size_t index, double* out,
                                      size_t capacity);
/* Gaussian noise with sigma = percent * (max - min); percent is a fraction. */
IRF_API irf_status irf_sequence_add_noise(const irf_sequence* seq, double percent, uint64_t seed,
                                          irf_sequence** out);

IRF_API irf_status irf_mask_create(size_t rows, size_t cols, irf_mask** out);
IRF_API irf_status irf_mask_load(const char* path, irf_mask** out);
IRF_API irf_status irf_mask_save(const irf_mask* mask, const char* path);
IRF_API irf_status irf_mask_copy(const irf_mask* mask, irf_mask** out);
IRF_API void irf_mask_free(irf_mask* mask);
IRF_API irf_status irf_mask_shape(const irf_mask* mask, size_t* rows, size_t* cols);
IRF_API irf_status irf_mask_get(const irf_mask* mask, size_t row, size_t col, int* value);
IRF_API irf_status irf_mask_set(irf_mask* mask, size_t row, size_t col, int value);
IRF_API irf_status irf_mask_count(const irf_mask* mask, size_t* count);
/* In-place set algebra on `target`; operands must share its shape. */
IRF_API irf_status irf_mask_union(irf_mask* target, const irf_mask* other);
IRF_API irf_status irf_mask_intersect(irf_mask* target, const irf_mask* other);
IRF_API irf_status irf_mask_invert(irf_mask* target);

/* Min-max normalized 16-bit PGM. */
IRF_API irf_status irf_image_save_pgm16(const double* image, size_t rows, size_t cols,
                                        const char* path);
IRF_API irf_status irf_image_load_pgm(const char* path, size_t* rows, size_t* cols, double* out,
                                      size_t capacity);
/* Row-major matrix in the THRM container (single frame). */
IRF_API irf_status irf_matrix_save(const double* data, size_t rows, size_t cols, const char* path);
/* out may be NULL to query the shape. */
IRF_API irf_status irf_matrix_load(const char* path, size_t* rows, size_t* cols, double* out,
                                   size_t capacity);

/* ---- phantoms ----------------------------------------------------------- */

typedef struct irf_defect {
  double x, y, radius, depth; /* m; depth is the sound material above the hole */
  double conductivity_multiplier;
} irf_defect;

typedef struct irf_specimen {
  const char* name;
  double width, height, thickness;
  size_t rows, cols, layers;
  double conductivity, density, specific_heat;
  const irf_defect* defects;
  size_t defect_count;
} irf_specimen;

typedef struct irf_acquisition {
  double flash_energy, flash_duration, sampling_rate, duration;
} irf_acquisition;

typedef struct irf_active irf_active;

IRF_API size_t irf_preset_count(void);
IRF_API const char* irf_preset_name(size_t index);
/* Fills the specimen (defects point into library-owned storage valid for the
 * process lifetime) and the default acquisition of a named preset. */
IRF_API irf_status irf_preset_get(const char* name, irf_specimen* specimen,
                                  irf_acquisition* acquisition);
IRF_API irf_status irf_simulate_active(const irf_specimen* specimen, const irf_acquisition* acq,
                                       irf_active** out);
IRF_API void irf_active_free(irf_active* result);
/* Borrowed views, valid while `result` lives. */
IRF_API const irf_sequence* irf_active_sequence(const irf_active* result);
IRF_API size_t irf_active_defect_count(const irf_active* result);
IRF_API const irf_mask* irf_active_defect_mask(const irf_active* result, size_t index);
IRF_API const irf_mask* irf_active_ground_truth(const irf_active* result);
IRF_API const irf_mask* irf_active_sound_region(const irf_active* result);

typedef struct irf_tissue {
  double width, height;
  size_t rows, cols;
  double conductivity, density, specific_heat;
  double perfusion_rate, blood_specific_heat, arterial_temp, metabolic_rate;
  double surface_loss, ambient_temp, layer_thickness, background_length;
} irf_tissue;

typedef struct irf_cohort_spec {
  size_t subjects, symptomatic;
  irf_tissue tissue;
  double duration, sampling_rate;
  double lesion_radius_min, lesion_radius_max;
  double perfusion_multiplier, metabolic_multiplier;
  double background_variation, noise_percent;
} irf_cohort_spec;

typedef struct irf_cohort irf_cohort;

IRF_API void irf_cohort_spec_default(irf_cohort_spec* spec);
IRF_API irf_status irf_simulate_cohort(const irf_cohort_spec* spec, uint64_t seed, irf_cohort** out);
IRF_API void irf_cohort_free(irf_cohort* cohort);
IRF_API size_t irf_cohort_size(const irf_cohort* cohort);
IRF_API const char* irf_cohort_id(const irf_cohort* cohort, size_t index);
IRF_API int irf_cohort_label(const irf_cohort* cohort, size_t index);
IRF_API const irf_sequence* irf_cohort_sequence(const irf_cohort* cohort, size_t index);
IRF_API const irf_mask* irf_cohort_lesion_mask(const irf_cohort* cohort, size_t index);

/* ---- factorization ------------------------------------------------------ */

typedef enum irf_init { IRF_INIT_RANDOM_UNIFORM = 0, IRF_INIT_KMEANS = 1 } irf_init;

typedef struct irf_factor_request {
  const char* method; /* pct, ccipct, sparse_pct, nmf_gd, nmf_nnls, semi_nmf, convex_nmf, sparse_nmf */
  int rank;
  double lambda;
  int max_iter;
  double rel_tol;
  irf_init init;
  uint64_t seed;
  double epsilon_guard;
  /* Subtract min(X) first when the method needs non-negative data. */
  int shift_nonnegative;
} irf_factor_request;

typedef struct irf_model irf_model;

IRF_API void irf_factor_request_default(irf_factor_request* request);
/* Comma-separated list of valid method names. */
IRF_API const char* irf_method_names(void);
IRF_API int irf_method_is_valid(const char* name);
IRF_API irf_status irf_factorize(const irf_sequence* seq, const irf_factor_request* request,
                                 irf_model** out);
IRF_API void irf_model_free(irf_model* model);

typedef struct irf_model_info {
  const char* method;
  int rank;
  int iterations;
  int degenerate;
  int has_lambda;
  double lambda;
  int has_mixing;
  uint64_t seed;
  size_t pixels, frames, rows, cols;
  size_t history_length;
} irf_model_info;

IRF_API irf_status irf_model_get_info(const irf_model* model, irf_model_info* info);
IRF_API irf_status irf_model_history(const irf_model* model, double* out, size_t capacity);
/* which: 'B' basis (pixels x k), 'A' coefficients (k x frames), 'W' mixing
 * (frames x k). Copied row-major. */
IRF_API irf_status irf_model_factor_shape(const irf_model* model, char which, size_t* rows,
                                          size_t* cols);
IRF_API irf_status irf_model_factor(const irf_model* model, char which, double* out,
                                    size_t capacity);
/* Component i of B reshaped to the image grid (not normalized). */
IRF_API irf_status irf_model_component(const irf_model* model, int index, double* out,
                                       size_t capacity);
/* max |B - X W| / max |B| for convex-NMF models. */
IRF_API irf_status irf_model_convex_deviation(const irf_model* model, double* deviation);
/* ||X_c - center(B A)||_F against the data the model was fit on. */
IRF_API irf_status irf_model_centered_error(const irf_model* model, double* error);

typedef enum irf_criterion { IRF_SELECT_MAX_ROI_CONTRAST = 0, IRF_SELECT_INDEX = 1 } irf_criterion;

/* Writes the selected component normalized to [0, 1]; `scores` (may be NULL)
 * receives the k per-component contrast scores. */
IRF_API irf_status irf_model_select(const irf_model* model, const irf_mask* roi,
                                    irf_criterion criterion, int index, int* selected,
                                    double* image, size_t capacity, double* scores,
                                    size_t scores_capacity);

/* ---- evaluation --------------------------------------------------------- */

typedef struct irf_sweep irf_sweep;

IRF_API irf_status irf_jaccard(const irf_mask* detected, const irf_mask* gt, const irf_mask* domain,
                               double* score);
IRF_API irf_status irf_binarize(const double* image, size_t rows, size_t cols, double quantile,
                                irf_mask** out, int* degenerate);
/* domain may be NULL. */
IRF_API irf_status irf_threshold_sweep(const double* image, size_t rows, size_t cols,
                                       const irf_mask* gt, double step, int invert,
                                       const irf_mask* domain, irf_sweep** out);
IRF_API void irf_sweep_free(irf_sweep* sweep);
IRF_API size_t irf_sweep_size(const irf_sweep* sweep);
/* jaccard_inverted is NaN when the sweep did not invert. */
IRF_API irf_status irf_sweep_entry(const irf_sweep* sweep, size_t index, double* threshold,
                                   double* jaccard_normal, double* jaccard_inverted);
/* polarity: 0 normal, 1 inverted. */
IRF_API irf_status irf_sweep_best(const irf_sweep* sweep, double* threshold, double* jaccard,
                                  int* polarity);
IRF_API irf_status irf_defect_window(const irf_mask* defect, irf_mask** out);
IRF_API irf_status irf_snr(const double* image, size_t rows, size_t cols, const irf_mask* signal_roi,
                           const irf_mask* noise_roi, double* decibels, int* degenerate);

typedef struct irf_robustness_point {
  double level, snr, best_jaccard, best_threshold;
  int snr_degenerate, polarity, component;
} irf_robustness_point;

IRF_API irf_status irf_robustness_curve(const irf_sequence* seq, const irf_factor_request* request,
                                        const irf_mask* gt, const irf_mask* signal_roi,
                                        const irf_mask* noise_roi, const double* levels,
                                        size_t level_count, double step, int invert, uint64_t seed,
                                        irf_robustness_point* out);

/* ---- texture ------------------------------------------------------------ */

typedef struct irf_offset {
  double distance, angle; /* pixels, radians */
} irf_offset;

typedef struct irf_features {
  double contrast, dissimilarity, homogeneity, energy, correlation;
  int correlation_degenerate;
  int quantization_degenerate;
} irf_features;

/* Quantizes the ROI into `levels` bins, builds the co-occurrence matrix and
 * evaluates the five properties. `tlcm` (may be NULL) receives the levels x
 * levels matrix row-major. `squared_dissimilarity` selects |i-j|^2. */
IRF_API irf_status irf_texture_features(const double* image, size_t rows, size_t cols,
                                        const irf_mask* roi, int levels, const irf_offset* offsets,
                                        size_t offset_count, int symmetric,
                                        int squared_dissimilarity, irf_features* out, double* tlcm,
                                        size_t tlcm_capacity);
/* Features of a given normalized co-occurrence matrix. */
IRF_API irf_status irf_tlcm_features(const double* p, size_t levels, int squared_dissimilarity,
                                     irf_features* out);

typedef struct irf_kruskal {
  double h, p_value, p_exact;
  int has_exact, dof, degenerate;
} irf_kruskal;

IRF_API irf_status irf_kruskal_wallis(const double* a, size_t na, const double* b, size_t nb,
                                      irf_kruskal* out);

typedef struct irf_logistic irf_logistic;

typedef struct irf_logistic_options {
  double ridge, gradient_tol;
  int max_iter;
} irf_logistic_options;

IRF_API void irf_logistic_options_default(irf_logistic_options* opts);
/* features: n x p row-major; labels 0/1. */
IRF_API irf_status irf_logistic_fit(const double* features, size_t n, size_t p, const int* labels,
                                    const irf_logistic_options* opts, irf_logistic** out);
IRF_API void irf_logistic_free(irf_logistic* model);

typedef struct irf_logistic_info {
  int converged, separated, iterations;
  size_t feature_count;
} irf_logistic_info;

IRF_API irf_status irf_logistic_get_info(const irf_logistic* model, irf_logistic_info* info);
/* [intercept, beta_1 .. beta_p] on standardized features, plus the
 * standardization mean and scale (p each). Any pointer may be NULL. */
IRF_API irf_status irf_logistic_parameters(const irf_logistic* model, double* coefficients,
                                           double* mean, double* scale);
IRF_API irf_status irf_logistic_scores(const irf_logistic* model, const double* features, size_t n,
                                       double* scores);

typedef struct irf_roc_point {
  double threshold, fpr, tpr;
} irf_roc_point;

/* roc receives at most roc_capacity points; roc_count reports how many exist
 * (at most n + 1). */
IRF_API irf_status irf_logistic_eval(const irf_logistic* model, const double* features, size_t n,
                                     const int* labels, double* accuracy, double* auc,
                                     irf_roc_point* roc, size_t roc_capacity, size_t* roc_count);
IRF_API irf_status irf_logistic_loo_accuracy(const double* features, size_t n, size_t p,
                                             const int* labels, const irf_logistic_options* opts,
                                             double* accuracy);

#ifdef __cplusplus
}
#endif

#endif /* IRFACT_IRFACT_H_ */

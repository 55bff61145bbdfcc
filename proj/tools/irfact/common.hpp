#ifndef IRFACT_TOOLS_COMMON_HPP_
#define IRFACT_TOOLS_COMMON_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "irfact/irfact.h"

namespace cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumerical = 4;

class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

int exit_code_for(irf_status s);

// Throws CliError with `context` prepended when `s` is not IRF_OK.
void check(irf_status s, const std::string& context);

struct SequenceFree { void operator()(irf_sequence* p) const { irf_sequence_free(p); } };
struct MaskFree { void operator()(irf_mask* p) const { irf_mask_free(p); } };
struct ModelFree { void operator()(irf_model* p) const { irf_model_free(p); } };
struct SweepFree { void operator()(irf_sweep* p) const { irf_sweep_free(p); } };
struct ActiveFree { void operator()(irf_active* p) const { irf_active_free(p); } };
struct CohortFree { void operator()(irf_cohort* p) const { irf_cohort_free(p); } };
struct LogisticFree { void operator()(irf_logistic* p) const { irf_logistic_free(p); } };

using SequencePtr = std::unique_ptr<irf_sequence, SequenceFree>;
using MaskPtr = std::unique_ptr<irf_mask, MaskFree>;
using ModelPtr = std::unique_ptr<irf_model, ModelFree>;
using SweepPtr = std::unique_ptr<irf_sweep, SweepFree>;
using ActivePtr = std::unique_ptr<irf_active, ActiveFree>;
using CohortPtr = std::unique_ptr<irf_cohort, CohortFree>;
using LogisticPtr = std::unique_ptr<irf_logistic, LogisticFree>;

SequencePtr load_sequence(const std::filesystem::path& path);
MaskPtr load_mask(const std::filesystem::path& path);
MaskPtr copy_mask(const irf_mask* m);

struct ImageBuf {
  std::size_t rows = 0, cols = 0;
  std::vector<double> data;
};

// A .thrm matrix blob or a PGM image.
ImageBuf load_image(const std::filesystem::path& path);

std::string sha256_bytes(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

// Writes through a temporary file in the same directory, then renames.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
std::string read_text(const std::filesystem::path& path);

// Shortest round-trip decimal form; "inf", "-inf" and "nan" for non-finite values.
std::string fmt(double v);
// RFC 4180 field quoting.
std::string csv_field(const std::string& s);
std::string csv_row(const std::vector<std::string>& fields);
// RFC 4180 reader; accepts LF or CRLF line ends.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

// Runs body(i) for i in [0, n) on up to `threads` workers. Exceptions are
// rethrown after all workers stop, lowest index first.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

// Sorted relative-path -> sha256 map over every regular file under `dir`,
// excluding `skip` (a file name relative to dir).
nlohmann::json hash_tree(const std::filesystem::path& dir, const std::string& skip);

// Path of `p` relative to `base` when it lies inside it, else the file name.
std::string display_path(const std::filesystem::path& p, const std::filesystem::path& base);

}  // namespace cli

#endif  // IRFACT_TOOLS_COMMON_HPP_

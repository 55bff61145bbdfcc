#ifndef IRFACT_SEQIO_HPP_
#define IRFACT_SEQIO_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace irf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
// Images are row-major so that a frame's storage is its vectorization.
using Image = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MaskArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Dims {
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t pixels() const { return rows * cols; }
  friend bool operator==(const Dims&, const Dims&) = default;
};

// A stack of tau >= 2 equally sized, finite N x M temperature frames.
class ThermalSequence {
 public:
  ThermalSequence(std::vector<Image> frames,
                  std::optional<double> sampling_rate = std::nullopt);

  Dims dims() const { return dims_; }
  std::size_t frame_count() const { return frames_.size(); }
  const Image& frame(std::size_t i) const { return frames_.at(i); }
  const std::vector<Image>& frames() const { return frames_; }
  std::optional<double> sampling_rate() const { return sampling_rate_; }
  std::optional<double> acquisition_duration() const;

  double min_value() const;
  double max_value() const;

 private:
  std::vector<Image> frames_;
  Dims dims_;
  std::optional<double> sampling_rate_;
};

// Delta x tau matrix whose column j is the row-major vectorization of frame j.
class DataMatrix {
 public:
  DataMatrix(Matrix values, Dims origin_dims);
  // Treats every row as one "pixel" of a rows x 1 image.
  explicit DataMatrix(Matrix values);

  const Matrix& values() const { return values_; }
  Dims origin_dims() const { return dims_; }
  Eigen::Index pixels() const { return values_.rows(); }
  Eigen::Index frames() const { return values_.cols(); }

 private:
  Matrix values_;
  Dims dims_;
};

class BinaryMask {
 public:
  BinaryMask() = default;
  explicit BinaryMask(Dims dims, bool value = false);
  explicit BinaryMask(MaskArray pixels);

  Dims dims() const {
    return {static_cast<std::size_t>(pixels_.rows()),
            static_cast<std::size_t>(pixels_.cols())};
  }
  bool operator()(Eigen::Index r, Eigen::Index c) const { return pixels_(r, c); }
  void set(Eigen::Index r, Eigen::Index c, bool v) { pixels_(r, c) = v; }
  std::size_t count() const { return static_cast<std::size_t>(pixels_.count()); }
  bool empty() const { return count() == 0; }
  const MaskArray& pixels() const { return pixels_; }

  BinaryMask operator&(const BinaryMask& o) const;
  BinaryMask operator|(const BinaryMask& o) const;
  BinaryMask operator~() const;
  friend bool operator==(const BinaryMask& a, const BinaryMask& b) {
    return a.pixels_.rows() == b.pixels_.rows() &&
           a.pixels_.cols() == b.pixels_.cols() &&
           (a.pixels_ == b.pixels_).all();
  }

 private:
  MaskArray pixels_;
};

DataMatrix vectorize(const ThermalSequence& seq);
Image devectorize(const Eigen::Ref<const Vector>& column, Dims dims);
ThermalSequence to_sequence(const DataMatrix& x, std::optional<double> sampling_rate);

// Adds i.i.d. N(0, sigma^2) noise with sigma = percent * (max - min) of the
// whole input. Values are drawn in frame-major, row-major order, so the
// sequence and data-matrix overloads produce identical noise for one seed.
ThermalSequence add_gaussian_noise(const ThermalSequence& seq, double percent,
                                   std::uint64_t seed);
DataMatrix add_gaussian_noise(const DataMatrix& x, double percent, std::uint64_t seed);

// THRM binary sequences (little-endian).
void save_sequence(const ThermalSequence& seq, const std::filesystem::path& path);
ThermalSequence load_sequence(const std::filesystem::path& path);

// THRM-style matrix blob: identical header with tau = 1, N = rows, M = cols,
// followed by the matrix in row-major order.
void save_matrix_blob(const Matrix& m, const std::filesystem::path& path);
Matrix load_matrix_blob(const std::filesystem::path& path);

// PGM P5 masks, maxval 255: 0 background, 255 foreground. Any non-zero
// sample reads back as foreground.
void save_mask_pgm(const BinaryMask& mask, const std::filesystem::path& path);
BinaryMask load_mask_pgm(const std::filesystem::path& path);

// 16-bit PGM P5 of a min-max normalized image (constant images map to 0).
void save_image_pgm16(const Image& image, const std::filesystem::path& path);
// Reads an 8- or 16-bit PGM P5 as raw sample values.
Image load_image_pgm(const std::filesystem::path& path);

// Writes to a sibling temp file and renames it over the target.
void write_file_atomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace irf

#endif  // IRFACT_SEQIO_HPP_

#include "irfact/seqio.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "irfact/error.hpp"
#include "irfact/random.hpp"

namespace irf {

namespace {

constexpr char kMagic[4] = {'T', 'H', 'R', 'M'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::size_t kHeaderBytes = 4 + 4 * 4 + 8;

bool all_finite(const double* p, std::size_t n) {
  return std::all_of(p, p + n, [](double v) { return std::isfinite(v); });
}

class ByteWriter {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double d) {
    auto v = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void raw(const void* p, std::size_t n) {
    auto* b = static_cast<const std::uint8_t*>(p);
    bytes_.insert(bytes_.end(), b, b + n);
  }
  std::vector<std::uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {}

  std::uint64_t offset() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) throw FormatError(std::string("truncated ") + what, pos_);
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(v);
  }
  const std::uint8_t* take(std::size_t n, const char* what) {
    need(n, what);
    const std::uint8_t* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open '" + path.string() + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct ThrmHeader {
  std::uint32_t rows, cols, frames;
  double sampling_rate;
};

void write_header(ByteWriter& w, const ThrmHeader& h) {
  w.raw(kMagic, 4);
  w.u32(kFormatVersion);
  w.u32(h.rows);
  w.u32(h.cols);
  w.u32(h.frames);
  w.f64(h.sampling_rate);
}

ThrmHeader read_header(ByteReader& r) {
  const std::uint8_t* magic = r.take(4, "magic");
  if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("bad magic bytes, expected 'THRM'", 0);
  std::uint64_t at = r.offset();
  std::uint32_t version = r.u32("version");
  if (version != kFormatVersion)
    throw FormatError("unsupported THRM version " + std::to_string(version), at);
  ThrmHeader h{};
  h.rows = r.u32("header");
  h.cols = r.u32("header");
  h.frames = r.u32("header");
  at = r.offset();
  h.sampling_rate = r.f64("header");
  if (!std::isfinite(h.sampling_rate) || h.sampling_rate < 0)
    throw FormatError("invalid sampling rate", at);
  if (h.rows == 0 || h.cols == 0 || h.frames == 0)
    throw FormatError("zero dimension in header", 4);
  return h;
}

std::vector<double> read_payload(ByteReader& r, std::size_t count) {
  const std::uint64_t start = r.offset();
  if (r.remaining() < count * 8) {
    throw FormatError("truncated payload: header declares " + std::to_string(count) +
                          " values but only " + std::to_string(r.remaining() / 8) +
                          " are present",
                      start + r.remaining());
  }
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    double v = r.f64("payload");
    if (!std::isfinite(v)) throw FormatError("non-finite pixel value", start + 8 * i);
    values[i] = v;
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes after payload", r.offset());
  return values;
}

// PGM header tokens, skipping '#' comments.
std::string pgm_token(const std::vector<std::uint8_t>& b, std::size_t& pos) {
  while (pos < b.size()) {
    if (b[pos] == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
    } else if (std::isspace(b[pos])) {
      ++pos;
    } else {
      break;
    }
  }
  std::string tok;
  while (pos < b.size() && !std::isspace(b[pos]) && b[pos] != '#') tok.push_back(static_cast<char>(b[pos++]));
  if (tok.empty()) throw FormatError("truncated PGM header", pos);
  return tok;
}

struct PgmData {
  std::size_t width, height;
  unsigned maxval;
  std::vector<unsigned> samples;
};

PgmData parse_pgm(const std::vector<std::uint8_t>& b) {
  std::size_t pos = 0;
  if (pgm_token(b, pos) != "P5") throw FormatError("not a binary PGM (expected P5)", 0);
  auto number = [&](const char* what) {
    std::size_t at = pos;
    std::string t = pgm_token(b, pos);
    if (!std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      throw FormatError(std::string("invalid PGM ") + what, at);
    return std::stoul(t);
  };
  PgmData d{};
  d.width = number("width");
  d.height = number("height");
  d.maxval = static_cast<unsigned>(number("maxval"));
  if (d.width == 0 || d.height == 0) throw FormatError("zero PGM dimension", pos);
  if (d.maxval == 0 || d.maxval > 65535) throw FormatError("invalid PGM maxval", pos);
  ++pos;  // single whitespace byte before the raster
  const std::size_t bps = d.maxval < 256 ? 1 : 2;
  const std::size_t n = d.width * d.height;
  if (b.size() < pos + n * bps) throw FormatError("truncated PGM raster", b.size());
  d.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.samples[i] = bps == 1 ? b[pos + i]
                            : (static_cast<unsigned>(b[pos + 2 * i]) << 8) | b[pos + 2 * i + 1];
  }
  return d;
}

std::vector<std::uint8_t> pgm_bytes(std::size_t width, std::size_t height, unsigned maxval,
                                    const std::vector<unsigned>& samples) {
  std::string header = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n" +
                       std::to_string(maxval) + "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  for (unsigned s : samples) {
    if (maxval < 256) {
      out.push_back(static_cast<std::uint8_t>(s));
    } else {
      out.push_back(static_cast<std::uint8_t>(s >> 8));
      out.push_back(static_cast<std::uint8_t>(s & 0xff));
    }
  }
  return out;
}

void add_noise_inplace(double* data, std::size_t n, double percent, std::uint64_t seed) {
  require(percent >= 0 && std::isfinite(percent), ErrorKind::kParameter,
          "noise percent must be a non-negative fraction");
  if (percent == 0 || n == 0) return;
  auto [lo, hi] = std::minmax_element(data, data + n);
  const double sigma = percent * (*hi - *lo);
  if (sigma == 0) return;
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  for (std::size_t i = 0; i < n; ++i) data[i] += normal(rng);
}

}  // namespace

ThermalSequence::ThermalSequence(std::vector<Image> frames, std::optional<double> sampling_rate)
    : frames_(std::move(frames)), sampling_rate_(sampling_rate) {
  require(frames_.size() >= 2, ErrorKind::kParameter, "a thermal sequence needs at least 2 frames");
  dims_ = {static_cast<std::size_t>(frames_.front().rows()),
           static_cast<std::size_t>(frames_.front().cols())};
  require(dims_.rows >= 1 && dims_.cols >= 1, ErrorKind::kDimension, "frames must be non-empty");
  for (const Image& f : frames_) {
    require(static_cast<std::size_t>(f.rows()) == dims_.rows &&
                static_cast<std::size_t>(f.cols()) == dims_.cols,
            ErrorKind::kDimension, "all frames must share the same dimensions");
    require(all_finite(f.data(), static_cast<std::size_t>(f.size())), ErrorKind::kParameter,
            "frames must contain only finite values");
  }
  if (sampling_rate_) {
    require(std::isfinite(*sampling_rate_) && *sampling_rate_ > 0, ErrorKind::kParameter,
            "sampling rate must be positive");
  }
}

std::optional<double> ThermalSequence::acquisition_duration() const {
  if (!sampling_rate_) return std::nullopt;
  return static_cast<double>(frames_.size()) / *sampling_rate_;
}

double ThermalSequence::min_value() const {
  double m = std::numeric_limits<double>::infinity();
  for (const Image& f : frames_) m = std::min(m, f.minCoeff());
  return m;
}

double ThermalSequence::max_value() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const Image& f : frames_) m = std::max(m, f.maxCoeff());
  return m;
}

DataMatrix::DataMatrix(Matrix values, Dims origin_dims)
    : values_(std::move(values)), dims_(origin_dims) {
  require(static_cast<std::size_t>(values_.rows()) == dims_.pixels(), ErrorKind::kDimension,
          "data matrix rows must equal N*M");
  require(values_.cols() >= 1 && values_.rows() >= 1, ErrorKind::kDimension,
          "data matrix must be non-empty");
  require(values_.allFinite(), ErrorKind::kParameter, "data matrix must be finite");
}

DataMatrix::DataMatrix(Matrix values)
    : DataMatrix(Matrix(values), Dims{static_cast<std::size_t>(values.rows()), 1}) {}

BinaryMask::BinaryMask(Dims dims, bool value)
    : pixels_(MaskArray::Constant(static_cast<Eigen::Index>(dims.rows),
                                  static_cast<Eigen::Index>(dims.cols), value)) {}

BinaryMask::BinaryMask(MaskArray pixels) : pixels_(std::move(pixels)) {}

BinaryMask BinaryMask::operator&(const BinaryMask& o) const {
  require(dims() == o.dims(), ErrorKind::kDimension, "mask dimensions differ");
  return BinaryMask(MaskArray(pixels_ && o.pixels_));
}

BinaryMask BinaryMask::operator|(const BinaryMask& o) const {
  require(dims() == o.dims(), ErrorKind::kDimension, "mask dimensions differ");
  return BinaryMask(MaskArray(pixels_ || o.pixels_));
}

BinaryMask BinaryMask::operator~() const { return BinaryMask(MaskArray(!pixels_)); }

DataMatrix vectorize(const ThermalSequence& seq) {
  const Dims d = seq.dims();
  const auto delta = static_cast<Eigen::Index>(d.pixels());
  Matrix x(delta, static_cast<Eigen::Index>(seq.frame_count()));
  for (std::size_t j = 0; j < seq.frame_count(); ++j) {
    x.col(static_cast<Eigen::Index>(j)) = Eigen::Map<const Vector>(seq.frame(j).data(), delta);
  }
  return DataMatrix(std::move(x), d);
}

Image devectorize(const Eigen::Ref<const Vector>& column, Dims dims) {
  require(static_cast<std::size_t>(column.size()) == dims.pixels(), ErrorKind::kDimension,
          "column length " + std::to_string(column.size()) + " does not match " +
              std::to_string(dims.rows) + "x" + std::to_string(dims.cols));
  Image img(static_cast<Eigen::Index>(dims.rows), static_cast<Eigen::Index>(dims.cols));
  Eigen::Map<Vector>(img.data(), column.size()) = column;
  return img;
}

ThermalSequence to_sequence(const DataMatrix& x, std::optional<double> sampling_rate) {
  std::vector<Image> frames;
  frames.reserve(static_cast<std::size_t>(x.frames()));
  for (Eigen::Index j = 0; j < x.frames(); ++j) frames.push_back(devectorize(x.values().col(j), x.origin_dims()));
  return ThermalSequence(std::move(frames), sampling_rate);
}

ThermalSequence add_gaussian_noise(const ThermalSequence& seq, double percent, std::uint64_t seed) {
  DataMatrix noisy = add_gaussian_noise(vectorize(seq), percent, seed);
  return to_sequence(noisy, seq.sampling_rate());
}

DataMatrix add_gaussian_noise(const DataMatrix& x, double percent, std::uint64_t seed) {
  Matrix v = x.values();
  // Column-major storage of X is frame-major, row-major pixel order.
  add_noise_inplace(v.data(), static_cast<std::size_t>(v.size()), percent, seed);
  return DataMatrix(std::move(v), x.origin_dims());
}

void write_file_atomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::kIo, "cannot open '" + tmp.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorKind::kIo, "write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorKind::kIo, "cannot rename onto '" + path.string() + "': " + ec.message());
}

void save_sequence(const ThermalSequence& seq, const std::filesystem::path& path) {
  const Dims d = seq.dims();
  ByteWriter w;
  write_header(w, {static_cast<std::uint32_t>(d.rows), static_cast<std::uint32_t>(d.cols),
                   static_cast<std::uint32_t>(seq.frame_count()), seq.sampling_rate().value_or(0.0)});
  for (const Image& f : seq.frames()) {
    for (Eigen::Index i = 0; i < f.size(); ++i) w.f64(f.data()[i]);
  }
  write_file_atomic(path, w.bytes());
}

ThermalSequence load_sequence(const std::filesystem::path& path) {
  ByteReader r(read_file(path));
  ThrmHeader h = read_header(r);
  if (h.frames < 2) throw FormatError("a sequence needs at least 2 frames", 16);
  const std::size_t per_frame = std::size_t{h.rows} * h.cols;
  std::vector<double> values = read_payload(r, per_frame * h.frames);
  std::vector<Image> frames;
  frames.reserve(h.frames);
  for (std::uint32_t j = 0; j < h.frames; ++j) {
    frames.push_back(Eigen::Map<const Image>(values.data() + j * per_frame, h.rows, h.cols));
  }
  std::optional<double> fs;
  if (h.sampling_rate > 0) fs = h.sampling_rate;
  return ThermalSequence(std::move(frames), fs);
}

void save_matrix_blob(const Matrix& m, const std::filesystem::path& path) {
  require(m.allFinite(), ErrorKind::kParameter, "matrix blob must be finite");
  ByteWriter w;
  write_header(w, {static_cast<std::uint32_t>(m.rows()), static_cast<std::uint32_t>(m.cols()), 1, 0.0});
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) w.f64(m(r, c));
  write_file_atomic(path, w.bytes());
}

Matrix load_matrix_blob(const std::filesystem::path& path) {
  ByteReader r(read_file(path));
  ThrmHeader h = read_header(r);
  if (h.frames != 1) throw FormatError("matrix blob must hold exactly one frame", 16);
  std::vector<double> values = read_payload(r, std::size_t{h.rows} * h.cols);
  Matrix m(h.rows, h.cols);
  for (std::uint32_t i = 0; i < h.rows; ++i)
    for (std::uint32_t j = 0; j < h.cols; ++j) m(i, j) = values[std::size_t{i} * h.cols + j];
  return m;
}

void save_mask_pgm(const BinaryMask& mask, const std::filesystem::path& path) {
  const Dims d = mask.dims();
  std::vector<unsigned> samples(d.pixels());
  for (std::size_t i = 0; i < d.pixels(); ++i) samples[i] = mask.pixels().data()[i] ? 255u : 0u;
  write_file_atomic(path, pgm_bytes(d.cols, d.rows, 255, samples));
}

BinaryMask load_mask_pgm(const std::filesystem::path& path) {
  PgmData p = parse_pgm(read_file(path));
  MaskArray m(static_cast<Eigen::Index>(p.height), static_cast<Eigen::Index>(p.width));
  for (std::size_t i = 0; i < p.samples.size(); ++i) m.data()[i] = p.samples[i] != 0;
  return BinaryMask(std::move(m));
}

void save_image_pgm16(const Image& image, const std::filesystem::path& path) {
  require(image.allFinite(), ErrorKind::kParameter, "image must be finite");
  const double lo = image.minCoeff();
  const double span = image.maxCoeff() - lo;
  std::vector<unsigned> samples(static_cast<std::size_t>(image.size()));
  for (Eigen::Index i = 0; i < image.size(); ++i) {
    double t = span > 0 ? (image.data()[i] - lo) / span : 0.0;
    samples[static_cast<std::size_t>(i)] = static_cast<unsigned>(std::lround(t * 65535.0));
  }
  write_file_atomic(path, pgm_bytes(static_cast<std::size_t>(image.cols()),
                                    static_cast<std::size_t>(image.rows()), 65535, samples));
}

Image load_image_pgm(const std::filesystem::path& path) {
  PgmData p = parse_pgm(read_file(path));
  Image img(static_cast<Eigen::Index>(p.height), static_cast<Eigen::Index>(p.width));
  for (std::size_t i = 0; i < p.samples.size(); ++i) img.data()[i] = p.samples[i];
  return img;
}

}  // namespace irf

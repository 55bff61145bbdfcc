#ifndef IRFACT_ERROR_HPP_
#define IRFACT_ERROR_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace irf {

// Error categories. The C API maps these one-to-one onto irf_status codes.
enum class ErrorKind {
  kParameter,   // argument outside its documented range
  kDimension,   // shape mismatch between related inputs
  kFormat,      // malformed file content
  kDomain,      // input violates a method's data domain (e.g. negative X for NMF)
  kDegenerate,  // numerically degenerate input (zero variance, no pairs, ...)
  kIo,          // file system failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : Error(ErrorKind::kFormat,
              what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) throw Error(kind, what);
}

}  // namespace irf

#endif  // IRFACT_ERROR_HPP_

#ifndef EMBIAS_ERROR_H_
#define EMBIAS_ERROR_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace embias {

// Base class for every error raised by the library. `kind()` is a short
// machine-readable tag ("parse", "io", "domain", ...) used by the CLI.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string &message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string &kind() const { return kind_; }

 private:
  std::string kind_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string &message) : Error("io", message) {}
};

// Precondition or invariant violated by the caller's data.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string &message) : Error("domain", message) {}
};

class ParseError : public Error {
 public:
  enum class Reason {
    kMalformedHeader,
    kDimensionMismatch,
    kNonFinite,
    kTruncated,
    kCountMismatch,
    kMalformedRecord,
  };

  // `offset` is a 1-based line number for text formats and a byte offset
  // for binary payloads; `offset_is_line` says which.
  ParseError(Reason reason, std::uint64_t offset, bool offset_is_line,
             const std::string &detail);

  Reason reason() const { return reason_; }
  std::uint64_t offset() const { return offset_; }
  bool offset_is_line() const { return offset_is_line_; }
  const std::string &detail() const { return detail_; }

  // Same error with `context` (typically a file name) prefixed to the detail.
  ParseError WithContext(const std::string &context) const {
    return ParseError(reason_, offset_, offset_is_line_,
                      context + (detail_.empty() ? "" : ": " + detail_));
  }

  static const char *ReasonName(Reason reason);

 private:
  Reason reason_;
  std::uint64_t offset_;
  bool offset_is_line_;
  std::string detail_;
};

}  // namespace embias

#endif  // EMBIAS_ERROR_H_

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hopfrc {

/// Error categories. The CLI maps each category to a distinct exit code.
enum class ErrorKind {
  kContract = 2,       // precondition violated by the caller
  kNumericDomain = 3,  // non-finite input to a numeric routine
  kDivergence = 4,     // integration or training produced non-finite values
  kNormalization = 5,  // audio outside [-1, 1] where normalized audio is required
  kParse = 6,          // malformed WAV / CSV / config / checkpoint
  kUnsupported = 7,    // valid request the library does not implement
  kIo = 8,             // filesystem failure
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

/// Integration blew up. Carries the simulated time and, when known, the
/// audio sample index being processed.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, double time, long sample_index = -1)
      : Error(ErrorKind::kDivergence, what), time_(time), sample_index_(sample_index) {}

  double time() const noexcept { return time_; }
  long sample_index() const noexcept { return sample_index_; }

 private:
  double time_;
  long sample_index_;
};

/// Parse failure with the byte offset (or line number for text formats).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(ErrorKind::kParse, what), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::kContract, what);
}

}  // namespace hopfrc

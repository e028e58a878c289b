#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lss {

enum class ErrorKind {
  kInvalidArgument,  // parameter or precondition violation
  kDimension,        // shape mismatch between sequences, bases, schedules
  kFormat,           // malformed LSSB / LSSL / WAV / spec string
  kNumerical,        // degenerate statistics (zero variance, rank deficiency)
  kExternalTool,     // external command failed or produced unreadable output
  kIo,               // file system errors
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` lets callers map
/// failures onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

// Literal messages cost nothing on the success path.
inline void require(bool condition, ErrorKind kind, std::string_view message) {
  if (!condition) fail(kind, std::string(message));
}

}  // namespace lss

#include "lss/error.hpp"

namespace lss {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kDimension: return "dimension";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kNumerical: return "numerical";
    case ErrorKind::kExternalTool: return "external tool";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace lss

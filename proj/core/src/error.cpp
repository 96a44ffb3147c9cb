#include "simscope/error.hpp"

namespace simscope {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid_input";
    case ErrorKind::kShape: return "shape";
    case ErrorKind::kDegenerate: return "degenerate";
    case ErrorKind::kNumerical: return "numerical";
    case ErrorKind::kContract: return "contract";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kConsistency: return "consistency";
  }
  return "unknown";
}

}  // namespace simscope

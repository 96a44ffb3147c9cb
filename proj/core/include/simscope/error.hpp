#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace simscope {

enum class ErrorKind {
  kInvalidInput,
  kShape,
  kDegenerate,
  kNumerical,
  kContract,
  kConfig,
  kFormat,
  kIo,
  kConsistency,
};

/// Stable lowercase identifier, used in machine-readable error lines.
std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// callers (and the CLI exit path) can branch on category without parsing
/// the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace simscope

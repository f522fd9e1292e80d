#pragma once

#include <stdexcept>
#include <string>

namespace rg {

enum class ErrorKind {
  invalid_input,   // precondition violated by caller-supplied data
  schema,          // file or document does not match its format
  missing_series,  // a required input series or file is absent
  unsupported,     // value outside the supported set (e.g. funding interval)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rg

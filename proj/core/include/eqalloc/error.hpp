#pragma once

#include <stdexcept>
#include <string>

namespace eqalloc {

enum class ErrorKind {
  InvalidInput,
  Numerical,
  Instability,
  IsolatedNode,
  Infeasible,
  UnsupportedMetric,
  StepSize,
  NoData,
  Estimation,
  Generation,
  Ingestion,
  Parse,
  Validation,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it to a diagnostic.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace eqalloc

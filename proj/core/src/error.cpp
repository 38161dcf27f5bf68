#include "eqalloc/error.hpp"

namespace eqalloc {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::Numerical: return "numerical error";
    case ErrorKind::Instability: return "instability";
    case ErrorKind::IsolatedNode: return "isolated node";
    case ErrorKind::Infeasible: return "infeasible set";
    case ErrorKind::UnsupportedMetric: return "unsupported metric";
    case ErrorKind::StepSize: return "step size";
    case ErrorKind::NoData: return "no data";
    case ErrorKind::Estimation: return "estimation error";
    case ErrorKind::Generation: return "generation error";
    case ErrorKind::Ingestion: return "ingestion error";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Validation: return "validation error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace eqalloc

#include "mfrc/error.hpp"

namespace mfrc {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyNetwork: return "empty-network";
    case ErrorKind::Format: return "format";
    case ErrorKind::Unscalable: return "unscalable";
    case ErrorKind::NumericalFailure: return "numerical-failure";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::Alignment: return "alignment";
    case ErrorKind::Range: return "range";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Singular: return "singular";
    case ErrorKind::Config: return "config";
    case ErrorKind::Precondition: return "precondition";
  }
  return "unknown";
}

}  // namespace mfrc

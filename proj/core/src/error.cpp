#include "weaklink/error.hpp"

namespace weaklink {

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Schema:
      return 2;
    case ErrorKind::Domain:
    case ErrorKind::ModelValidity:
    case ErrorKind::InsufficientData:
      return 3;
    case ErrorKind::Convergence:
      return 4;
  }
  return 1;
}

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain:
      return "domain";
    case ErrorKind::ModelValidity:
      return "model-validity";
    case ErrorKind::InsufficientData:
      return "insufficient-data";
    case ErrorKind::Schema:
      return "schema";
    case ErrorKind::Convergence:
      return "convergence";
  }
  return "unknown";
}

}  // namespace weaklink

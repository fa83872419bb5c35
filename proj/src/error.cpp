#include "sdefw/error.hpp"

namespace sdefw {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::parameter: return "parameter error";
    case ErrorKind::domain: return "domain error";
    case ErrorKind::singular: return "singular matrix";
    case ErrorKind::numeric_failure: return "numeric failure";
    case ErrorKind::inadmissible_state: return "inadmissible state";
    case ErrorKind::inconclusive: return "inconclusive";
    case ErrorKind::dimension_overflow: return "dimension overflow";
    case ErrorKind::budget: return "budget exceeded";
    case ErrorKind::estimation: return "estimation error";
    case ErrorKind::io: return "i/o error";
    case ErrorKind::usage: return "usage error";
  }
  return "unknown error";
}

}  // namespace sdefw

#include "reception/error.hpp"

namespace reception {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::validation: return "validation";
    case ErrorKind::io: return "io";
    case ErrorKind::parse: return "parse";
    case ErrorKind::capability: return "capability";
    case ErrorKind::transport: return "transport";
    case ErrorKind::protocol: return "protocol";
  }
  return "unknown";
}

}  // namespace reception

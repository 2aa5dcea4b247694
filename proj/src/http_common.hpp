#pragma once

// Internal helpers shared by the HTTP servers. Include after <httplib.h>.

#include <exception>
#include <string>

#include "reception/error.hpp"
#include "reception/wire.hpp"

namespace reception::http {

inline int status_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::validation:
    case ErrorKind::parse:
      return 400;
    case ErrorKind::capability:
      return 501;
    case ErrorKind::transport:
    case ErrorKind::protocol:
      return 502;
    case ErrorKind::io:
      return 500;
  }
  return 500;
}

inline void write_json(httplib::Response& res, int status, const wire::json& body) {
  res.status = status;
  res.set_content(wire::dump(body), "application/json");
}

// Runs `handler` and writes its JSON result, or the error body and status.
template <typename Handler>
void respond(httplib::Response& res, Handler&& handler) {
  try {
    write_json(res, 200, handler());
  } catch (const Error& e) {
    write_json(res, status_for(e), wire::error_body(to_string(e.kind()), e.what()));
  } catch (const std::exception& e) {
    write_json(res, 500, wire::error_body("internal", e.what()));
  }
}

}  // namespace reception::http

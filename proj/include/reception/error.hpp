#pragma once

#include <stdexcept>
#include <string>

namespace reception {

// Failure categories shared across the library. The CLI maps these onto exit
// codes and the HTTP layers onto status codes.
enum class ErrorKind {
  validation,   // bad input value or violated precondition
  io,           // unreadable / unwritable file or stream
  parse,        // malformed serialized content
  capability,   // backend lacks a required capability
  transport,    // backend unreachable or transient server failure
  protocol,     // backend answered, but the answer breaks the contract
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::validation, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorKind::parse, what), position_(0) {}
  ParseError(const std::string& what, std::size_t position)
      : Error(ErrorKind::parse,
              what + " (at offset " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class CapabilityError : public Error {
 public:
  explicit CapabilityError(const std::string& what)
      : Error(ErrorKind::capability, what) {}
};

class TransportError : public Error {
 public:
  TransportError(const std::string& what, int attempts)
      : Error(ErrorKind::transport,
              what + " (after " + std::to_string(attempts) + " attempts)"),
        attempts_(attempts) {}

  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& what)
      : Error(ErrorKind::protocol, what) {}
};

}  // namespace reception

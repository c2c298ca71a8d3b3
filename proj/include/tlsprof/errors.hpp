#pragma once

#include <stdexcept>
#include <string>

namespace tlsprof {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document; the message names the offending field.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed document that breaks a schema rule (duplicate id, bad version).
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Profile or configuration invariant violated where validity is required.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Catalog has no entry for an algorithm identifier.
class CatalogMissError : public Error {
 public:
  explicit CatalogMissError(std::string identifier)
      : Error("catalog has no entry for '" + identifier + "'"),
        identifier_(std::move(identifier)) {}

  const std::string& identifier() const noexcept { return identifier_; }

 private:
  std::string identifier_;
};

/// Observation fed out of timestamp order.
class OrderingError : public Error {
 public:
  using Error::Error;
};

/// Monitor queried before it has enough data.
class NotReadyError : public Error {
 public:
  using Error::Error;
};

/// Invalid simulator, campaign or policy parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Real TLS stack failed the handshake or negotiated something else.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Requested configuration cannot be honored by the linked TLS stack.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tlsprof

#pragma once

// Real-stack calibration anchor: runs a client and a server of the linked
// OpenSSL in one process, wired through memory BIOs, and counts every byte
// crossing that boundary. Counting sits below TLS and above TCP, so the
// numbers are TLS record bytes and match the cost model's transport mode
// "none".
//
// Capture settings: session tickets disabled, middlebox-compatibility mode
// off, one group, one signature algorithm and one cipher suite offered.
//
// Fixture layout: <fixture_dir>/<signature_scheme>/{cert.pem,key.pem}, one
// self-signed certificate per scheme, used by both peers.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tlsprof/errors.hpp"
#include "tlsprof/profile.hpp"

namespace tlsprof {

struct PayloadSpec {
  ByteCount message_bytes = 128;
  int message_count = 2;  // alternating client->server, server->client
};

struct ObservedMessage {
  Direction direction;
  int handshake_type;
  ByteCount length;  // including the 4-byte handshake header
};

struct NegotiatedParams {
  TlsVersion version = TlsVersion::kTls13;
  std::string group;
  std::string cipher_suite;

  bool operator==(const NegotiatedParams&) const = default;
};

struct LoopbackReport {
  ByteCount up_bytes = 0;
  ByteCount down_bytes = 0;
  ByteCount app_up_bytes = 0;
  ByteCount app_down_bytes = 0;
  // Bytes written by each side's transport over the whole session.
  ByteCount client_transport_bytes = 0;
  ByteCount server_transport_bytes = 0;
  NegotiatedParams negotiated;
  bool mismatched = false;
  std::vector<ObservedMessage> messages;
};

/// Raised when the stack negotiated something other than what was asked.
class MismatchError : public ProtocolError {
 public:
  MismatchError(const std::string& what, LoopbackReport report)
      : ProtocolError(what), report_(std::move(report)) {}
  const LoopbackReport& report() const { return report_; }

 private:
  LoopbackReport report_;
};

/// Environment variable overriding the fixture directory.
inline constexpr const char* kFixtureDirEnv = "TLSPROF_FIXTURE_DIR";

std::filesystem::path default_fixture_dir();

class StackAdapter {
 public:
  explicit StackAdapter(std::filesystem::path fixture_dir = default_fixture_dir());

  const std::filesystem::path& fixture_dir() const { return fixture_dir_; }

  /// True iff the linked stack and the fixtures can honor every field of
  /// the config exactly, including the certificate chain sizes.
  bool supports(const TlsConfig& config) const;

  /// Single-certificate chain describing the fixture for a signature
  /// scheme, or nullopt when no fixture exists.
  std::optional<CertChainSpec> fixture_chain(const std::string& scheme) const;

  /// Full handshake plus application exchange. Throws CapabilityError when
  /// !supports(config), ProtocolError on handshake failure and
  /// MismatchError when the negotiated parameters differ from the request.
  LoopbackReport loopback_handshake(const TlsConfig& config,
                                    const PayloadSpec& payload = {}) const;

 private:
  std::filesystem::path fixture_dir_;
};

}  // namespace tlsprof

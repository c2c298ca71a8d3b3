#pragma once

// Analytical handshake byte model. A transcript lists every handshake
// message of a full (or PSK-resumed) handshake with its body size and the
// record-layer bytes spent carrying it; totals per direction follow by
// summation.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tlsprof/json_io.hpp"
#include "tlsprof/profile.hpp"

namespace tlsprof {

struct GroupSizes {
  ByteCount client_share = 0;
  ByteCount server_share = 0;

  bool operator==(const GroupSizes&) const = default;
};

struct SignatureSizes {
  ByteCount max_signature = 0;
  ByteCount public_key = 0;
  // Encoded size of the shipped single self-signed sample certificate.
  ByteCount sample_cert = 0;

  bool operator==(const SignatureSizes&) const = default;
};

struct SuiteOverhead {
  ByteCount aead_tag = 16;
  ByteCount record_header = 5;
  ByteCount explicit_nonce = 0;  // TLS 1.2 AES-GCM carries 8
  ByteCount hash_bytes = 32;     // TLS 1.3 Finished length

  bool operator==(const SuiteOverhead&) const = default;
};

/// Fixed per-message framing, calibrated against OpenSSL 3.0 with one
/// offered group, one signature algorithm, one cipher suite, no session
/// tickets and middlebox compatibility off. "base" values are handshake
/// body bytes excluding the catalog-driven variable parts.
struct FramingTable {
  ByteCount handshake_header = 4;

  // TLS 1.3
  ByteCount tls13_client_hello_base = 100;  // all but the key share
  ByteCount tls13_server_hello_base = 54;
  ByteCount tls13_encrypted_extensions = 2;
  ByteCount tls13_certificate_request = 11;
  ByteCount tls13_certificate_base = 4;      // context + list length
  ByteCount tls13_certificate_per_cert = 5;  // length + extensions
  ByteCount tls13_certificate_verify_base = 4;
  ByteCount tls13_inner_content_type = 1;
  // PSK resumption
  ByteCount tls13_psk_extension_base = 15;  // ext hdr, identity/binder framing
  ByteCount tls13_server_psk_extension = 6;
  ByteCount resumption_ticket = 240;

  // TLS 1.2
  ByteCount tls12_client_hello_base = 77;
  ByteCount tls12_server_hello_base = 89;
  ByteCount tls12_certificate_base = 3;
  ByteCount tls12_certificate_per_cert = 3;
  ByteCount tls12_server_key_exchange_base = 8;  // curve, point len, sigalg
  ByteCount tls12_certificate_request = 8;
  ByteCount tls12_server_hello_done = 0;
  ByteCount tls12_client_key_exchange_base = 1;
  ByteCount tls12_certificate_verify_base = 4;
  ByteCount tls12_finished = 12;
  ByteCount tls12_change_cipher_spec_record = 6;
  ByteCount tls12_session_ticket_extension_base = 4;

  bool operator==(const FramingTable&) const = default;
};

struct AlgoSizeCatalog {
  std::map<std::string, GroupSizes> groups;
  std::map<std::string, SignatureSizes> signatures;
  std::map<std::string, SuiteOverhead> suites;
  FramingTable framing;

  std::optional<GroupSizes> group(const std::string& name) const;
  std::optional<SignatureSizes> signature(const std::string& name) const;
  std::optional<SuiteOverhead> suite(const std::string& name) const;

  bool operator==(const AlgoSizeCatalog&) const = default;
};

/// Shipped catalog: published parameter sizes plus the calibrated framing.
AlgoSizeCatalog builtin_catalog();

/// Catalog override file: {"schema_version", "groups", "signatures",
/// "suites", "framing"}; every section optional, entries replace or extend
/// the builtin ones.
AlgoSizeCatalog load_catalog(const std::filesystem::path& path);
AlgoSizeCatalog catalog_from_json(const Json& doc, AlgoSizeCatalog base);
Json to_json(const AlgoSizeCatalog& c);

/// Single-certificate chain built from the catalog's sample certificate.
CertChainSpec sample_chain(const AlgoSizeCatalog& catalog,
                           const std::string& scheme);

struct TranscriptEntry {
  std::string message_name;
  Direction direction = Direction::kUp;
  ByteCount handshake_body_bytes = 0;  // includes the 4-byte handshake header
  ByteCount record_overhead_bytes = 0;

  ByteCount wire_bytes() const {
    return handshake_body_bytes + record_overhead_bytes;
  }
  bool operator==(const TranscriptEntry&) const = default;
};

struct HandshakeTranscript {
  std::vector<TranscriptEntry> entries;
  ByteCount up_total = 0;
  ByteCount down_total = 0;

  void add(TranscriptEntry e);
  const TranscriptEntry* find(std::string_view message_name,
                              Direction direction) const;
};

/// Throws ValidationError when the config is invalid and CatalogMissError
/// naming the first identifier the catalog lacks.
HandshakeTranscript estimate_transcript(const TlsConfig& config,
                                        const AlgoSizeCatalog& catalog);

std::pair<ByteCount, ByteCount> total_bytes(const HandshakeTranscript& t);

enum class TransportMode { kNone, kTcpIpv4 };

std::string_view to_string(TransportMode m);
std::optional<TransportMode> parse_transport_mode(std::string_view s);

struct TcpModel {
  ByteCount mss = 1400;
  ByteCount header_bytes = 40;  // IPv4 + TCP without options
  int handshake_segments_up = 2;
  int handshake_segments_down = 1;
};

/// Adds transport framing; mode none returns total_bytes unchanged.
std::pair<ByteCount, ByteCount> apply_transport_overhead(
    const HandshakeTranscript& t, TransportMode mode, const TcpModel& tcp = {});

/// CSV dump: message_name,direction,bytes (wire bytes per message).
std::string transcript_csv(const HandshakeTranscript& t);

}  // namespace tlsprof

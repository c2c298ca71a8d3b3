#include "tlsprof/cost_model.hpp"

#include <numeric>
#include <sstream>

#include "tlsprof/errors.hpp"

namespace tlsprof {

namespace {

struct FramingField {
  std::string_view name;
  ByteCount FramingTable::*member;
};

constexpr FramingField kFramingFields[] = {
    {"handshake_header", &FramingTable::handshake_header},
    {"tls13_client_hello_base", &FramingTable::tls13_client_hello_base},
    {"tls13_server_hello_base", &FramingTable::tls13_server_hello_base},
    {"tls13_encrypted_extensions", &FramingTable::tls13_encrypted_extensions},
    {"tls13_certificate_request", &FramingTable::tls13_certificate_request},
    {"tls13_certificate_base", &FramingTable::tls13_certificate_base},
    {"tls13_certificate_per_cert", &FramingTable::tls13_certificate_per_cert},
    {"tls13_certificate_verify_base", &FramingTable::tls13_certificate_verify_base},
    {"tls13_inner_content_type", &FramingTable::tls13_inner_content_type},
    {"tls13_psk_extension_base", &FramingTable::tls13_psk_extension_base},
    {"tls13_server_psk_extension", &FramingTable::tls13_server_psk_extension},
    {"resumption_ticket", &FramingTable::resumption_ticket},
    {"tls12_client_hello_base", &FramingTable::tls12_client_hello_base},
    {"tls12_server_hello_base", &FramingTable::tls12_server_hello_base},
    {"tls12_certificate_base", &FramingTable::tls12_certificate_base},
    {"tls12_certificate_per_cert", &FramingTable::tls12_certificate_per_cert},
    {"tls12_server_key_exchange_base", &FramingTable::tls12_server_key_exchange_base},
    {"tls12_certificate_request", &FramingTable::tls12_certificate_request},
    {"tls12_server_hello_done", &FramingTable::tls12_server_hello_done},
    {"tls12_client_key_exchange_base", &FramingTable::tls12_client_key_exchange_base},
    {"tls12_certificate_verify_base", &FramingTable::tls12_certificate_verify_base},
    {"tls12_finished", &FramingTable::tls12_finished},
    {"tls12_change_cipher_spec_record", &FramingTable::tls12_change_cipher_spec_record},
    {"tls12_session_ticket_extension_base",
     &FramingTable::tls12_session_ticket_extension_base},
};

template <typename Map>
auto find_entry(const Map& m, const std::string& key)
    -> std::optional<typename Map::mapped_type> {
  auto it = m.find(key);
  if (it == m.end()) return std::nullopt;
  return it->second;
}

// Record bytes around one handshake message.
struct RecordCost {
  ByteCount plaintext;  // before keys are installed
  ByteCount encrypted;  // after
};

RecordCost record_cost(const TlsConfig& c, const SuiteOverhead& suite,
                       const FramingTable& f) {
  if (c.version == TlsVersion::kTls13) {
    return {suite.record_header,
            suite.record_header + f.tls13_inner_content_type + suite.aead_tag};
  }
  return {suite.record_header,
          suite.record_header + suite.explicit_nonce + suite.aead_tag};
}

ByteCount chain_bytes(const CertChainSpec& chain, ByteCount per_cert) {
  return std::accumulate(chain.cert_sizes.begin(), chain.cert_sizes.end(),
                         ByteCount{0}, [&](ByteCount acc, ByteCount size) {
                           return acc + size + per_cert;
                         });
}

void tls13_full(HandshakeTranscript& t, const TlsConfig& c,
                const GroupSizes& group, const SignatureSizes& sig,
                const SuiteOverhead& suite, const FramingTable& f) {
  const RecordCost rec = record_cost(c, suite, f);
  const ByteCount hdr = f.handshake_header;
  const ByteCount certificate =
      hdr + f.tls13_certificate_base +
      chain_bytes(c.cert_chain, f.tls13_certificate_per_cert);
  const ByteCount verify = hdr + f.tls13_certificate_verify_base + sig.max_signature;
  const ByteCount finished = hdr + suite.hash_bytes;

  t.add({"ClientHello", Direction::kUp,
         hdr + f.tls13_client_hello_base + group.client_share, rec.plaintext});
  t.add({"ServerHello", Direction::kDown,
         hdr + f.tls13_server_hello_base + group.server_share, rec.plaintext});
  t.add({"EncryptedExtensions", Direction::kDown,
         hdr + f.tls13_encrypted_extensions, rec.encrypted});
  if (c.mutual_auth) {
    t.add({"CertificateRequest", Direction::kDown,
           hdr + f.tls13_certificate_request, rec.encrypted});
  }
  t.add({"Certificate", Direction::kDown, certificate, rec.encrypted});
  t.add({"CertificateVerify", Direction::kDown, verify, rec.encrypted});
  t.add({"Finished", Direction::kDown, finished, rec.encrypted});
  if (c.mutual_auth) {
    t.add({"Certificate", Direction::kUp, certificate, rec.encrypted});
    t.add({"CertificateVerify", Direction::kUp, verify, rec.encrypted});
  }
  t.add({"Finished", Direction::kUp, finished, rec.encrypted});
}

void tls13_resumption(HandshakeTranscript& t, const TlsConfig& c,
                      const GroupSizes& group, const SuiteOverhead& suite,
                      const FramingTable& f) {
  const RecordCost rec = record_cost(c, suite, f);
  const ByteCount hdr = f.handshake_header;
  const ByteCount finished = hdr + suite.hash_bytes;
  t.add({"ClientHello", Direction::kUp,
         hdr + f.tls13_client_hello_base + group.client_share +
             f.tls13_psk_extension_base + f.resumption_ticket + suite.hash_bytes,
         rec.plaintext});
  t.add({"ServerHello", Direction::kDown,
         hdr + f.tls13_server_hello_base + group.server_share +
             f.tls13_server_psk_extension,
         rec.plaintext});
  t.add({"EncryptedExtensions", Direction::kDown,
         hdr + f.tls13_encrypted_extensions, rec.encrypted});
  t.add({"Finished", Direction::kDown, finished, rec.encrypted});
  t.add({"Finished", Direction::kUp, finished, rec.encrypted});
}

// The ChangeCipherSpec record preceding each Finished is charged to that
// Finished entry's record overhead.
void tls12_full(HandshakeTranscript& t, const TlsConfig& c,
                const GroupSizes& group, const SignatureSizes& sig,
                const SuiteOverhead& suite, const FramingTable& f) {
  const RecordCost rec = record_cost(c, suite, f);
  const ByteCount hdr = f.handshake_header;
  const ByteCount certificate =
      hdr + f.tls12_certificate_base +
      chain_bytes(c.cert_chain, f.tls12_certificate_per_cert);
  const ByteCount finished_overhead =
      f.tls12_change_cipher_spec_record + rec.encrypted;

  t.add({"ClientHello", Direction::kUp, hdr + f.tls12_client_hello_base,
         rec.plaintext});
  t.add({"ServerHello", Direction::kDown, hdr + f.tls12_server_hello_base,
         rec.plaintext});
  t.add({"Certificate", Direction::kDown, certificate, rec.plaintext});
  t.add({"ServerKeyExchange", Direction::kDown,
         hdr + f.tls12_server_key_exchange_base + group.server_share +
             sig.max_signature,
         rec.plaintext});
  if (c.mutual_auth) {
    t.add({"CertificateRequest", Direction::kDown,
           hdr + f.tls12_certificate_request, rec.plaintext});
  }
  t.add({"ServerHelloDone", Direction::kDown, hdr + f.tls12_server_hello_done,
         rec.plaintext});
  if (c.mutual_auth) {
    t.add({"Certificate", Direction::kUp, certificate, rec.plaintext});
  }
  t.add({"ClientKeyExchange", Direction::kUp,
         hdr + f.tls12_client_key_exchange_base + group.client_share,
         rec.plaintext});
  if (c.mutual_auth) {
    t.add({"CertificateVerify", Direction::kUp,
           hdr + f.tls12_certificate_verify_base + sig.max_signature,
           rec.plaintext});
  }
  t.add({"Finished", Direction::kUp, hdr + f.tls12_finished, finished_overhead});
  t.add({"Finished", Direction::kDown, hdr + f.tls12_finished,
         finished_overhead});
}

void tls12_resumption(HandshakeTranscript& t, const TlsConfig& c,
                      const SuiteOverhead& suite, const FramingTable& f) {
  const RecordCost rec = record_cost(c, suite, f);
  const ByteCount hdr = f.handshake_header;
  const ByteCount finished_overhead =
      f.tls12_change_cipher_spec_record + rec.encrypted;
  t.add({"ClientHello", Direction::kUp,
         hdr + f.tls12_client_hello_base +
             f.tls12_session_ticket_extension_base + f.resumption_ticket,
         rec.plaintext});
  t.add({"ServerHello", Direction::kDown, hdr + f.tls12_server_hello_base,
         rec.plaintext});
  t.add({"Finished", Direction::kDown, hdr + f.tls12_finished,
         finished_overhead});
  t.add({"Finished", Direction::kUp, hdr + f.tls12_finished, finished_overhead});
}

}  // namespace

std::optional<GroupSizes> AlgoSizeCatalog::group(const std::string& name) const {
  return find_entry(groups, name);
}

std::optional<SignatureSizes> AlgoSizeCatalog::signature(
    const std::string& name) const {
  return find_entry(signatures, name);
}

std::optional<SuiteOverhead> AlgoSizeCatalog::suite(
    const std::string& name) const {
  return find_entry(suites, name);
}

AlgoSizeCatalog builtin_catalog() {
  AlgoSizeCatalog c;
  // Key shares: raw X25519 keys, uncompressed SEC1 points, ML-KEM-768
  // encapsulation key / ciphertext, and their concatenation for the hybrid.
  c.groups = {
      {"x25519", {32, 32}},
      {"secp256r1", {65, 65}},
      {"brainpoolP256r1", {65, 65}},
      {"secp384r1", {97, 97}},
      {"secp521r1", {133, 133}},
      {"mlkem768", {1184, 1088}},
      {"x25519_mlkem768_hybrid", {32 + 1184, 32 + 1088}},
  };
  // ECDSA signatures at their DER maximum. Sample certificates are the
  // committed self-signed fixtures; the ML-DSA-65 one is sized from its key
  // and signature plus the fixture metadata (no stack here can mint it).
  c.signatures = {
      {"ed25519", {64, 32, 334}},
      {"ecdsa_p256", {72, 65, 404}},
      {"ecdsa_p384", {104, 97, 466}},
      {"ecdsa_p521", {139, 133, 541}},
      {"rsa2048", {256, 256, 795}},
      {"mldsa65", {3309, 1952, 5524}},
  };
  c.suites = {
      {"TLS_AES_128_GCM_SHA256", {16, 5, 0, 32}},
      {"TLS_AES_256_GCM_SHA384", {16, 5, 0, 48}},
      {"TLS_CHACHA20_POLY1305_SHA256", {16, 5, 0, 32}},
      {"TLS_ECDHE_ECDSA_WITH_AES_128_GCM_SHA256", {16, 5, 8, 32}},
      {"TLS_ECDHE_ECDSA_WITH_AES_256_GCM_SHA384", {16, 5, 8, 48}},
      {"TLS_ECDHE_ECDSA_WITH_CHACHA20_POLY1305_SHA256", {16, 5, 0, 32}},
      {"TLS_ECDHE_RSA_WITH_AES_128_GCM_SHA256", {16, 5, 8, 32}},
      {"TLS_ECDHE_RSA_WITH_AES_256_GCM_SHA384", {16, 5, 8, 48}},
  };
  return c;
}

CertChainSpec sample_chain(const AlgoSizeCatalog& catalog,
                           const std::string& scheme) {
  const auto sig = catalog.signature(scheme);
  if (!sig) throw CatalogMissError(scheme);
  CertChainSpec chain;
  chain.chain_length = 1;
  chain.cert_sizes = {sig->sample_cert};
  chain.leaf_key_algorithm = scheme;
  return chain;
}

void HandshakeTranscript::add(TranscriptEntry e) {
  (e.direction == Direction::kUp ? up_total : down_total) += e.wire_bytes();
  entries.push_back(std::move(e));
}

const TranscriptEntry* HandshakeTranscript::find(std::string_view message_name,
                                                 Direction direction) const {
  for (const auto& e : entries) {
    if (e.message_name == message_name && e.direction == direction) return &e;
  }
  return nullptr;
}

HandshakeTranscript estimate_transcript(const TlsConfig& config,
                                        const AlgoSizeCatalog& catalog) {
  if (const auto violations = validate_config(config); !violations.empty()) {
    throw ValidationError(violations.front().field + ": " +
                          violations.front().message);
  }
  const auto group = catalog.group(config.key_exchange);
  if (!group) throw CatalogMissError(config.key_exchange);
  const auto sig = catalog.signature(config.signature_scheme);
  if (!sig) throw CatalogMissError(config.signature_scheme);
  const auto suite = catalog.suite(config.cipher_suite);
  if (!suite) throw CatalogMissError(config.cipher_suite);

  HandshakeTranscript t;
  const FramingTable& f = catalog.framing;
  const bool resumed = config.resumption == Resumption::kPskResumption;
  if (config.version == TlsVersion::kTls13) {
    if (resumed) {
      tls13_resumption(t, config, *group, *suite, f);
    } else {
      tls13_full(t, config, *group, *sig, *suite, f);
    }
  } else {
    if (resumed) {
      tls12_resumption(t, config, *suite, f);
    } else {
      tls12_full(t, config, *group, *sig, *suite, f);
    }
  }
  return t;
}

std::pair<ByteCount, ByteCount> total_bytes(const HandshakeTranscript& t) {
  ByteCount up = 0;
  ByteCount down = 0;
  for (const auto& e : t.entries) {
    (e.direction == Direction::kUp ? up : down) += e.wire_bytes();
  }
  return {up, down};
}

std::string_view to_string(TransportMode m) {
  return m == TransportMode::kNone ? "none" : "tcp_ipv4";
}

std::optional<TransportMode> parse_transport_mode(std::string_view s) {
  if (s == "none") return TransportMode::kNone;
  if (s == "tcp_ipv4") return TransportMode::kTcpIpv4;
  return std::nullopt;
}

std::pair<ByteCount, ByteCount> apply_transport_overhead(
    const HandshakeTranscript& t, TransportMode mode, const TcpModel& tcp) {
  auto [up, down] = total_bytes(t);
  if (mode == TransportMode::kNone) return {up, down};
  auto segments = [&](ByteCount bytes) {
    return (bytes + tcp.mss - 1) / tcp.mss;
  };
  const ByteCount up_segments =
      segments(up) + static_cast<ByteCount>(tcp.handshake_segments_up);
  const ByteCount down_segments =
      segments(down) + static_cast<ByteCount>(tcp.handshake_segments_down);
  return {up + up_segments * tcp.header_bytes,
          down + down_segments * tcp.header_bytes};
}

std::string transcript_csv(const HandshakeTranscript& t) {
  std::ostringstream out;
  out << "message_name,direction,bytes\n";
  for (const auto& e : t.entries) {
    out << e.message_name << ',' << to_string(e.direction) << ','
        << e.wire_bytes() << '\n';
  }
  return out.str();
}

Json to_json(const AlgoSizeCatalog& c) {
  Json groups = Json::object();
  for (const auto& [name, g] : c.groups) {
    groups[name] = {{"client_keyshare_bytes", g.client_share},
                    {"server_keyshare_bytes", g.server_share}};
  }
  Json sigs = Json::object();
  for (const auto& [name, s] : c.signatures) {
    sigs[name] = {{"max_signature_bytes", s.max_signature},
                  {"public_key_bytes", s.public_key},
                  {"sample_cert_bytes", s.sample_cert}};
  }
  Json suites = Json::object();
  for (const auto& [name, s] : c.suites) {
    suites[name] = {{"aead_tag_bytes", s.aead_tag},
                    {"record_header_bytes", s.record_header},
                    {"explicit_nonce_bytes", s.explicit_nonce},
                    {"hash_bytes", s.hash_bytes}};
  }
  Json framing = Json::object();
  for (const auto& field : kFramingFields) {
    framing[std::string(field.name)] = c.framing.*field.member;
  }
  return Json{{"schema_version", kSchemaVersion},
              {"groups", groups},
              {"signatures", sigs},
              {"suites", suites},
              {"framing", framing}};
}

AlgoSizeCatalog catalog_from_json(const Json& doc, AlgoSizeCatalog base) {
  const JsonReader root(doc, "");
  root.expect_object({"schema_version", "groups", "signatures", "suites",
                      "framing"});
  check_schema_version(root);

  auto positive = [](const JsonReader& r, std::string_view key) {
    const ByteCount v = r.get_bytes(key);
    if (v == 0) r.fail(key, "must be > 0");
    return v;
  };

  // Sections are maps keyed by identifier; the entries themselves are strict.
  auto each = [&](std::string_view name, auto&& fn) {
    if (!root.has(name)) return;
    const JsonReader section = root.child(name);
    if (!section.node().is_object()) root.fail(name, "expected object");
    for (const auto& item : section.node().items()) {
      fn(item.key(), JsonReader(item.value(), section.child_path(item.key())));
    }
  };
  each("groups", [&](const std::string& key, const JsonReader& r) {
    r.expect_object({"client_keyshare_bytes", "server_keyshare_bytes"});
    base.groups[key] = {positive(r, "client_keyshare_bytes"),
                        positive(r, "server_keyshare_bytes")};
  });
  each("signatures", [&](const std::string& key, const JsonReader& r) {
    r.expect_object(
        {"max_signature_bytes", "public_key_bytes", "sample_cert_bytes"});
    base.signatures[key] = {positive(r, "max_signature_bytes"),
                            positive(r, "public_key_bytes"),
                            positive(r, "sample_cert_bytes")};
  });
  each("suites", [&](const std::string& key, const JsonReader& r) {
    r.expect_object({"aead_tag_bytes", "record_header_bytes",
                     "explicit_nonce_bytes", "hash_bytes"});
    base.suites[key] = {positive(r, "aead_tag_bytes"),
                        positive(r, "record_header_bytes"),
                        r.get_bytes("explicit_nonce_bytes"),
                        positive(r, "hash_bytes")};
  });
  if (root.has("framing")) {
    const JsonReader r = root.child("framing");
    if (!r.node().is_object()) root.fail("framing", "expected object");
    for (const auto& item : r.node().items()) {
      bool known = false;
      for (const auto& field : kFramingFields) {
        if (field.name == item.key()) {
          base.framing.*field.member = r.get_bytes(item.key());
          known = true;
        }
      }
      if (!known) r.fail(item.key(), "unknown field");
    }
  }
  return base;
}

AlgoSizeCatalog load_catalog(const std::filesystem::path& path) {
  const Json doc = read_json_file(path);
  try {
    return catalog_from_json(doc, builtin_catalog());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace tlsprof

#include "tlsprof/algorithms.hpp"

#include <algorithm>

namespace tlsprof {

std::string_view to_string(TlsVersion v) {
  return v == TlsVersion::kTls12 ? "TLS1_2" : "TLS1_3";
}

std::optional<TlsVersion> parse_tls_version(std::string_view s) {
  if (s == "TLS1_2") return TlsVersion::kTls12;
  if (s == "TLS1_3") return TlsVersion::kTls13;
  return std::nullopt;
}

// Hybrid and pure ML-KEM groups are rated by their strongest component
// (ML-KEM-768 is NIST category 3).
const std::vector<GroupInfo>& known_groups() {
  static const std::vector<GroupInfo> groups = {
      {"x25519", GroupKind::kClassical, 128},
      {"secp256r1", GroupKind::kClassical, 128},
      {"brainpoolP256r1", GroupKind::kClassical, 128},
      {"secp384r1", GroupKind::kClassical, 192},
      {"secp521r1", GroupKind::kClassical, 256},
      {"mlkem768", GroupKind::kPostQuantum, 192},
      {"x25519_mlkem768_hybrid", GroupKind::kHybrid, 192},
  };
  return groups;
}

const std::vector<SignatureInfo>& known_signatures() {
  static const std::vector<SignatureInfo> sigs = {
      {"ed25519", false, 128},    {"ecdsa_p256", false, 128},
      {"ecdsa_p384", false, 192}, {"ecdsa_p521", false, 256},
      {"rsa2048", false, 112},    {"mldsa65", true, 192},
  };
  return sigs;
}

const std::vector<CipherSuiteInfo>& known_cipher_suites() {
  static const std::vector<CipherSuiteInfo> suites = {
      {"TLS_AES_128_GCM_SHA256", TlsVersion::kTls13, 128, SuiteAuth::kAny},
      {"TLS_AES_256_GCM_SHA384", TlsVersion::kTls13, 256, SuiteAuth::kAny},
      {"TLS_CHACHA20_POLY1305_SHA256", TlsVersion::kTls13, 256, SuiteAuth::kAny},
      {"TLS_ECDHE_ECDSA_WITH_AES_128_GCM_SHA256", TlsVersion::kTls12, 128, SuiteAuth::kEcdsa},
      {"TLS_ECDHE_ECDSA_WITH_AES_256_GCM_SHA384", TlsVersion::kTls12, 256, SuiteAuth::kEcdsa},
      {"TLS_ECDHE_ECDSA_WITH_CHACHA20_POLY1305_SHA256", TlsVersion::kTls12, 256, SuiteAuth::kEcdsa},
      {"TLS_ECDHE_RSA_WITH_AES_128_GCM_SHA256", TlsVersion::kTls12, 128, SuiteAuth::kRsa},
      {"TLS_ECDHE_RSA_WITH_AES_256_GCM_SHA384", TlsVersion::kTls12, 256, SuiteAuth::kRsa},
  };
  return suites;
}

namespace {

template <typename T>
const T* find_by_name(const std::vector<T>& table, std::string_view name) {
  auto it = std::find_if(table.begin(), table.end(),
                         [&](const T& e) { return e.name == name; });
  return it == table.end() ? nullptr : &*it;
}

}  // namespace

const GroupInfo* find_group(std::string_view name) {
  return find_by_name(known_groups(), name);
}

const SignatureInfo* find_signature(std::string_view name) {
  return find_by_name(known_signatures(), name);
}

const CipherSuiteInfo* find_cipher_suite(std::string_view name) {
  return find_by_name(known_cipher_suites(), name);
}

bool is_valid_security_bits(int bits) {
  return bits == 112 || bits == 128 || bits == 192 || bits == 256;
}

}  // namespace tlsprof

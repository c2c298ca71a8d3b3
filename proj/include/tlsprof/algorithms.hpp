#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tlsprof {

enum class TlsVersion { kTls12, kTls13 };

std::string_view to_string(TlsVersion v);
std::optional<TlsVersion> parse_tls_version(std::string_view s);

enum class GroupKind { kClassical, kPostQuantum, kHybrid };

struct GroupInfo {
  std::string_view name;
  GroupKind kind;
  int classical_bits;
};

struct SignatureInfo {
  std::string_view name;
  bool post_quantum;
  int classical_bits;
};

// TLS 1.2 suites pin the certificate type; TLS 1.3 suites do not.
enum class SuiteAuth { kAny, kEcdsa, kRsa };

struct CipherSuiteInfo {
  std::string_view name;
  TlsVersion version;
  int classical_bits;
  SuiteAuth auth;
};

// Registry of identifiers the toolkit understands. Sizes live in the
// AlgoSizeCatalog; this table carries only classification and strength.
const GroupInfo* find_group(std::string_view name);
const SignatureInfo* find_signature(std::string_view name);
const CipherSuiteInfo* find_cipher_suite(std::string_view name);

const std::vector<GroupInfo>& known_groups();
const std::vector<SignatureInfo>& known_signatures();
const std::vector<CipherSuiteInfo>& known_cipher_suites();

inline bool is_pq_or_hybrid(GroupKind k) { return k != GroupKind::kClassical; }

bool is_valid_security_bits(int bits);

}  // namespace tlsprof

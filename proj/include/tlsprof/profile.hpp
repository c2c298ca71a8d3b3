#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tlsprof/algorithms.hpp"

namespace tlsprof {

using ByteCount = std::uint64_t;

enum class Direction { kUp, kDown };  // up = client to server

std::string_view to_string(Direction d);

enum class Resumption { kNone, kPskResumption };

std::string_view to_string(Resumption r);
std::optional<Resumption> parse_resumption(std::string_view s);

struct CertChainSpec {
  int chain_length = 1;
  std::vector<ByteCount> cert_sizes;  // leaf first
  std::string leaf_key_algorithm;

  bool operator==(const CertChainSpec&) const = default;
};

struct TlsConfig {
  TlsVersion version = TlsVersion::kTls13;
  std::string key_exchange;
  std::string signature_scheme;
  std::string cipher_suite;
  bool mutual_auth = true;
  Resumption resumption = Resumption::kNone;
  CertChainSpec cert_chain;

  bool operator==(const TlsConfig&) const = default;
};

// Optional dimensions stay empty when unmeasured; they are never zero-filled.
struct OverheadVector {
  ByteCount handshake_bytes_up = 0;
  ByteCount handshake_bytes_down = 0;
  std::optional<double> est_cpu_ms;
  std::optional<double> est_mem_kb;
  std::optional<double> est_energy_mj;

  ByteCount total() const { return handshake_bytes_up + handshake_bytes_down; }
  bool operator==(const OverheadVector&) const = default;
};

struct SecurityLevel {
  int classical_bits = 128;
  bool pq_secure = false;

  bool operator==(const SecurityLevel&) const = default;
};

struct Profile {
  std::string id;
  TlsConfig config;
  OverheadVector overhead;
  SecurityLevel security;

  bool operator==(const Profile&) const = default;
};

struct Violation {
  std::string field;
  std::string message;

  bool operator==(const Violation&) const = default;
};

/// Every invariant violation of the profile, in a fixed order. Never throws.
std::vector<Violation> validate_profile(const Profile& p);

/// Config-only subset of validate_profile (used where no profile exists yet).
std::vector<Violation> validate_config(const TlsConfig& c);

/// Security level implied by the algorithm registry: the weakest of key
/// exchange, signature and cipher strength; pq_secure iff the group is PQ
/// or hybrid. Throws ValidationError for unknown identifiers.
SecurityLevel derive_security_level(const TlsConfig& c);

/// Immutable, id-ordered set of profiles.
class ProfileStore {
 public:
  static constexpr int kSchemaVersion = 1;

  ProfileStore() = default;
  /// Sorts by id; throws SchemaError on duplicate ids.
  explicit ProfileStore(std::vector<Profile> profiles,
                        int schema_version = kSchemaVersion);

  const std::vector<Profile>& profiles() const { return profiles_; }
  int schema_version() const { return schema_version_; }
  bool empty() const { return profiles_.empty(); }
  std::size_t size() const { return profiles_.size(); }
  const Profile* find(std::string_view id) const;

  bool operator==(const ProfileStore&) const = default;

 private:
  std::vector<Profile> profiles_;
  int schema_version_ = kSchemaVersion;
};

ProfileStore load_store(const std::filesystem::path& path);
void save_store(const ProfileStore& store, const std::filesystem::path& path);

/// Security comparison used for dominance: componentwise on
/// (classical_bits, pq_secure).
bool security_at_least(const SecurityLevel& a, const SecurityLevel& b);

/// True if a dominates b: at least as secure, no more bytes, one strict.
bool dominates(const Profile& a, const Profile& b);

/// Removes every dominated profile. Output is a subset of the input and is
/// never empty for a non-empty input.
ProfileStore prune_dominated(const ProfileStore& store);

}  // namespace tlsprof

#include "tlsprof/profile.hpp"

#include <algorithm>
#include <set>

#include "tlsprof/errors.hpp"
#include "tlsprof/json_io.hpp"

namespace tlsprof {

std::string_view to_string(Direction d) {
  return d == Direction::kUp ? "up" : "down";
}

std::string_view to_string(Resumption r) {
  return r == Resumption::kNone ? "none" : "psk_resumption";
}

std::optional<Resumption> parse_resumption(std::string_view s) {
  if (s == "none") return Resumption::kNone;
  if (s == "psk_resumption") return Resumption::kPskResumption;
  return std::nullopt;
}

namespace {

bool suite_accepts_signature(SuiteAuth auth, std::string_view sig) {
  switch (auth) {
    case SuiteAuth::kAny:
      return true;
    case SuiteAuth::kEcdsa:
      return sig.starts_with("ecdsa_") || sig == "ed25519";
    case SuiteAuth::kRsa:
      return sig.starts_with("rsa");
  }
  return false;
}

void check_config(const TlsConfig& c, const std::string& prefix,
                  std::vector<Violation>& out) {
  auto add = [&](std::string field, std::string message) {
    out.push_back({prefix + std::move(field), std::move(message)});
  };

  const GroupInfo* group = find_group(c.key_exchange);
  const SignatureInfo* sig = find_signature(c.signature_scheme);
  const CipherSuiteInfo* suite = find_cipher_suite(c.cipher_suite);

  if (group == nullptr) {
    add("key_exchange", "unknown key_exchange '" + c.key_exchange + "'");
  } else if (is_pq_or_hybrid(group->kind) && c.version != TlsVersion::kTls13) {
    add("key_exchange", "PQ group requires TLS1_3");
  }

  if (sig == nullptr) {
    add("signature_scheme",
        "unknown signature_scheme '" + c.signature_scheme + "'");
  } else if (sig->post_quantum && c.version != TlsVersion::kTls13) {
    add("signature_scheme", "PQ signature requires TLS1_3");
  }

  if (suite == nullptr) {
    add("cipher_suite", "unknown cipher_suite '" + c.cipher_suite + "'");
  } else {
    if (suite->version != c.version) {
      add("cipher_suite", "cipher_suite " + c.cipher_suite +
                              " not valid for " +
                              std::string(to_string(c.version)));
    }
    if (sig != nullptr && !suite_accepts_signature(suite->auth, sig->name)) {
      add("cipher_suite", "cipher_suite " + c.cipher_suite +
                              " incompatible with signature_scheme " +
                              c.signature_scheme);
    }
  }

  const CertChainSpec& chain = c.cert_chain;
  if (chain.chain_length < 1) {
    add("cert_chain.chain_length", "chain_length must be >= 1");
  }
  if (chain.chain_length >= 0 &&
      static_cast<std::size_t>(chain.chain_length) != chain.cert_sizes.size()) {
    add("cert_chain.cert_sizes",
        "chain_length " + std::to_string(chain.chain_length) +
            " does not match " + std::to_string(chain.cert_sizes.size()) +
            " size entries");
  }
  if (std::any_of(chain.cert_sizes.begin(), chain.cert_sizes.end(),
                  [](ByteCount b) { return b == 0; })) {
    add("cert_chain.cert_sizes", "certificate sizes must be > 0");
  }
  if (chain.leaf_key_algorithm != c.signature_scheme) {
    add("cert_chain.leaf_key_algorithm",
        "leaf key algorithm '" + chain.leaf_key_algorithm +
            "' inconsistent with signature_scheme '" + c.signature_scheme +
            "'");
  }
}

}  // namespace

std::vector<Violation> validate_config(const TlsConfig& c) {
  std::vector<Violation> out;
  check_config(c, "config.", out);
  return out;
}

std::vector<Violation> validate_profile(const Profile& p) {
  std::vector<Violation> out;
  if (p.id.empty()) out.push_back({"id", "id must be non-empty"});
  check_config(p.config, "config.", out);
  if (!is_valid_security_bits(p.security.classical_bits)) {
    out.push_back({"security.classical_bits",
                   "classical_bits " +
                       std::to_string(p.security.classical_bits) +
                       " not in {112, 128, 192, 256}"});
  }
  const GroupInfo* group = find_group(p.config.key_exchange);
  if (p.security.pq_secure && (group == nullptr || !is_pq_or_hybrid(group->kind))) {
    out.push_back({"security.pq_secure", "pq_secure requires PQ/hybrid group"});
  }
  return out;
}

SecurityLevel derive_security_level(const TlsConfig& c) {
  const GroupInfo* group = find_group(c.key_exchange);
  const SignatureInfo* sig = find_signature(c.signature_scheme);
  const CipherSuiteInfo* suite = find_cipher_suite(c.cipher_suite);
  if (group == nullptr) {
    throw ValidationError("unknown key_exchange '" + c.key_exchange + "'");
  }
  if (sig == nullptr) {
    throw ValidationError("unknown signature_scheme '" + c.signature_scheme +
                          "'");
  }
  if (suite == nullptr) {
    throw ValidationError("unknown cipher_suite '" + c.cipher_suite + "'");
  }
  SecurityLevel s;
  s.classical_bits = std::min({group->classical_bits, sig->classical_bits,
                               suite->classical_bits});
  s.pq_secure = is_pq_or_hybrid(group->kind);
  return s;
}

ProfileStore::ProfileStore(std::vector<Profile> profiles, int schema_version)
    : profiles_(std::move(profiles)), schema_version_(schema_version) {
  std::sort(profiles_.begin(), profiles_.end(),
            [](const Profile& a, const Profile& b) { return a.id < b.id; });
  auto dup = std::adjacent_find(
      profiles_.begin(), profiles_.end(),
      [](const Profile& a, const Profile& b) { return a.id == b.id; });
  if (dup != profiles_.end()) {
    throw SchemaError("duplicate profile id '" + dup->id + "'");
  }
}

const Profile* ProfileStore::find(std::string_view id) const {
  auto it = std::lower_bound(
      profiles_.begin(), profiles_.end(), id,
      [](const Profile& p, std::string_view key) { return p.id < key; });
  return (it != profiles_.end() && it->id == id) ? &*it : nullptr;
}

ProfileStore load_store(const std::filesystem::path& path) {
  const Json doc = read_json_file(path);
  try {
    return store_from_json(doc);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void save_store(const ProfileStore& store, const std::filesystem::path& path) {
  write_json_file(to_json(store), path);
}

bool security_at_least(const SecurityLevel& a, const SecurityLevel& b) {
  return a.classical_bits >= b.classical_bits && (a.pq_secure || !b.pq_secure);
}

bool dominates(const Profile& a, const Profile& b) {
  if (!security_at_least(a.security, b.security)) return false;
  const ByteCount ta = a.overhead.total();
  const ByteCount tb = b.overhead.total();
  if (ta > tb) return false;
  return ta < tb || a.security != b.security;
}

ProfileStore prune_dominated(const ProfileStore& store) {
  const auto& all = store.profiles();
  std::vector<Profile> kept;
  kept.reserve(all.size());
  // Sort candidates so potential dominators come first: strongest security,
  // then fewest bytes. A profile can only be dominated by one that sorts
  // before it, and dominance is transitive, so comparing against the kept
  // frontier is sufficient.
  std::vector<const Profile*> order;
  order.reserve(all.size());
  for (const auto& p : all) order.push_back(&p);
  std::stable_sort(order.begin(), order.end(),
                   [](const Profile* a, const Profile* b) {
                     if (a->security.pq_secure != b->security.pq_secure) {
                       return a->security.pq_secure;
                     }
                     if (a->security.classical_bits !=
                         b->security.classical_bits) {
                       return a->security.classical_bits >
                              b->security.classical_bits;
                     }
                     return a->overhead.total() < b->overhead.total();
                   });
  std::vector<const Profile*> frontier;
  for (const Profile* p : order) {
    const bool dominated =
        std::any_of(frontier.begin(), frontier.end(),
                    [&](const Profile* f) { return dominates(*f, *p); });
    if (!dominated) frontier.push_back(p);
  }
  for (const Profile* p : frontier) kept.push_back(*p);
  return ProfileStore(std::move(kept), store.schema_version());
}

}  // namespace tlsprof

#include "tlsprof/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

#include "tlsprof/errors.hpp"

namespace tlsprof {

JsonReader::JsonReader(const Json& node, std::string path)
    : node_(node), path_(std::move(path)) {}

std::string JsonReader::child_path(std::string_view key) const {
  if (path_.empty()) return std::string(key);
  return path_ + "." + std::string(key);
}

void JsonReader::fail(std::string_view key, std::string_view what) const {
  const std::string where = key.empty() ? (path_.empty() ? "<root>" : path_)
                                        : child_path(key);
  throw ParseError(where + ": " + std::string(what));
}

void JsonReader::expect_object(
    std::initializer_list<std::string_view> allowed) const {
  if (!node_.is_object()) fail("", "expected object");
  for (const auto& item : node_.items()) {
    const bool known = std::find(allowed.begin(), allowed.end(), item.key()) !=
                       allowed.end();
    if (!known) fail(item.key(), "unknown field");
  }
}

bool JsonReader::has(std::string_view key) const {
  return node_.is_object() && node_.contains(key);
}

const Json& JsonReader::at(std::string_view key) const {
  if (!has(key)) fail(key, "missing required field");
  return node_.at(std::string(key));
}

JsonReader JsonReader::child(std::string_view key) const {
  return JsonReader(at(key), child_path(key));
}

std::string JsonReader::get_string(std::string_view key) const {
  const Json& v = at(key);
  if (!v.is_string()) fail(key, "expected string");
  return v.get<std::string>();
}

bool JsonReader::get_bool(std::string_view key) const {
  const Json& v = at(key);
  if (!v.is_boolean()) fail(key, "expected boolean");
  return v.get<bool>();
}

std::int64_t JsonReader::get_int(std::string_view key) const {
  const Json& v = at(key);
  if (!v.is_number_integer()) fail(key, "expected integer");
  return v.get<std::int64_t>();
}

ByteCount JsonReader::get_bytes(std::string_view key) const {
  const Json& v = at(key);
  if (v.is_number_unsigned()) return v.get<ByteCount>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return static_cast<ByteCount>(v.get<std::int64_t>());
  }
  fail(key, "expected non-negative integer byte count");
}

double JsonReader::get_number(std::string_view key) const {
  const Json& v = at(key);
  if (!v.is_number()) fail(key, "expected number");
  return v.get<double>();
}

std::optional<double> JsonReader::get_optional_number(
    std::string_view key) const {
  if (!has(key) || node_.at(std::string(key)).is_null()) return std::nullopt;
  return get_number(key);
}

std::optional<ByteCount> JsonReader::get_optional_bytes(
    std::string_view key) const {
  if (!has(key) || node_.at(std::string(key)).is_null()) return std::nullopt;
  return get_bytes(key);
}

void check_schema_version(const JsonReader& doc) {
  const auto version = doc.get_int("schema_version");
  if (version != kSchemaVersion) {
    throw SchemaError(doc.child_path("schema_version") + ": unsupported " +
                      std::to_string(version) + " (expected " +
                      std::to_string(kSchemaVersion) + ")");
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_json_file(const Json& doc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

Json to_json(const CertChainSpec& c) {
  return Json{{"chain_length", c.chain_length},
              {"cert_sizes", c.cert_sizes},
              {"leaf_key_algorithm", c.leaf_key_algorithm}};
}

Json to_json(const TlsConfig& c) {
  return Json{{"version", to_string(c.version)},
              {"key_exchange", c.key_exchange},
              {"signature_scheme", c.signature_scheme},
              {"cipher_suite", c.cipher_suite},
              {"mutual_auth", c.mutual_auth},
              {"resumption", to_string(c.resumption)},
              {"cert_chain", to_json(c.cert_chain)}};
}

Json to_json(const OverheadVector& o) {
  Json j{{"handshake_bytes_up", o.handshake_bytes_up},
         {"handshake_bytes_down", o.handshake_bytes_down}};
  if (o.est_cpu_ms) j["est_cpu_ms"] = *o.est_cpu_ms;
  if (o.est_mem_kb) j["est_mem_kb"] = *o.est_mem_kb;
  if (o.est_energy_mj) j["est_energy_mj"] = *o.est_energy_mj;
  return j;
}

Json to_json(const SecurityLevel& s) {
  return Json{{"classical_bits", s.classical_bits}, {"pq_secure", s.pq_secure}};
}

Json to_json(const Profile& p) {
  return Json{{"id", p.id},
              {"config", to_json(p.config)},
              {"overhead", to_json(p.overhead)},
              {"security", to_json(p.security)}};
}

Json to_json(const ProfileStore& s) {
  Json profiles = Json::array();
  for (const auto& p : s.profiles()) profiles.push_back(to_json(p));
  return Json{{"schema_version", s.schema_version()}, {"profiles", profiles}};
}

CertChainSpec cert_chain_from_json(const JsonReader& r) {
  r.expect_object({"chain_length", "cert_sizes", "leaf_key_algorithm"});
  CertChainSpec c;
  const auto length = r.get_int("chain_length");
  if (length < 0 || length > std::numeric_limits<int>::max()) {
    r.fail("chain_length", "out of range");
  }
  c.chain_length = static_cast<int>(length);
  const JsonReader sizes = r.child("cert_sizes");
  if (!sizes.node().is_array()) r.fail("cert_sizes", "expected array");
  for (std::size_t i = 0; i < sizes.node().size(); ++i) {
    const Json& v = sizes.node()[i];
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
      throw ParseError(sizes.path() + "[" + std::to_string(i) +
                       "]: expected non-negative integer byte count");
    }
    c.cert_sizes.push_back(v.get<ByteCount>());
  }
  c.leaf_key_algorithm = r.get_string("leaf_key_algorithm");
  return c;
}

TlsConfig tls_config_from_json(const JsonReader& r) {
  r.expect_object({"version", "key_exchange", "signature_scheme",
                   "cipher_suite", "mutual_auth", "resumption", "cert_chain"});
  TlsConfig c;
  const auto version = parse_tls_version(r.get_string("version"));
  if (!version) r.fail("version", "expected \"TLS1_2\" or \"TLS1_3\"");
  c.version = *version;
  c.key_exchange = r.get_string("key_exchange");
  c.signature_scheme = r.get_string("signature_scheme");
  c.cipher_suite = r.get_string("cipher_suite");
  c.mutual_auth = r.get_bool("mutual_auth");
  const auto resumption = parse_resumption(r.get_string("resumption"));
  if (!resumption) {
    r.fail("resumption", "expected \"none\" or \"psk_resumption\"");
  }
  c.resumption = *resumption;
  c.cert_chain = cert_chain_from_json(r.child("cert_chain"));
  return c;
}

OverheadVector overhead_from_json(const JsonReader& r) {
  r.expect_object({"handshake_bytes_up", "handshake_bytes_down", "est_cpu_ms",
                   "est_mem_kb", "est_energy_mj"});
  OverheadVector o;
  o.handshake_bytes_up = r.get_bytes("handshake_bytes_up");
  o.handshake_bytes_down = r.get_bytes("handshake_bytes_down");
  o.est_cpu_ms = r.get_optional_number("est_cpu_ms");
  o.est_mem_kb = r.get_optional_number("est_mem_kb");
  o.est_energy_mj = r.get_optional_number("est_energy_mj");
  return o;
}

SecurityLevel security_from_json(const JsonReader& r) {
  r.expect_object({"classical_bits", "pq_secure"});
  SecurityLevel s;
  s.classical_bits = static_cast<int>(r.get_int("classical_bits"));
  s.pq_secure = r.get_bool("pq_secure");
  return s;
}

Profile profile_from_json(const JsonReader& r) {
  r.expect_object({"id", "config", "overhead", "security"});
  Profile p;
  p.id = r.get_string("id");
  p.config = tls_config_from_json(r.child("config"));
  p.overhead = overhead_from_json(r.child("overhead"));
  p.security = security_from_json(r.child("security"));
  return p;
}

ProfileStore store_from_json(const Json& doc) {
  const JsonReader root(doc, "");
  root.expect_object({"schema_version", "profiles"});
  check_schema_version(root);
  const JsonReader list = root.child("profiles");
  if (!list.node().is_array()) root.fail("profiles", "expected array");
  std::vector<Profile> profiles;
  for (std::size_t i = 0; i < list.node().size(); ++i) {
    profiles.push_back(profile_from_json(
        JsonReader(list.node()[i], "profiles[" + std::to_string(i) + "]")));
  }
  return ProfileStore(std::move(profiles));
}

}  // namespace tlsprof

#pragma once

// Strict JSON mapping for the document family shared by every file the
// toolkit reads or writes. Each document carries "schema_version"; unknown
// keys are rejected so typos in hand-authored files surface immediately.

#include <filesystem>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "tlsprof/profile.hpp"

namespace tlsprof {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Field-level access with error messages that carry the JSON path.
class JsonReader {
 public:
  JsonReader(const Json& node, std::string path);

  const Json& node() const { return node_; }
  const std::string& path() const { return path_; }

  /// Throws ParseError unless the node is an object whose keys are all listed.
  void expect_object(std::initializer_list<std::string_view> allowed) const;

  bool has(std::string_view key) const;
  JsonReader child(std::string_view key) const;
  std::string child_path(std::string_view key) const;

  std::string get_string(std::string_view key) const;
  bool get_bool(std::string_view key) const;
  std::int64_t get_int(std::string_view key) const;
  ByteCount get_bytes(std::string_view key) const;
  double get_number(std::string_view key) const;

  std::optional<double> get_optional_number(std::string_view key) const;
  std::optional<ByteCount> get_optional_bytes(std::string_view key) const;

  [[noreturn]] void fail(std::string_view key, std::string_view what) const;

 private:
  const Json& at(std::string_view key) const;

  const Json& node_;
  std::string path_;
};

/// Checks "schema_version" equals kSchemaVersion (SchemaError otherwise).
void check_schema_version(const JsonReader& doc);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const Json& doc, const std::filesystem::path& path);

Json to_json(const CertChainSpec& c);
Json to_json(const TlsConfig& c);
Json to_json(const OverheadVector& o);
Json to_json(const SecurityLevel& s);
Json to_json(const Profile& p);
Json to_json(const ProfileStore& s);

CertChainSpec cert_chain_from_json(const JsonReader& r);
TlsConfig tls_config_from_json(const JsonReader& r);
OverheadVector overhead_from_json(const JsonReader& r);
SecurityLevel security_from_json(const JsonReader& r);
Profile profile_from_json(const JsonReader& r);
ProfileStore store_from_json(const Json& doc);

}  // namespace tlsprof

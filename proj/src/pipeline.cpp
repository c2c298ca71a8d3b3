#include "tlsprof/pipeline.hpp"

#include <cctype>
#include <sstream>

#include "tlsprof/errors.hpp"

namespace tlsprof {

TlsConfig matrix_entry_from_json(const JsonReader& r,
                                 const AlgoSizeCatalog& catalog) {
  if (r.node().is_object() && !r.node().contains("cert_chain") &&
      r.node().contains("signature_scheme") &&
      r.node()["signature_scheme"].is_string()) {
    Json filled = r.node();
    const std::string scheme = filled["signature_scheme"].get<std::string>();
    try {
      filled["cert_chain"] = to_json(sample_chain(catalog, scheme));
    } catch (const CatalogMissError&) {
      r.fail("signature_scheme", "no sample certificate for '" + scheme + "'");
    }
    return tls_config_from_json(JsonReader(filled, r.path()));
  }
  return tls_config_from_json(r);
}

std::vector<TlsConfig> config_matrix_from_json(const Json& doc,
                                               const AlgoSizeCatalog& catalog) {
  const JsonReader r(doc, "matrix");
  r.expect_object({"schema_version", "configs"});
  check_schema_version(r);
  const JsonReader configs = r.child("configs");
  if (!configs.node().is_array()) r.fail("configs", "expected array");
  std::vector<TlsConfig> out;
  for (std::size_t i = 0; i < configs.node().size(); ++i) {
    out.push_back(matrix_entry_from_json(
        JsonReader(configs.node()[i], "configs[" + std::to_string(i) + "]"),
        catalog));
  }
  return out;
}

namespace {

std::string suite_tag(const std::string& suite) {
  if (suite.find("AES_128_GCM") != std::string::npos) return "aes128gcm";
  if (suite.find("AES_256_GCM") != std::string::npos) return "aes256gcm";
  if (suite.find("CHACHA20") != std::string::npos) return "chacha20";
  std::string s;
  for (char ch : suite) s += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

}  // namespace

std::string profile_id(const TlsConfig& c) {
  std::string id = c.version == TlsVersion::kTls13 ? "tls13" : "tls12";
  id += '-' + c.key_exchange + '-' + c.signature_scheme + '-' + suite_tag(c.cipher_suite);
  id += c.mutual_auth ? "-mutual" : "-server";
  if (c.resumption == Resumption::kPskResumption) id += "-psk";
  return id;
}

ProfileStore generate_profiles(const std::vector<TlsConfig>& matrix,
                               const AlgoSizeCatalog& catalog,
                               const GenerateOptions& options) {
  std::vector<Profile> profiles;
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    const TlsConfig& c = matrix[i];
    const auto violations = validate_config(c);
    if (!violations.empty()) {
      std::string field = violations.front().field;
      if (field.rfind("config.", 0) == 0) field.erase(0, 7);
      throw ValidationError("configs[" + std::to_string(i) + "]." + field + ": " +
                            violations.front().message);
    }
    Profile p;
    p.id = profile_id(c);
    p.config = c;
    const auto [up, down] =
        apply_transport_overhead(estimate_transcript(c, catalog), options.transport);
    p.overhead.handshake_bytes_up = up;
    p.overhead.handshake_bytes_down = down;
    p.security = derive_security_level(c);
    profiles.push_back(std::move(p));
  }
  ProfileStore store(std::move(profiles));
  return options.prune ? prune_dominated(store) : store;
}

ReplayOptions replay_options_from_json(const Json& doc) {
  const JsonReader r(doc, "policy");
  r.expect_object({"schema_version", "selection", "monitor", "derivation"});
  check_schema_version(r);
  ReplayOptions o;
  if (r.has("selection")) o.selection = selection_policy_from_json(r.child("selection"));
  if (r.has("monitor")) o.monitor = monitor_config_from_json(r.child("monitor"));
  if (r.has("derivation")) {
    o.derivation = derivation_policy_from_json(r.child("derivation"));
  }
  return o;
}

ReplayTimeline replay(const ProfileStore& store,
                      const std::vector<LinkObservation>& trace,
                      const AppMetadata& meta, const ReplayOptions& options) {
  if (store.empty()) throw ConfigError("profile store is empty");
  ReplayTimeline out;
  MonitorState state(options.monitor);
  std::optional<ConstraintSet> last;
  std::optional<std::string> prev;

  for (std::size_t i = 0; i < trace.size();) {
    const std::int64_t ts = trace[i].timestamp_ms;
    for (; i < trace.size() && trace[i].timestamp_ms == ts; ++i) {
      state = ingest(std::move(state), trace[i]);
    }
    ConstraintSet c;
    try {
      c = derive_constraints(state, meta, options.derivation);
    } catch (const NotReadyError&) {
      continue;
    }
    if (last && last->same_selection_inputs(c)) continue;
    last = c;

    ReplayEntry e;
    e.timestamp_ms = ts;
    e.constraints = c;
    e.prev = prev;
    try {
      SelectionResult r = select(store, c, prev, options.selection);
      if (prev && r.chosen != *prev) ++out.summary.switches;
      if (r.reason == SelectionReason::kHysteresisHold) ++out.summary.hysteresis_holds;
      prev = r.chosen;
      e.result = std::move(r);
    } catch (const NoFeasibleProfile& err) {
      e.rejections = err.rejections();
      ++out.summary.infeasible;
    }
    out.entries.push_back(std::move(e));
  }
  out.summary.events = out.entries.size();
  return out;
}

std::string timeline_text(const ReplayTimeline& t) {
  std::ostringstream out;
  for (const auto& e : t.entries) {
    out << "t=" << e.timestamp_ms << "ms ";
    if (e.result) {
      out << "select " << e.result->chosen << " (" << to_string(e.result->reason);
      if (e.result->held_against) out << ", over " << *e.result->held_against;
      out << ')';
    } else {
      out << "no feasible profile";
    }
    out << " budget=";
    if (e.constraints.max_handshake_bytes) {
      out << *e.constraints.max_handshake_bytes;
    } else {
      out << "unlimited";
    }
    out << " overload=" << (e.constraints.overload ? "yes" : "no") << '\n';
  }
  out << "events=" << t.summary.events << " switches=" << t.summary.switches
      << " hysteresis_holds=" << t.summary.hysteresis_holds
      << " infeasible=" << t.summary.infeasible << '\n';
  return out.str();
}

Json to_json(const ReplayTimeline& t) {
  Json entries = Json::array();
  for (const auto& e : t.entries) {
    Json j{{"timestamp_ms", e.timestamp_ms}, {"constraints", to_json(e.constraints)}};
    j["constraints"].erase("schema_version");
    j["prev"] = e.prev ? Json(*e.prev) : Json(nullptr);
    if (e.result) {
      j["result"] = to_json(*e.result);
    } else {
      Json rejections = Json::array();
      for (const auto& r : e.rejections) {
        rejections.push_back({{"id", r.id}, {"constraint", r.constraint}});
      }
      j["no_feasible_profile"] = rejections;
    }
    entries.push_back(std::move(j));
  }
  return Json{{"schema_version", kSchemaVersion},
              {"entries", entries},
              {"summary",
               {{"events", t.summary.events},
                {"switches", t.summary.switches},
                {"hysteresis_holds", t.summary.hysteresis_holds},
                {"infeasible", t.summary.infeasible}}}};
}

}  // namespace tlsprof

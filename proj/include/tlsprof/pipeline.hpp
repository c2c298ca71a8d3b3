#pragma once

// Offline profile generation and trace replay: the two workflows that tie
// the cost model, monitor and selector together.

#include <optional>
#include <string>
#include <vector>

#include "tlsprof/constraint_monitor.hpp"
#include "tlsprof/cost_model.hpp"
#include "tlsprof/selector.hpp"

namespace tlsprof {

/// Matrix entry: a TlsConfig whose cert_chain may be omitted, in which case
/// the catalog's sample certificate for the signature scheme is used.
TlsConfig matrix_entry_from_json(const JsonReader& r,
                                 const AlgoSizeCatalog& catalog);

/// {"schema_version", "configs": [...]}
std::vector<TlsConfig> config_matrix_from_json(const Json& doc,
                                               const AlgoSizeCatalog& catalog);

/// e.g. "tls13-x25519-ed25519-aes128gcm-mutual"; distinct configs that
/// differ only in cert chain share an id.
std::string profile_id(const TlsConfig& c);

struct GenerateOptions {
  bool prune = true;
  TransportMode transport = TransportMode::kNone;
};

/// Throws ValidationError "configs[i].<field>: <message>" for the first
/// invalid config and SchemaError when two configs map to the same id.
ProfileStore generate_profiles(const std::vector<TlsConfig>& matrix,
                               const AlgoSizeCatalog& catalog,
                               const GenerateOptions& options = {});

struct ReplayEntry {
  std::int64_t timestamp_ms = 0;
  ConstraintSet constraints;
  std::optional<std::string> prev;  // input to select, for re-checking
  std::optional<SelectionResult> result;
  // Set instead of result when nothing was feasible.
  std::vector<NoFeasibleProfile::Rejection> rejections;
};

struct ReplaySummary {
  std::size_t events = 0;
  std::size_t switches = 0;  // chosen id differs from the last chosen id
  std::size_t hysteresis_holds = 0;
  std::size_t infeasible = 0;
};

struct ReplayTimeline {
  std::vector<ReplayEntry> entries;
  ReplaySummary summary;
};

struct ReplayOptions {
  SelectionPolicy selection;
  MonitorConfig monitor;
  DerivationPolicy derivation;
};

/// Policy file: {"schema_version", "selection", "monitor", "derivation"},
/// every section optional.
ReplayOptions replay_options_from_json(const Json& doc);

/// Ingests the trace in order; observations sharing a timestamp are
/// ingested together. A selection runs whenever the selection-relevant part
/// of the derived constraints changes. Throws ConfigError for an empty store.
ReplayTimeline replay(const ProfileStore& store,
                      const std::vector<LinkObservation>& trace,
                      const AppMetadata& meta,
                      const ReplayOptions& options = {});

std::string timeline_text(const ReplayTimeline& t);
Json to_json(const ReplayTimeline& t);

}  // namespace tlsprof

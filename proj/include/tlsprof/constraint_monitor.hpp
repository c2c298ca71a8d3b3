#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tlsprof/json_io.hpp"
#include "tlsprof/profile.hpp"

namespace tlsprof {

struct LinkObservation {
  std::int64_t timestamp_ms = 0;
  std::optional<double> goodput_bps;
  std::optional<double> packet_error_rate;
  std::optional<double> rssi_dbm;

  bool operator==(const LinkObservation&) const = default;
};

enum class Urgency { kBackground, kNormal, kUrgent };

std::string_view to_string(Urgency u);
std::optional<Urgency> parse_urgency(std::string_view s);

struct AppMetadata {
  Urgency urgency = Urgency::kNormal;
  int min_security_bits = 128;
  bool require_pq = false;
  std::optional<double> latency_budget_ms;
};

struct ConstraintSet {
  std::optional<ByteCount> max_handshake_bytes;
  double bandwidth_estimate = 0.0;  // bit/s
  double per_estimate = 0.0;
  int min_security_bits = 128;
  bool require_pq = false;
  std::optional<double> latency_budget_ms;
  bool overload = false;

  bool operator==(const ConstraintSet&) const = default;

  /// Fields that influence profile selection (estimates excluded).
  bool same_selection_inputs(const ConstraintSet& other) const;
};

struct MonitorConfig {
  double alpha = 0.2;
  std::size_t per_window = 5;
  double overload_threshold = 0.10;
  double clear_threshold = 0.05;
  int overload_consecutive = 3;
};

/// Urgency-to-deadline table converting bandwidth into a handshake budget.
struct DerivationPolicy {
  double urgent_deadline_ms = 1000.0;
  double normal_deadline_ms = 5000.0;
  double background_deadline_ms = 30000.0;

  double deadline_ms(Urgency u) const;
};

/// Value-semantic monitor state; ingest returns an updated copy.
class MonitorState {
 public:
  explicit MonitorState(MonitorConfig config = {});

  const MonitorConfig& config() const { return config_; }
  std::size_t observations() const { return observations_; }
  std::optional<std::int64_t> last_timestamp_ms() const { return last_ts_; }
  std::optional<double> bandwidth_estimate() const { return bandwidth_; }
  std::optional<double> min_goodput() const { return min_goodput_; }
  std::optional<double> max_goodput() const { return max_goodput_; }
  /// Mean PER over the window; 0 when no PER has been observed.
  double per_window_mean() const;
  const std::deque<double>& per_window() const { return per_window_; }
  int consecutive_over_threshold() const { return consecutive_; }
  bool overloaded() const { return overloaded_; }

  friend MonitorState ingest(MonitorState state, const LinkObservation& obs);

 private:
  MonitorConfig config_;
  std::size_t observations_ = 0;
  std::optional<std::int64_t> last_ts_;
  std::optional<double> bandwidth_;
  std::optional<double> min_goodput_;
  std::optional<double> max_goodput_;
  std::deque<double> per_window_;
  int consecutive_ = 0;
  bool overloaded_ = false;
};

/// EWMA bandwidth update, sliding PER window and overload hysteresis.
/// Throws OrderingError when obs.timestamp_ms precedes the last one and
/// ConfigError for a PER outside [0, 1].
MonitorState ingest(MonitorState state, const LinkObservation& obs);

bool detect_overload(const MonitorState& state);

/// Throws NotReadyError until at least one goodput has been observed.
ConstraintSet derive_constraints(const MonitorState& state,
                                 const AppMetadata& meta,
                                 const DerivationPolicy& policy = {});

/// Observation trace CSV: timestamp_ms,goodput_bps,per,rssi_dbm with empty
/// cells for absent values.
std::vector<LinkObservation> parse_trace_csv(std::string_view text);
std::vector<LinkObservation> load_trace(const std::filesystem::path& path);
std::string trace_csv(const std::vector<LinkObservation>& trace);

Json to_json(const ConstraintSet& c);
ConstraintSet constraint_set_from_json(const JsonReader& r);
Json to_json(const AppMetadata& m);
AppMetadata app_metadata_from_json(const JsonReader& r);
Json to_json(const MonitorConfig& c);
MonitorConfig monitor_config_from_json(const JsonReader& r);
Json to_json(const DerivationPolicy& p);
DerivationPolicy derivation_policy_from_json(const JsonReader& r);

}  // namespace tlsprof

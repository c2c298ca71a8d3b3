#pragma once

// Discrete-event model of a shared constrained link carrying polling
// devices. Each direction is one FIFO bottleneck with a byte-limited queue;
// messages are cut into packets, serialized at the direction's capacity and
// then propagate for half the base RTT. Lost packets (random loss or tail
// drop) are sent again after a fixed timeout.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tlsprof/constraint_monitor.hpp"
#include "tlsprof/json_io.hpp"
#include "tlsprof/profile.hpp"

namespace tlsprof {

struct LinkModel {
  double uplink_bps = 64000.0;
  double downlink_bps = 64000.0;
  double base_rtt_ms = 0.0;
  double per = 0.0;  // independent loss probability per packet attempt
  ByteCount queue_limit_bytes = 64 * 1024;  // per direction, incl. in service
  ByteCount max_packet_bytes = 1400;
  double retransmit_timeout_ms = 200.0;
  int max_tries = 5;
  // Spread device start times over one poll interval. Off means every
  // device polls at the same instant.
  bool jitter_start = true;

  bool operator==(const LinkModel&) const = default;
};

enum class SessionPolicy { kHandshakeOnce, kHandshakeEveryPoll };

std::string_view to_string(SessionPolicy p);
std::optional<SessionPolicy> parse_session_policy(std::string_view s);

struct HandshakeVolume {
  ByteCount up_bytes = 0;
  ByteCount down_bytes = 0;

  bool operator==(const HandshakeVolume&) const = default;
};

struct Workload {
  std::int64_t n_devices = 0;
  double poll_interval_ms = 1000.0;
  ByteCount request_bytes = 38;
  ByteCount reply_bytes = 282;
  std::optional<HandshakeVolume> handshake;
  SessionPolicy session_policy = SessionPolicy::kHandshakeEveryPoll;

  bool operator==(const Workload&) const = default;
};

/// Throws ConfigError naming the first violated invariant.
void validate(const LinkModel& link);
void validate(const Workload& w);

struct LatencySummary {
  std::size_t count = 0;
  double min = 0, p25 = 0, median = 0, p75 = 0, p95 = 0, max = 0;

  bool operator==(const LatencySummary&) const = default;
};

/// Linear interpolation between closest ranks; all zero for no samples.
LatencySummary summarize(std::vector<double> samples);

struct DirectionCounters {
  ByteCount offered_bytes = 0;    // every packet attempt handed to the queue
  ByteCount delivered_bytes = 0;
  ByteCount dropped_bytes = 0;    // random loss plus tail drop
  std::uint64_t packets_offered = 0;
  std::uint64_t packets_lost = 0;
  std::uint64_t packets_tail_dropped = 0;

  bool operator==(const DirectionCounters&) const = default;
};

struct SimMetrics {
  LatencySummary aggregate;
  std::vector<LatencySummary> per_device;
  std::uint64_t transactions_started = 0;
  std::uint64_t transactions_completed = 0;
  std::uint64_t transactions_dropped = 0;
  DirectionCounters up;
  DirectionCounters down;
  double simulated_duration_ms = 0.0;  // time of the last event

  bool operator==(const SimMetrics&) const = default;
};

struct TransactionRecord {
  std::int64_t device_id = 0;
  double start_ms = 0.0;
  std::optional<double> latency_ms;  // empty when dropped
  int retries = 0;

  bool operator==(const TransactionRecord&) const = default;
};

struct PacketRecord {
  double time_ms = 0.0;  // end of serialization, or arrival for tail drops
  Direction direction = Direction::kUp;
  ByteCount bytes = 0;
  bool lost = false;

  bool operator==(const PacketRecord&) const = default;
};

struct SimResult {
  SimMetrics metrics;
  std::vector<TransactionRecord> transactions;  // in start order
  std::vector<PacketRecord> packets;            // in time order

  bool operator==(const SimResult&) const = default;
};

/// Polls are issued during [0, duration_ms); the run then drains until
/// every packet is delivered or dropped. Deterministic for a given seed.
SimResult run(const LinkModel& link, const Workload& w, std::uint64_t seed,
              double duration_ms);

/// Observation trace with one row per window: goodput is delivered bits in
/// the chosen direction per second, PER is lost over offered attempts in
/// both directions. Windows without traffic carry no PER.
std::vector<LinkObservation> observation_trace(const SimResult& r,
                                               double window_ms,
                                               Direction goodput_direction =
                                                   Direction::kDown);

std::string transactions_csv(const SimResult& r);

/// Writes transactions.csv and observations.csv into dir.
void emit_trace(const SimResult& r, const std::filesystem::path& dir,
                double window_ms);

struct Scenario {
  LinkModel link;
  Workload workload;
  std::uint64_t seed = 1;
  double duration_ms = 60000.0;
  double trace_window_ms = 1000.0;
};

Json to_json(const LinkModel& l);
LinkModel link_model_from_json(const JsonReader& r);
Json to_json(const Workload& w);
Workload workload_from_json(const JsonReader& r);
Json to_json(const Scenario& s);
Scenario scenario_from_json(const Json& doc);
Json to_json(const SimMetrics& m);

}  // namespace tlsprof

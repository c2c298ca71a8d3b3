#include "tlsprof/constraint_monitor.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "tlsprof/errors.hpp"

namespace tlsprof {

std::string_view to_string(Urgency u) {
  switch (u) {
    case Urgency::kBackground:
      return "background";
    case Urgency::kNormal:
      return "normal";
    case Urgency::kUrgent:
      return "urgent";
  }
  return "normal";
}

std::optional<Urgency> parse_urgency(std::string_view s) {
  if (s == "background") return Urgency::kBackground;
  if (s == "normal") return Urgency::kNormal;
  if (s == "urgent") return Urgency::kUrgent;
  return std::nullopt;
}

bool ConstraintSet::same_selection_inputs(const ConstraintSet& other) const {
  return max_handshake_bytes == other.max_handshake_bytes &&
         min_security_bits == other.min_security_bits &&
         require_pq == other.require_pq && overload == other.overload;
}

double DerivationPolicy::deadline_ms(Urgency u) const {
  switch (u) {
    case Urgency::kUrgent:
      return urgent_deadline_ms;
    case Urgency::kNormal:
      return normal_deadline_ms;
    case Urgency::kBackground:
      return background_deadline_ms;
  }
  return normal_deadline_ms;
}

MonitorState::MonitorState(MonitorConfig config) : config_(config) {
  if (!(config_.alpha > 0.0 && config_.alpha <= 1.0)) {
    throw ConfigError("alpha must lie in (0, 1]");
  }
  if (config_.per_window == 0) throw ConfigError("PER window must be >= 1");
  if (config_.clear_threshold > config_.overload_threshold) {
    throw ConfigError("clear threshold must not exceed overload threshold");
  }
  if (config_.overload_consecutive < 1) {
    throw ConfigError("overload_consecutive must be >= 1");
  }
}

double MonitorState::per_window_mean() const {
  if (per_window_.empty()) return 0.0;
  return std::accumulate(per_window_.begin(), per_window_.end(), 0.0) /
         static_cast<double>(per_window_.size());
}

MonitorState ingest(MonitorState state, const LinkObservation& obs) {
  if (state.last_ts_ && obs.timestamp_ms < *state.last_ts_) {
    throw OrderingError("observation at " + std::to_string(obs.timestamp_ms) +
                        " ms precedes previous at " +
                        std::to_string(*state.last_ts_) + " ms");
  }
  if (obs.packet_error_rate &&
      !(*obs.packet_error_rate >= 0.0 && *obs.packet_error_rate <= 1.0)) {
    throw ConfigError("packet error rate must lie in [0, 1]");
  }
  if (obs.goodput_bps && !(*obs.goodput_bps >= 0.0)) {
    throw ConfigError("goodput must be >= 0");
  }
  state.last_ts_ = obs.timestamp_ms;
  ++state.observations_;

  if (obs.goodput_bps) {
    const double g = *obs.goodput_bps;
    if (!state.bandwidth_) {
      state.bandwidth_ = g;
    } else {
      // Incremental form keeps a constant feed exactly constant.
      *state.bandwidth_ += state.config_.alpha * (g - *state.bandwidth_);
    }
    state.min_goodput_ = state.min_goodput_ ? std::min(*state.min_goodput_, g) : g;
    state.max_goodput_ = state.max_goodput_ ? std::max(*state.max_goodput_, g) : g;
  }

  if (obs.packet_error_rate) {
    state.per_window_.push_back(*obs.packet_error_rate);
    while (state.per_window_.size() > state.config_.per_window) {
      state.per_window_.pop_front();
    }
  }
  const double mean = state.per_window_mean();
  state.consecutive_ =
      mean > state.config_.overload_threshold ? state.consecutive_ + 1 : 0;
  if (!state.overloaded_ &&
      state.consecutive_ >= state.config_.overload_consecutive) {
    state.overloaded_ = true;
  } else if (state.overloaded_ && mean < state.config_.clear_threshold) {
    state.overloaded_ = false;
  }
  return state;
}

bool detect_overload(const MonitorState& state) { return state.overloaded(); }

ConstraintSet derive_constraints(const MonitorState& state,
                                 const AppMetadata& meta,
                                 const DerivationPolicy& policy) {
  if (state.observations() == 0) {
    throw NotReadyError("no observations ingested");
  }
  if (!state.bandwidth_estimate()) {
    throw NotReadyError("no goodput observed yet");
  }
  ConstraintSet c;
  c.bandwidth_estimate = *state.bandwidth_estimate();
  c.per_estimate = state.per_window_mean();
  c.max_handshake_bytes = static_cast<ByteCount>(
      std::floor(c.bandwidth_estimate * policy.deadline_ms(meta.urgency) / 8000.0));
  c.min_security_bits = meta.min_security_bits;
  c.require_pq = meta.require_pq;
  c.latency_budget_ms = meta.latency_budget_ms;
  c.overload = detect_overload(state);
  return c;
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<double> parse_optional_double(std::string_view cell,
                                            std::size_t line_no,
                                            std::string_view column) {
  cell = trim(cell);
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
    throw ParseError("trace line " + std::to_string(line_no) + ": column " +
                     std::string(column) + ": not a number '" +
                     std::string(cell) + "'");
  }
  return value;
}

constexpr std::string_view kTraceHeader = "timestamp_ms,goodput_bps,per,rssi_dbm";

}  // namespace

std::vector<LinkObservation> parse_trace_csv(std::string_view text) {
  std::vector<LinkObservation> out;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    const std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kTraceHeader) {
        throw ParseError("trace line 1: expected header '" +
                         std::string(kTraceHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    const auto cells = split_commas(line);
    if (cells.size() != 4) {
      throw ParseError("trace line " + std::to_string(line_no) +
                       ": expected 4 columns, got " + std::to_string(cells.size()));
    }
    LinkObservation obs;
    const auto ts = parse_optional_double(cells[0], line_no, "timestamp_ms");
    if (!ts || *ts != std::floor(*ts)) {
      throw ParseError("trace line " + std::to_string(line_no) +
                       ": column timestamp_ms: integer required");
    }
    obs.timestamp_ms = static_cast<std::int64_t>(*ts);
    obs.goodput_bps = parse_optional_double(cells[1], line_no, "goodput_bps");
    obs.packet_error_rate = parse_optional_double(cells[2], line_no, "per");
    obs.rssi_dbm = parse_optional_double(cells[3], line_no, "rssi_dbm");
    out.push_back(obs);
  }
  if (!header_seen) throw ParseError("trace is empty (header missing)");
  return out;
}

std::vector<LinkObservation> load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_trace_csv(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string trace_csv(const std::vector<LinkObservation>& trace) {
  std::ostringstream out;
  out.precision(17);
  out << kTraceHeader << '\n';
  auto cell = [&](const std::optional<double>& v) {
    if (v) out << *v;
  };
  for (const auto& o : trace) {
    out << o.timestamp_ms << ',';
    cell(o.goodput_bps);
    out << ',';
    cell(o.packet_error_rate);
    out << ',';
    cell(o.rssi_dbm);
    out << '\n';
  }
  return out.str();
}

Json to_json(const ConstraintSet& c) {
  Json j{{"schema_version", kSchemaVersion},
         {"bandwidth_estimate", c.bandwidth_estimate},
         {"per_estimate", c.per_estimate},
         {"min_security_bits", c.min_security_bits},
         {"require_pq", c.require_pq},
         {"overload", c.overload}};
  if (c.max_handshake_bytes) j["max_handshake_bytes"] = *c.max_handshake_bytes;
  if (c.latency_budget_ms) j["latency_budget_ms"] = *c.latency_budget_ms;
  return j;
}

ConstraintSet constraint_set_from_json(const JsonReader& r) {
  r.expect_object({"schema_version", "max_handshake_bytes", "bandwidth_estimate",
                   "per_estimate", "min_security_bits", "require_pq",
                   "latency_budget_ms", "overload"});
  check_schema_version(r);
  ConstraintSet c;
  c.max_handshake_bytes = r.get_optional_bytes("max_handshake_bytes");
  c.bandwidth_estimate = r.get_number("bandwidth_estimate");
  if (c.bandwidth_estimate < 0) r.fail("bandwidth_estimate", "must be >= 0");
  c.per_estimate = r.get_number("per_estimate");
  if (c.per_estimate < 0 || c.per_estimate > 1) {
    r.fail("per_estimate", "must lie in [0, 1]");
  }
  c.min_security_bits = static_cast<int>(r.get_int("min_security_bits"));
  if (!is_valid_security_bits(c.min_security_bits)) {
    r.fail("min_security_bits", "must be one of 112, 128, 192, 256");
  }
  c.require_pq = r.get_bool("require_pq");
  c.latency_budget_ms = r.get_optional_number("latency_budget_ms");
  c.overload = r.get_bool("overload");
  return c;
}

Json to_json(const AppMetadata& m) {
  Json j{{"schema_version", kSchemaVersion},
         {"urgency", to_string(m.urgency)},
         {"min_security_bits", m.min_security_bits},
         {"require_pq", m.require_pq}};
  if (m.latency_budget_ms) j["latency_budget_ms"] = *m.latency_budget_ms;
  return j;
}

AppMetadata app_metadata_from_json(const JsonReader& r) {
  r.expect_object({"schema_version", "urgency", "min_security_bits",
                   "require_pq", "latency_budget_ms"});
  check_schema_version(r);
  AppMetadata m;
  const auto urgency = parse_urgency(r.get_string("urgency"));
  if (!urgency) r.fail("urgency", "expected background, normal or urgent");
  m.urgency = *urgency;
  m.min_security_bits = static_cast<int>(r.get_int("min_security_bits"));
  if (!is_valid_security_bits(m.min_security_bits)) {
    r.fail("min_security_bits", "must be one of 112, 128, 192, 256");
  }
  m.require_pq = r.get_bool("require_pq");
  m.latency_budget_ms = r.get_optional_number("latency_budget_ms");
  return m;
}

Json to_json(const MonitorConfig& c) {
  return Json{{"alpha", c.alpha},
              {"per_window", c.per_window},
              {"overload_threshold", c.overload_threshold},
              {"clear_threshold", c.clear_threshold},
              {"overload_consecutive", c.overload_consecutive}};
}

MonitorConfig monitor_config_from_json(const JsonReader& r) {
  r.expect_object({"alpha", "per_window", "overload_threshold",
                   "clear_threshold", "overload_consecutive"});
  MonitorConfig c;
  if (r.has("alpha")) c.alpha = r.get_number("alpha");
  if (r.has("per_window")) c.per_window = r.get_bytes("per_window");
  if (r.has("overload_threshold")) {
    c.overload_threshold = r.get_number("overload_threshold");
  }
  if (r.has("clear_threshold")) c.clear_threshold = r.get_number("clear_threshold");
  if (r.has("overload_consecutive")) {
    c.overload_consecutive = static_cast<int>(r.get_int("overload_consecutive"));
  }
  return c;
}

Json to_json(const DerivationPolicy& p) {
  return Json{{"urgent_deadline_ms", p.urgent_deadline_ms},
              {"normal_deadline_ms", p.normal_deadline_ms},
              {"background_deadline_ms", p.background_deadline_ms}};
}

DerivationPolicy derivation_policy_from_json(const JsonReader& r) {
  r.expect_object(
      {"urgent_deadline_ms", "normal_deadline_ms", "background_deadline_ms"});
  DerivationPolicy p;
  if (r.has("urgent_deadline_ms")) p.urgent_deadline_ms = r.get_number("urgent_deadline_ms");
  if (r.has("normal_deadline_ms")) p.normal_deadline_ms = r.get_number("normal_deadline_ms");
  if (r.has("background_deadline_ms")) {
    p.background_deadline_ms = r.get_number("background_deadline_ms");
  }
  return p;
}

}  // namespace tlsprof

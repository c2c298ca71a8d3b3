#include "tlsprof/link_simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <queue>
#include <random>
#include <sstream>

#include "tlsprof/errors.hpp"

namespace tlsprof {

std::string_view to_string(SessionPolicy p) {
  return p == SessionPolicy::kHandshakeOnce ? "handshake_once"
                                            : "handshake_every_poll";
}

std::optional<SessionPolicy> parse_session_policy(std::string_view s) {
  if (s == "handshake_once") return SessionPolicy::kHandshakeOnce;
  if (s == "handshake_every_poll") return SessionPolicy::kHandshakeEveryPoll;
  return std::nullopt;
}

void validate(const LinkModel& link) {
  if (!(link.uplink_bps > 0) || !(link.downlink_bps > 0)) {
    throw ConfigError("link: capacities must be > 0");
  }
  if (!(link.base_rtt_ms >= 0)) throw ConfigError("link: base_rtt_ms must be >= 0");
  if (!(link.per >= 0 && link.per < 1)) throw ConfigError("link: per must be in [0, 1)");
  if (link.max_packet_bytes == 0) throw ConfigError("link: max_packet_bytes must be > 0");
  if (link.queue_limit_bytes <= link.max_packet_bytes) {
    throw ConfigError("link: queue_limit_bytes must exceed max_packet_bytes");
  }
  if (!(link.retransmit_timeout_ms > 0)) {
    throw ConfigError("link: retransmit_timeout_ms must be > 0");
  }
  if (link.max_tries < 1) throw ConfigError("link: max_tries must be >= 1");
}

void validate(const Workload& w) {
  if (w.n_devices < 0) throw ConfigError("workload: n_devices must be >= 0");
  if (!(w.poll_interval_ms > 0)) throw ConfigError("workload: poll_interval_ms must be > 0");
  if (w.request_bytes == 0 || w.reply_bytes == 0) {
    throw ConfigError("workload: request and reply sizes must be > 0");
  }
  if (w.handshake && (w.handshake->up_bytes == 0 || w.handshake->down_bytes == 0)) {
    throw ConfigError("workload: handshake sizes must be > 0");
  }
}

LatencySummary summarize(std::vector<double> samples) {
  LatencySummary s;
  s.count = samples.size();
  if (samples.empty()) return s;
  std::sort(samples.begin(), samples.end());
  auto q = [&](double p) {
    const double pos = p * static_cast<double>(samples.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, samples.size() - 1);
    return samples[lo] + (pos - static_cast<double>(lo)) * (samples[hi] - samples[lo]);
  };
  s.min = samples.front();
  s.p25 = q(0.25);
  s.median = q(0.5);
  s.p75 = q(0.75);
  s.p95 = q(0.95);
  s.max = samples.back();
  return s;
}

namespace {

// std::uniform_real_distribution is implementation-defined; this is not.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Leg {
  Direction dir;
  ByteCount bytes;
};

struct Txn {
  std::int64_t device = 0;
  double start = 0;
  std::vector<Leg> legs;
  std::size_t leg = 0;
  std::size_t outstanding = 0;
  int retries = 0;
  bool dropped = false;
  std::optional<double> latency;
};

struct Packet {
  std::size_t txn = 0;
  Direction dir = Direction::kUp;
  ByteCount bytes = 0;
  int tries = 0;
};

enum class EventKind { kPoll, kEnqueue, kServiceDone, kDeliver };

struct Event {
  double time;
  std::uint64_t seq;
  EventKind kind;
  std::size_t ref;  // device for polls, packet otherwise
  std::int64_t poll_index;

  bool operator>(const Event& o) const {
    return time != o.time ? time > o.time : seq > o.seq;
  }
};

class Simulation {
 public:
  Simulation(const LinkModel& link, const Workload& w, std::uint64_t seed,
             double duration)
      : link_(link), w_(w), rng_(seed), duration_(duration) {}

  SimResult run() {
    for (std::int64_t d = 0; d < w_.n_devices; ++d) {
      const double offset =
          link_.jitter_start ? uniform01(rng_) * w_.poll_interval_ms : 0.0;
      push(offset, EventKind::kPoll, static_cast<std::size_t>(d), 0);
    }
    while (!events_.empty()) {
      const Event e = events_.top();
      events_.pop();
      now_ = e.time;
      switch (e.kind) {
        case EventKind::kPoll:
          poll(e.ref, e.poll_index);
          break;
        case EventKind::kEnqueue:
          if (!txns_[packets_[e.ref].txn].dropped) enqueue(e.ref);
          break;
        case EventKind::kServiceDone:
          service_done(e.ref);
          break;
        case EventKind::kDeliver:
          deliver(e.ref);
          break;
      }
    }
    return finish();
  }

 private:
  struct Queue {
    std::deque<std::size_t> waiting;
    ByteCount bytes = 0;  // waiting plus in service
    bool busy = false;
    DirectionCounters counters;
  };

  void push(double t, EventKind k, std::size_t ref, std::int64_t poll = 0) {
    events_.push(Event{t, seq_++, k, ref, poll});
  }

  Queue& queue(Direction d) { return d == Direction::kUp ? up_ : down_; }
  double capacity(Direction d) const {
    return d == Direction::kUp ? link_.uplink_bps : link_.downlink_bps;
  }
  Direction dir_of(std::size_t pkt) const { return packets_[pkt].dir; }

  void poll(std::size_t device, std::int64_t index) {
    if (now_ >= duration_) return;
    Txn t;
    t.device = static_cast<std::int64_t>(device);
    t.start = now_;
    const bool handshake =
        w_.handshake && (w_.session_policy == SessionPolicy::kHandshakeEveryPoll ||
                         index == 0);
    if (handshake) {
      t.legs.push_back({Direction::kUp, w_.handshake->up_bytes});
      t.legs.push_back({Direction::kDown, w_.handshake->down_bytes});
    }
    t.legs.push_back({Direction::kUp, w_.request_bytes});
    t.legs.push_back({Direction::kDown, w_.reply_bytes});
    txns_.push_back(std::move(t));
    start_leg(txns_.size() - 1);
    push(now_ + w_.poll_interval_ms, EventKind::kPoll, device, index + 1);
  }

  void start_leg(std::size_t txn) {
    const Leg& leg = txns_[txn].legs[txns_[txn].leg];
    ByteCount remaining = leg.bytes;
    txns_[txn].outstanding = 0;
    while (remaining > 0) {
      const ByteCount b = std::min(remaining, link_.max_packet_bytes);
      remaining -= b;
      packets_.push_back(Packet{txn, leg.dir, b, 0});
      ++txns_[txn].outstanding;
      enqueue(packets_.size() - 1);
    }
  }

  void enqueue(std::size_t pkt) {
    Packet& p = packets_[pkt];
    const Direction d = dir_of(pkt);
    Queue& q = queue(d);
    ++p.tries;
    q.counters.offered_bytes += p.bytes;
    ++q.counters.packets_offered;
    if (q.bytes + p.bytes > link_.queue_limit_bytes) {
      q.counters.dropped_bytes += p.bytes;
      ++q.counters.packets_tail_dropped;
      log_.push_back({now_, d, p.bytes, true});
      lost(pkt);
      return;
    }
    q.waiting.push_back(pkt);
    q.bytes += p.bytes;
    if (!q.busy) start_service(d);
  }

  void start_service(Direction d) {
    Queue& q = queue(d);
    const std::size_t pkt = q.waiting.front();
    q.waiting.pop_front();
    q.busy = true;
    const double tx_ms =
        static_cast<double>(packets_[pkt].bytes) * 8.0 / capacity(d) * 1000.0;
    push(now_ + tx_ms, EventKind::kServiceDone, pkt);
  }

  void service_done(std::size_t pkt) {
    const Packet& p = packets_[pkt];
    const Direction d = dir_of(pkt);
    Queue& q = queue(d);
    q.bytes -= p.bytes;
    q.busy = false;
    const bool loss = uniform01(rng_) < link_.per;
    log_.push_back({now_, d, p.bytes, loss});
    if (loss) {
      q.counters.dropped_bytes += p.bytes;
      ++q.counters.packets_lost;
      lost(pkt);
    } else {
      q.counters.delivered_bytes += p.bytes;
      push(now_ + link_.base_rtt_ms / 2.0, EventKind::kDeliver, pkt);
    }
    if (!q.waiting.empty()) start_service(d);
  }

  void lost(std::size_t pkt) {
    Txn& t = txns_[packets_[pkt].txn];
    if (t.dropped) return;
    if (packets_[pkt].tries >= link_.max_tries) {
      t.dropped = true;
      return;
    }
    ++t.retries;
    push(now_ + link_.retransmit_timeout_ms, EventKind::kEnqueue, pkt);
  }

  void deliver(std::size_t pkt) {
    const std::size_t id = packets_[pkt].txn;
    Txn& t = txns_[id];
    if (t.dropped) return;
    if (--t.outstanding > 0) return;
    if (++t.leg < t.legs.size()) {
      start_leg(id);
    } else {
      t.latency = now_ - t.start;
    }
  }

  SimResult finish() {
    SimResult r;
    SimMetrics& m = r.metrics;
    std::vector<double> all;
    std::vector<std::vector<double>> by_device(
        static_cast<std::size_t>(w_.n_devices));
    for (const Txn& t : txns_) {
      ++m.transactions_started;
      if (t.latency) {
        ++m.transactions_completed;
        all.push_back(*t.latency);
        by_device[static_cast<std::size_t>(t.device)].push_back(*t.latency);
      } else {
        ++m.transactions_dropped;
      }
      r.transactions.push_back({t.device, t.start, t.latency, t.retries});
    }
    m.aggregate = summarize(std::move(all));
    for (auto& v : by_device) m.per_device.push_back(summarize(std::move(v)));
    m.up = up_.counters;
    m.down = down_.counters;
    m.simulated_duration_ms = now_;
    r.packets = std::move(log_);
    return r;
  }

  const LinkModel& link_;
  const Workload& w_;
  std::mt19937_64 rng_;
  double duration_;
  double now_ = 0.0;
  std::uint64_t seq_ = 0;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::vector<Txn> txns_;
  std::vector<Packet> packets_;
  std::vector<PacketRecord> log_;
  Queue up_;
  Queue down_;
};

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

SimResult run(const LinkModel& link, const Workload& w, std::uint64_t seed,
              double duration_ms) {
  validate(link);
  validate(w);
  if (!(duration_ms >= w.poll_interval_ms)) {
    throw ConfigError("duration_ms must be at least one poll interval");
  }
  return Simulation(link, w, seed, duration_ms).run();
}

std::vector<LinkObservation> observation_trace(const SimResult& r,
                                               double window_ms,
                                               Direction goodput_direction) {
  if (!(window_ms > 0)) throw ConfigError("window_ms must be > 0");
  std::vector<LinkObservation> out;
  if (r.packets.empty()) return out;
  const double last = r.packets.back().time_ms;
  const auto windows = static_cast<std::size_t>(std::floor(last / window_ms)) + 1;
  std::vector<ByteCount> delivered(windows, 0);
  std::vector<std::uint64_t> attempts(windows, 0);
  std::vector<std::uint64_t> losses(windows, 0);
  for (const auto& p : r.packets) {
    const auto k = std::min(
        windows - 1, static_cast<std::size_t>(std::floor(p.time_ms / window_ms)));
    ++attempts[k];
    if (p.lost) {
      ++losses[k];
    } else if (p.direction == goodput_direction) {
      delivered[k] += p.bytes;
    }
  }
  for (std::size_t k = 0; k < windows; ++k) {
    LinkObservation o;
    o.timestamp_ms = static_cast<std::int64_t>(
        std::llround(static_cast<double>(k + 1) * window_ms));
    o.goodput_bps = static_cast<double>(delivered[k]) * 8.0 / (window_ms / 1000.0);
    if (attempts[k] > 0) {
      o.packet_error_rate =
          static_cast<double>(losses[k]) / static_cast<double>(attempts[k]);
    }
    out.push_back(o);
  }
  return out;
}

std::string transactions_csv(const SimResult& r) {
  std::string out = "device_id,start_ms,latency_ms,retries\n";
  for (const auto& t : r.transactions) {
    out += std::to_string(t.device_id) + ',' + fmt(t.start_ms) + ',' +
           (t.latency_ms ? fmt(*t.latency_ms) : std::string()) + ',' +
           std::to_string(t.retries) + '\n';
  }
  return out;
}

void emit_trace(const SimResult& r, const std::filesystem::path& dir,
                double window_ms) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
    if (!out) throw IoError("cannot write " + path.string());
  };
  write(dir / "transactions.csv", transactions_csv(r));
  write(dir / "observations.csv", trace_csv(observation_trace(r, window_ms)));
}

Json to_json(const LinkModel& l) {
  return Json{{"uplink_bps", l.uplink_bps},
              {"downlink_bps", l.downlink_bps},
              {"base_rtt_ms", l.base_rtt_ms},
              {"per", l.per},
              {"queue_limit_bytes", l.queue_limit_bytes},
              {"max_packet_bytes", l.max_packet_bytes},
              {"retransmit_timeout_ms", l.retransmit_timeout_ms},
              {"max_tries", l.max_tries},
              {"jitter_start", l.jitter_start}};
}

LinkModel link_model_from_json(const JsonReader& r) {
  r.expect_object({"uplink_bps", "downlink_bps", "base_rtt_ms", "per",
                   "queue_limit_bytes", "max_packet_bytes",
                   "retransmit_timeout_ms", "max_tries", "jitter_start"});
  LinkModel l;
  l.uplink_bps = r.get_number("uplink_bps");
  l.downlink_bps = r.get_number("downlink_bps");
  if (r.has("base_rtt_ms")) l.base_rtt_ms = r.get_number("base_rtt_ms");
  if (r.has("per")) l.per = r.get_number("per");
  if (r.has("queue_limit_bytes")) l.queue_limit_bytes = r.get_bytes("queue_limit_bytes");
  if (r.has("max_packet_bytes")) l.max_packet_bytes = r.get_bytes("max_packet_bytes");
  if (r.has("retransmit_timeout_ms")) {
    l.retransmit_timeout_ms = r.get_number("retransmit_timeout_ms");
  }
  if (r.has("max_tries")) l.max_tries = static_cast<int>(r.get_int("max_tries"));
  if (r.has("jitter_start")) l.jitter_start = r.get_bool("jitter_start");
  return l;
}

Json to_json(const Workload& w) {
  Json j{{"n_devices", w.n_devices},
         {"poll_interval_ms", w.poll_interval_ms},
         {"request_bytes", w.request_bytes},
         {"reply_bytes", w.reply_bytes},
         {"session_policy", to_string(w.session_policy)}};
  if (w.handshake) {
    j["handshake"] = Json{{"up_bytes", w.handshake->up_bytes},
                          {"down_bytes", w.handshake->down_bytes}};
  }
  return j;
}

Workload workload_from_json(const JsonReader& r) {
  r.expect_object({"n_devices", "poll_interval_ms", "request_bytes",
                   "reply_bytes", "handshake", "session_policy"});
  Workload w;
  w.n_devices = r.get_int("n_devices");
  if (r.has("poll_interval_ms")) w.poll_interval_ms = r.get_number("poll_interval_ms");
  if (r.has("request_bytes")) w.request_bytes = r.get_bytes("request_bytes");
  if (r.has("reply_bytes")) w.reply_bytes = r.get_bytes("reply_bytes");
  if (r.has("handshake")) {
    const JsonReader h = r.child("handshake");
    h.expect_object({"up_bytes", "down_bytes"});
    w.handshake = HandshakeVolume{h.get_bytes("up_bytes"), h.get_bytes("down_bytes")};
  }
  if (r.has("session_policy")) {
    const auto p = parse_session_policy(r.get_string("session_policy"));
    if (!p) r.fail("session_policy", "expected handshake_once or handshake_every_poll");
    w.session_policy = *p;
  }
  return w;
}

Json to_json(const Scenario& s) {
  return Json{{"schema_version", kSchemaVersion},
              {"link", to_json(s.link)},
              {"workload", to_json(s.workload)},
              {"seed", s.seed},
              {"duration_ms", s.duration_ms},
              {"trace_window_ms", s.trace_window_ms}};
}

Scenario scenario_from_json(const Json& doc) {
  const JsonReader r(doc, "scenario");
  r.expect_object({"schema_version", "link", "workload", "seed", "duration_ms",
                   "trace_window_ms"});
  check_schema_version(r);
  Scenario s;
  s.link = link_model_from_json(r.child("link"));
  s.workload = workload_from_json(r.child("workload"));
  if (r.has("seed")) {
    const std::int64_t seed = r.get_int("seed");
    if (seed < 0) r.fail("seed", "must be >= 0");
    s.seed = static_cast<std::uint64_t>(seed);
  }
  if (r.has("duration_ms")) s.duration_ms = r.get_number("duration_ms");
  if (r.has("trace_window_ms")) s.trace_window_ms = r.get_number("trace_window_ms");
  return s;
}

namespace {

Json to_json(const LatencySummary& s) {
  return Json{{"count", s.count}, {"min", s.min},       {"p25", s.p25},
              {"median", s.median}, {"p75", s.p75},     {"p95", s.p95},
              {"max", s.max}};
}

Json to_json(const DirectionCounters& c) {
  return Json{{"offered_bytes", c.offered_bytes},
              {"delivered_bytes", c.delivered_bytes},
              {"dropped_bytes", c.dropped_bytes},
              {"packets_offered", c.packets_offered},
              {"packets_lost", c.packets_lost},
              {"packets_tail_dropped", c.packets_tail_dropped}};
}

}  // namespace

Json to_json(const SimMetrics& m) {
  Json per_device = Json::array();
  for (const auto& s : m.per_device) per_device.push_back(to_json(s));
  return Json{{"schema_version", kSchemaVersion},
              {"latency_ms", to_json(m.aggregate)},
              {"per_device_latency_ms", per_device},
              {"transactions_started", m.transactions_started},
              {"transactions_completed", m.transactions_completed},
              {"transactions_dropped", m.transactions_dropped},
              {"up", to_json(m.up)},
              {"down", to_json(m.down)},
              {"simulated_duration_ms", m.simulated_duration_ms}};
}

}  // namespace tlsprof

#include "tlsprof/bench_harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "tlsprof/errors.hpp"
#include "tlsprof/pipeline.hpp"

namespace tlsprof {

std::string_view to_string(Backend b) {
  return b == Backend::kModel ? "model" : "loopback";
}

std::optional<Backend> parse_backend(std::string_view s) {
  if (s == "model") return Backend::kModel;
  if (s == "loopback") return Backend::kLoopback;
  return std::nullopt;
}

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::kOk:
      return "ok";
    case RunStatus::kSkipped:
      return "skipped";
    case RunStatus::kError:
      return "error";
  }
  return "ok";
}

std::string_view to_string(GroupBy g) {
  return g == GroupBy::kAuthMechanism ? "auth_mechanism" : "curve";
}

std::optional<GroupBy> parse_group_by(std::string_view s) {
  if (s == "auth_mechanism") return GroupBy::kAuthMechanism;
  if (s == "curve") return GroupBy::kCurve;
  return std::nullopt;
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

double population_stddev(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

namespace {

void fill_stats(ConfigResult& r) {
  std::vector<double> up, down, total;
  for (const auto& s : r.samples) {
    up.push_back(static_cast<double>(s.up));
    down.push_back(static_cast<double>(s.down));
    total.push_back(static_cast<double>(s.total()));
  }
  r.mean_up = mean(up);
  r.mean_down = mean(down);
  r.mean_total = mean(total);
  r.stddev_total = population_stddev(total);
}

void run_model(const CampaignSpec& spec, const AlgoSizeCatalog& catalog,
               ConfigResult& r) {
  // The model is deterministic, but every run is still evaluated so the
  // samples are genuine.
  for (int i = 0; i < spec.runs_per_config; ++i) {
    const auto t = estimate_transcript(r.config, catalog);
    const auto [up, down] = apply_transport_overhead(t, spec.transport);
    r.samples.push_back({up, down});
  }
}

void run_loopback(const CampaignSpec& spec, const StackAdapter& adapter,
                  ConfigResult& r) {
  if (!adapter.supports(r.config)) {
    r.status = RunStatus::kSkipped;
    r.reason = "linked stack or fixtures cannot honor this config";
    return;
  }
  std::vector<double> app_up, app_down;
  for (int i = 0; i < spec.runs_per_config; ++i) {
    const LoopbackReport rep = adapter.loopback_handshake(r.config, spec.app_payload);
    r.samples.push_back({rep.up_bytes, rep.down_bytes});
    app_up.push_back(static_cast<double>(rep.app_up_bytes));
    app_down.push_back(static_cast<double>(rep.app_down_bytes));
  }
  r.mean_app_up = mean(app_up);
  r.mean_app_down = mean(app_down);
}

}  // namespace

CampaignResult run_campaign(const CampaignSpec& spec,
                            const AlgoSizeCatalog& catalog,
                            const StackAdapter& adapter) {
  if (spec.configs.empty()) throw ConfigError("campaign: matrix is empty");
  if (spec.runs_per_config < 1) throw ConfigError("campaign: runs_per_config must be >= 1");
  if (spec.backend == Backend::kLoopback && spec.transport != TransportMode::kNone) {
    throw ConfigError("campaign: loopback captures TLS records; transport must be none");
  }
  CampaignResult result;
  result.backend = spec.backend;
  result.runs_per_config = spec.runs_per_config;
  result.transport = spec.transport;
  for (const auto& config : spec.configs) {
    ConfigResult r;
    r.config = config;
    try {
      if (spec.backend == Backend::kModel) {
        run_model(spec, catalog, r);
      } else {
        run_loopback(spec, adapter, r);
      }
    } catch (const Error& e) {
      r.status = RunStatus::kError;
      r.reason = e.what();
      r.samples.clear();
      r.mean_app_up.reset();
      r.mean_app_down.reset();
    }
    if (r.status == RunStatus::kOk) fill_stats(r);
    result.configs.push_back(std::move(r));
  }
  return result;
}

std::vector<ReportRow> compare(const CampaignResult& result, GroupBy group_by) {
  struct Acc {
    std::size_t configs = 0;
    std::vector<double> up, down, total, all_totals;
  };
  std::map<std::string, Acc> groups;
  for (const auto& r : result.configs) {
    if (r.status != RunStatus::kOk) continue;
    const std::string& key = group_by == GroupBy::kAuthMechanism
                                 ? r.config.signature_scheme
                                 : r.config.key_exchange;
    Acc& a = groups[key];
    ++a.configs;
    a.up.push_back(r.mean_up);
    a.down.push_back(r.mean_down);
    a.total.push_back(r.mean_total);
    for (const auto& s : r.samples) a.all_totals.push_back(static_cast<double>(s.total()));
  }
  std::vector<ReportRow> rows;
  for (const auto& [key, a] : groups) {
    rows.push_back({key, a.configs, mean(a.up), mean(a.down), mean(a.total),
                    population_stddev(a.all_totals)});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& x, const ReportRow& y) {
    return x.mean_total != y.mean_total ? x.mean_total < y.mean_total : x.group < y.group;
  });
  return rows;
}

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::string out = "group,configs,mean_up,mean_down,mean_total,stddev_total\n";
  for (const auto& r : rows) {
    out += r.group + ',' + std::to_string(r.configs) + ',' + num(r.mean_up) + ',' +
           num(r.mean_down) + ',' + num(r.mean_total) + ',' + num(r.stddev_total) + '\n';
  }
  return out;
}

std::string report_text(const std::vector<ReportRow>& rows) {
  const std::vector<std::string> header{"group", "configs", "mean_up", "mean_down",
                                        "mean_total", "stddev_total"};
  std::vector<std::vector<std::string>> cells{header};
  for (const auto& r : rows) {
    cells.push_back({r.group, std::to_string(r.configs), num(r.mean_up),
                     num(r.mean_down), num(r.mean_total), num(r.stddev_total)});
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : cells) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::string out;
  for (const auto& row : cells) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      const std::string pad(width[i] - row[i].size(), ' ');
      // Group names read left-aligned, numbers right-aligned.
      out += i == 0 ? row[i] + pad : pad + row[i];
      if (i + 1 < row.size()) out += "  ";
    }
    out += '\n';
  }
  return out;
}

std::string report_gnuplot(const std::vector<ReportRow>& rows) {
  std::string out = "# index group mean_up mean_down mean_total stddev_total\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out += std::to_string(i) + ' ' + '"' + r.group + '"' + ' ' + num(r.mean_up) + ' ' +
           num(r.mean_down) + ' ' + num(r.mean_total) + ' ' + num(r.stddev_total) + '\n';
  }
  return out;
}

Json to_json(const CampaignSpec& s) {
  Json configs = Json::array();
  for (const auto& c : s.configs) configs.push_back(to_json(c));
  return Json{{"schema_version", kSchemaVersion},
              {"configs", configs},
              {"runs_per_config", s.runs_per_config},
              {"backend", to_string(s.backend)},
              {"app_payload",
               {{"message_bytes", s.app_payload.message_bytes},
                {"message_count", s.app_payload.message_count}}},
              {"transport", to_string(s.transport)}};
}

CampaignSpec campaign_spec_from_json(const Json& doc,
                                     const AlgoSizeCatalog& catalog) {
  const JsonReader r(doc, "campaign");
  r.expect_object({"schema_version", "configs", "runs_per_config", "backend",
                   "app_payload", "transport"});
  check_schema_version(r);
  CampaignSpec s;
  const JsonReader configs = r.child("configs");
  if (!configs.node().is_array()) r.fail("configs", "expected array");
  for (std::size_t i = 0; i < configs.node().size(); ++i) {
    s.configs.push_back(matrix_entry_from_json(
        JsonReader(configs.node()[i], configs.path() + "[" + std::to_string(i) + "]"),
        catalog));
  }
  if (r.has("runs_per_config")) {
    s.runs_per_config = static_cast<int>(r.get_int("runs_per_config"));
  }
  if (r.has("backend")) {
    const auto b = parse_backend(r.get_string("backend"));
    if (!b) r.fail("backend", "expected model or loopback");
    s.backend = *b;
  }
  if (r.has("app_payload")) {
    const JsonReader p = r.child("app_payload");
    p.expect_object({"message_bytes", "message_count"});
    if (p.has("message_bytes")) s.app_payload.message_bytes = p.get_bytes("message_bytes");
    if (p.has("message_count")) {
      s.app_payload.message_count = static_cast<int>(p.get_int("message_count"));
    }
  }
  if (r.has("transport")) {
    const auto t = parse_transport_mode(r.get_string("transport"));
    if (!t) r.fail("transport", "unknown transport mode");
    s.transport = *t;
  }
  return s;
}

Json to_json(const CampaignResult& r) {
  Json configs = Json::array();
  for (const auto& c : r.configs) {
    Json samples = Json::array();
    for (const auto& s : c.samples) samples.push_back({{"up", s.up}, {"down", s.down}});
    Json j{{"config", to_json(c.config)},
           {"status", to_string(c.status)},
           {"samples", samples}};
    if (c.status == RunStatus::kOk) {
      j["mean_up"] = c.mean_up;
      j["mean_down"] = c.mean_down;
      j["mean_total"] = c.mean_total;
      j["stddev_total"] = c.stddev_total;
    } else {
      j["reason"] = c.reason;
    }
    if (c.mean_app_up) j["mean_app_up"] = *c.mean_app_up;
    if (c.mean_app_down) j["mean_app_down"] = *c.mean_app_down;
    configs.push_back(std::move(j));
  }
  return Json{{"schema_version", kSchemaVersion},
              {"backend", to_string(r.backend)},
              {"runs_per_config", r.runs_per_config},
              {"transport", to_string(r.transport)},
              {"configs", configs}};
}

}  // namespace tlsprof

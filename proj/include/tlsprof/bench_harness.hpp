#pragma once

// Measurement campaigns over a configuration matrix. Each config is run
// runs_per_config times through either the cost model or the loopback
// stack; per-config means and population standard deviation are computed
// from the raw samples, which are kept in the result.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tlsprof/cost_model.hpp"
#include "tlsprof/json_io.hpp"
#include "tlsprof/profile.hpp"
#include "tlsprof/stack_adapter.hpp"

namespace tlsprof {

enum class Backend { kModel, kLoopback };

std::string_view to_string(Backend b);
std::optional<Backend> parse_backend(std::string_view s);

struct CampaignSpec {
  std::vector<TlsConfig> configs;
  int runs_per_config = 30;
  Backend backend = Backend::kModel;
  PayloadSpec app_payload;
  // Applied by the model backend only; loopback counts TLS records.
  TransportMode transport = TransportMode::kNone;
};

struct Sample {
  ByteCount up = 0;
  ByteCount down = 0;

  ByteCount total() const { return up + down; }
  bool operator==(const Sample&) const = default;
};

enum class RunStatus { kOk, kSkipped, kError };

std::string_view to_string(RunStatus s);

struct ConfigResult {
  TlsConfig config;
  RunStatus status = RunStatus::kOk;
  std::string reason;  // set for skipped and errored configs
  std::vector<Sample> samples;
  double mean_up = 0, mean_down = 0, mean_total = 0, stddev_total = 0;
  // Loopback only: application records of the payload exchange.
  std::optional<double> mean_app_up;
  std::optional<double> mean_app_down;
};

struct CampaignResult {
  Backend backend = Backend::kModel;
  int runs_per_config = 0;
  TransportMode transport = TransportMode::kNone;
  std::vector<ConfigResult> configs;  // matrix order
};

double mean(const std::vector<double>& xs);
/// Population standard deviation (divides by n).
double population_stddev(const std::vector<double>& xs);

/// Throws ConfigError for an empty matrix or runs_per_config < 1.
/// Per-config failures are recorded and the campaign carries on.
CampaignResult run_campaign(const CampaignSpec& spec,
                            const AlgoSizeCatalog& catalog = builtin_catalog(),
                            const StackAdapter& adapter = StackAdapter());

enum class GroupBy { kAuthMechanism, kCurve };

std::string_view to_string(GroupBy g);
std::optional<GroupBy> parse_group_by(std::string_view s);

struct ReportRow {
  std::string group;
  std::size_t configs = 0;
  double mean_up = 0, mean_down = 0, mean_total = 0;
  // Over all samples of the group's configs.
  double stddev_total = 0;

  bool operator==(const ReportRow&) const = default;
};

/// Successful configs grouped by signature scheme or key-exchange group,
/// sorted by mean_total then group name.
std::vector<ReportRow> compare(const CampaignResult& result, GroupBy group_by);

std::string report_csv(const std::vector<ReportRow>& rows);
std::string report_text(const std::vector<ReportRow>& rows);
/// Whitespace-separated columns for gnuplot bar charts.
std::string report_gnuplot(const std::vector<ReportRow>& rows);

Json to_json(const CampaignSpec& s);
/// Configs may omit cert_chain (see matrix_entry_from_json).
CampaignSpec campaign_spec_from_json(
    const Json& doc, const AlgoSizeCatalog& catalog = builtin_catalog());
Json to_json(const CampaignResult& r);

}  // namespace tlsprof

// tlsprof: command-line front end for profile generation, measurement,
// simulation, selection and replay.
//
// Exit codes:
//   0  success
//   2  usage error
//   3  parse or schema error in an input file
//   4  validation or configuration error
//   5  no feasible profile (select), or a replay with infeasible steps
//   6  I/O error
//   7  any other failure (handshake errors, unsupported configs, ...)

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tlsprof/bench_harness.hpp"
#include "tlsprof/cost_model.hpp"
#include "tlsprof/errors.hpp"
#include "tlsprof/link_simulator.hpp"
#include "tlsprof/pipeline.hpp"
#include "tlsprof/selector.hpp"

namespace fs = std::filesystem;
using namespace tlsprof;

namespace {

enum Exit { kOk = 0, kUsage = 2, kParse = 3, kInvalid = 4, kInfeasible = 5, kIo = 6, kOther = 7 };

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw IoError("cannot write " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

AlgoSizeCatalog catalog_or_builtin(const std::string& path) {
  return path.empty() ? builtin_catalog() : load_catalog(path);
}

ReplayOptions options_or_default(const std::string& path) {
  return path.empty() ? ReplayOptions{} : replay_options_from_json(read_json_file(path));
}

struct GenerateArgs {
  std::string matrix, catalog, out, transport = "none";
  bool no_prune = false;
};

int cmd_generate(const GenerateArgs& a) {
  const AlgoSizeCatalog catalog = catalog_or_builtin(a.catalog);
  const auto matrix = config_matrix_from_json(read_json_file(a.matrix), catalog);
  GenerateOptions options;
  options.prune = !a.no_prune;
  const auto mode = parse_transport_mode(a.transport);
  if (!mode) throw ConfigError("unknown transport mode '" + a.transport + "'");
  options.transport = *mode;
  const ProfileStore store = generate_profiles(matrix, catalog, options);
  save_store(store, a.out);
  std::cout << "generated " << store.profiles().size() << " profiles from "
            << matrix.size() << " configs -> " << a.out << '\n';
  for (const auto& p : store.profiles()) {
    std::cout << "  " << p.id << "  " << p.security.classical_bits
              << (p.security.pq_secure ? "/pq" : "") << "  up=" << p.overhead.handshake_bytes_up
              << " down=" << p.overhead.handshake_bytes_down << '\n';
  }
  return kOk;
}

int cmd_validate(const std::string& store_path) {
  const ProfileStore store = load_store(store_path);
  std::size_t bad = 0;
  for (const auto& p : store.profiles()) {
    for (const auto& v : validate_profile(p)) {
      std::cout << p.id << ": " << v.field << ": " << v.message << '\n';
      ++bad;
    }
  }
  std::cout << store.profiles().size() << " profiles, " << bad << " violations\n";
  return bad == 0 ? kOk : kInvalid;
}

int cmd_transcript(const std::string& config_path, const std::string& catalog_path,
                   const std::string& out) {
  const AlgoSizeCatalog catalog = catalog_or_builtin(catalog_path);
  const Json doc = read_json_file(config_path);
  const TlsConfig config = matrix_entry_from_json(JsonReader(doc, "config"), catalog);
  const auto t = estimate_transcript(config, catalog);
  const std::string csv = transcript_csv(t);
  if (out.empty()) {
    std::cout << csv;
  } else {
    write_text(out, csv);
  }
  std::cerr << "up=" << t.up_total << " down=" << t.down_total << '\n';
  return kOk;
}

int cmd_measure(const std::string& spec_path, const std::string& out,
                const std::string& group_by_name, const std::string& catalog_path) {
  const auto group_by = parse_group_by(group_by_name);
  if (!group_by) throw ConfigError("unknown grouping '" + group_by_name + "'");
  const AlgoSizeCatalog catalog = catalog_or_builtin(catalog_path);
  const CampaignSpec spec = campaign_spec_from_json(read_json_file(spec_path), catalog);
  const CampaignResult result = run_campaign(spec, catalog);
  const auto rows = compare(result, *group_by);
  ensure_dir(out);
  write_json_file(to_json(result), fs::path(out) / "result.json");
  write_text(fs::path(out) / "comparison.csv", report_csv(rows));
  write_text(fs::path(out) / "comparison.txt", report_text(rows));
  write_text(fs::path(out) / "comparison.dat", report_gnuplot(rows));
  std::cout << report_text(rows);
  for (const auto& r : result.configs) {
    if (r.status != RunStatus::kOk) {
      std::cout << to_string(r.status) << ": " << profile_id(r.config) << ": " << r.reason
                << '\n';
    }
  }
  return kOk;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out,
                 std::optional<std::uint64_t> seed) {
  Scenario s = scenario_from_json(read_json_file(scenario_path));
  if (seed) s.seed = *seed;
  const SimResult r = run(s.link, s.workload, s.seed, s.duration_ms);
  ensure_dir(out);
  write_json_file(to_json(r.metrics), fs::path(out) / "metrics.json");
  emit_trace(r, out, s.trace_window_ms);
  const auto& m = r.metrics;
  std::cout << "transactions: started=" << m.transactions_started
            << " completed=" << m.transactions_completed
            << " dropped=" << m.transactions_dropped << '\n'
            << "latency_ms: min=" << m.aggregate.min << " p25=" << m.aggregate.p25
            << " median=" << m.aggregate.median << " p75=" << m.aggregate.p75
            << " p95=" << m.aggregate.p95 << " max=" << m.aggregate.max << '\n'
            << "up: offered=" << m.up.offered_bytes << " delivered=" << m.up.delivered_bytes
            << " dropped=" << m.up.dropped_bytes << '\n'
            << "down: offered=" << m.down.offered_bytes
            << " delivered=" << m.down.delivered_bytes
            << " dropped=" << m.down.dropped_bytes << '\n';
  return kOk;
}

int cmd_select(const std::string& store_path, const std::string& constraints_path,
               const std::string& prev, const std::string& policy_path,
               const std::string& out) {
  const ProfileStore store = load_store(store_path);
  const Json cdoc = read_json_file(constraints_path);
  const ConstraintSet c = constraint_set_from_json(JsonReader(cdoc, "constraints"));
  const SelectionPolicy policy = options_or_default(policy_path).selection;
  const std::optional<std::string> prev_id =
      prev.empty() ? std::nullopt : std::optional<std::string>(prev);
  try {
    const SelectionResult r = select(store, c, prev_id, policy);
    std::cout << explain(r, store, c, policy);
    Json doc = to_json(r);
    doc["schema_version"] = kSchemaVersion;
    if (!out.empty()) write_json_file(doc, out);
    return kOk;
  } catch (const NoFeasibleProfile& e) {
    std::cout << explain_infeasible(e, store, c);
    if (!out.empty()) {
      Json rejections = Json::array();
      for (const auto& r : e.rejections()) {
        rejections.push_back({{"id", r.id}, {"constraint", r.constraint}});
      }
      write_json_file({{"schema_version", kSchemaVersion}, {"no_feasible_profile", rejections}},
                      out);
    }
    return kInfeasible;
  }
}

int cmd_replay(const std::string& store_path, const std::string& trace_path,
               const std::string& meta_path, const std::string& policy_path,
               const std::string& out) {
  const ProfileStore store = load_store(store_path);
  const auto trace = load_trace(trace_path);
  const Json mdoc = read_json_file(meta_path);
  const AppMetadata meta = app_metadata_from_json(JsonReader(mdoc, "meta"));
  const ReplayTimeline t = replay(store, trace, meta, options_or_default(policy_path));
  std::cout << timeline_text(t);
  if (!out.empty()) write_json_file(to_json(t), out);
  return t.summary.infeasible == 0 ? kOk : kInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TLS handshake overhead profiling and adaptive profile selection"};
  app.require_subcommand(1);

  auto* profiles = app.add_subcommand("profiles", "Generate or validate profile stores");
  profiles->require_subcommand(1);
  GenerateArgs gen;
  auto* generate = profiles->add_subcommand("generate", "Build a profile store from a config matrix");
  generate->add_option("--matrix", gen.matrix, "Config matrix JSON")->required();
  generate->add_option("--catalog", gen.catalog, "Algorithm size catalog JSON");
  generate->add_option("--out", gen.out, "Output store JSON")->required();
  generate->add_option("--transport", gen.transport, "none or tcp_ipv4");
  generate->add_flag("--no-prune", gen.no_prune, "Keep dominated profiles");
  std::string validate_store;
  auto* validate_cmd = profiles->add_subcommand("validate", "Check every profile in a store");
  validate_cmd->add_option("--store", validate_store)->required();

  std::string tr_config, tr_catalog, tr_out;
  auto* transcript = app.add_subcommand("transcript", "Per-message byte breakdown as CSV");
  transcript->add_option("--config", tr_config, "TlsConfig JSON")->required();
  transcript->add_option("--catalog", tr_catalog);
  transcript->add_option("--out", tr_out, "CSV path (stdout if omitted)");

  std::string m_spec, m_out, m_group = "auth_mechanism", m_catalog;
  auto* measure = app.add_subcommand("measure", "Run a measurement campaign");
  measure->add_option("--spec", m_spec, "Campaign spec JSON")->required();
  measure->add_option("--out", m_out, "Output directory")->required();
  measure->add_option("--group-by", m_group, "auth_mechanism or curve");
  measure->add_option("--catalog", m_catalog);

  std::string s_scenario, s_out;
  std::optional<std::uint64_t> s_seed;
  auto* simulate = app.add_subcommand("simulate", "Run the link simulator");
  simulate->add_option("--scenario", s_scenario, "Scenario JSON")->required();
  simulate->add_option("--out", s_out, "Output directory")->required();
  simulate->add_option("--seed", s_seed, "Override the scenario seed");

  std::string sel_store, sel_constraints, sel_prev, sel_policy, sel_out;
  auto* select_cmd = app.add_subcommand("select", "Select a profile for a constraint set");
  select_cmd->add_option("--store", sel_store)->required();
  select_cmd->add_option("--constraints", sel_constraints)->required();
  select_cmd->add_option("--prev", sel_prev, "Previously selected profile id");
  select_cmd->add_option("--policy", sel_policy, "Policy JSON");
  select_cmd->add_option("--out", sel_out, "Result JSON");

  std::string r_store, r_trace, r_meta, r_policy, r_out;
  auto* replay_cmd = app.add_subcommand("replay", "Replay an observation trace through the selector");
  replay_cmd->add_option("--store", r_store)->required();
  replay_cmd->add_option("--trace", r_trace, "Observation CSV")->required();
  replay_cmd->add_option("--meta", r_meta, "Application metadata JSON")->required();
  replay_cmd->add_option("--policy", r_policy, "Policy JSON");
  replay_cmd->add_option("--out", r_out, "Timeline JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*validate_cmd) return cmd_validate(validate_store);
    if (*transcript) return cmd_transcript(tr_config, tr_catalog, tr_out);
    if (*measure) return cmd_measure(m_spec, m_out, m_group, m_catalog);
    if (*simulate) return cmd_simulate(s_scenario, s_out, s_seed);
    if (*select_cmd) return cmd_select(sel_store, sel_constraints, sel_prev, sel_policy, sel_out);
    if (*replay_cmd) return cmd_replay(r_store, r_trace, r_meta, r_policy, r_out);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return kParse;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kInvalid;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kInvalid;
  } catch (const CatalogMissError& e) {
    std::cerr << "catalog error: " << e.what() << '\n';
    return kInvalid;
  } catch (const OrderingError& e) {
    std::cerr << "trace error: " << e.what() << '\n';
    return kInvalid;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
  return kUsage;
}

#include <gtest/gtest.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "tlsprof/bench_harness.hpp"
#include "tlsprof/stack_adapter.hpp"

using namespace tlsprof;

namespace {

TlsConfig config(std::string group, std::string sig) {
  TlsConfig c;
  c.version = TlsVersion::kTls13;
  c.key_exchange = std::move(group);
  c.signature_scheme = sig;
  c.cipher_suite = "TLS_AES_128_GCM_SHA256";
  c.cert_chain = sample_chain(builtin_catalog(), sig);
  return c;
}

CampaignSpec model_spec(std::vector<TlsConfig> configs) {
  CampaignSpec s;
  s.configs = std::move(configs);
  return s;
}

std::vector<std::string> groups(const std::vector<ReportRow>& rows) {
  std::vector<std::string> out;
  for (const auto& r : rows) out.push_back(r.group);
  return out;
}

}  // namespace

TEST(Stats, HandArithmetic) {
  EXPECT_DOUBLE_EQ(mean({100, 110, 120}), 110);
  EXPECT_NEAR(population_stddev({100, 110, 120}), 8.165, 5e-4);
  EXPECT_EQ(population_stddev({42}), 0);
}

TEST(Stats, MatchesNaiveRecomputation) {
  gen::Rng rng(37);
  for (int i = 0; i < 2000; ++i) {
    std::vector<double> xs;
    const auto n = rng.between(1, 60);
    for (int k = 0; k < n; ++k) xs.push_back(static_cast<double>(rng.between(0, 40000)));
    EXPECT_NEAR(mean(xs), oracle::naive_mean(xs), 1e-9);
    EXPECT_NEAR(population_stddev(xs), oracle::naive_pop_stddev(xs), 1e-7);
  }
}

TEST(Campaign, ModelBackendHasZeroSpread) {
  const auto r = run_campaign(model_spec({config("x25519", "ed25519"), config("secp384r1", "rsa2048")}));
  ASSERT_EQ(r.configs.size(), 2u);
  for (const auto& c : r.configs) {
    EXPECT_EQ(c.status, RunStatus::kOk);
    EXPECT_EQ(c.samples.size(), 30u);
    EXPECT_EQ(c.stddev_total, 0.0);
  }
}

TEST(Campaign, ResultStatsAgreeWithRawSamples) {
  const StackAdapter a;
  CampaignSpec s;
  s.backend = Backend::kLoopback;
  s.runs_per_config = 10;
  for (auto [g, sig] : std::vector<std::pair<std::string, std::string>>{
           {"x25519", "ed25519"}, {"secp256r1", "ecdsa_p256"}}) {
    TlsConfig c = config(g, sig);
    c.cert_chain = *a.fixture_chain(sig);
    c.mutual_auth = true;
    s.configs.push_back(c);
  }
  const auto r = run_campaign(s, builtin_catalog(), a);
  for (const auto& c : r.configs) {
    ASSERT_EQ(c.status, RunStatus::kOk) << c.reason;
    std::vector<double> totals, ups;
    for (const auto& x : c.samples) {
      totals.push_back(static_cast<double>(x.total()));
      ups.push_back(static_cast<double>(x.up));
    }
    EXPECT_NEAR(c.mean_total, oracle::naive_mean(totals), 1e-9);
    EXPECT_NEAR(c.mean_up, oracle::naive_mean(ups), 1e-9);
    EXPECT_NEAR(c.stddev_total, oracle::naive_pop_stddev(totals), 1e-9);
    EXPECT_TRUE(c.mean_app_up.has_value());
  }
}

TEST(Campaign, UnsupportedLoopbackConfigIsSkipped) {
  CampaignSpec s;
  s.backend = Backend::kLoopback;
  s.runs_per_config = 2;
  const StackAdapter a;
  TlsConfig ok = config("x25519", "ed25519");
  ok.cert_chain = *a.fixture_chain("ed25519");
  s.configs = {config("x25519_mlkem768_hybrid", "mldsa65"), ok};
  const auto r = run_campaign(s, builtin_catalog(), a);
  EXPECT_EQ(r.configs[0].status, RunStatus::kSkipped);
  EXPECT_FALSE(r.configs[0].reason.empty());
  EXPECT_TRUE(r.configs[0].samples.empty());
  EXPECT_EQ(r.configs[1].status, RunStatus::kOk);
}

TEST(Campaign, RejectsEmptyOrZeroRuns) {
  EXPECT_THROW(run_campaign(model_spec({})), ConfigError);
  auto s = model_spec({config("x25519", "ed25519")});
  s.runs_per_config = 0;
  EXPECT_THROW(run_campaign(s), ConfigError);
}

TEST(Compare, SingleConfigSingleRow) {
  const auto rows = compare(run_campaign(model_spec({config("x25519", "ed25519")})),
                            GroupBy::kAuthMechanism);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].group, "ed25519");
  const auto csv = report_csv(rows);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
}

TEST(Compare, CurveSweepIncreases) {
  const auto rows = compare(run_campaign(model_spec({config("secp521r1", "ecdsa_p521"),
                                                     config("secp256r1", "ecdsa_p256"),
                                                     config("secp384r1", "ecdsa_p384")})),
                            GroupBy::kCurve);
  EXPECT_EQ(groups(rows), (std::vector<std::string>{"secp256r1", "secp384r1", "secp521r1"}));
  EXPECT_LT(rows[0].mean_total, rows[1].mean_total);
  EXPECT_LT(rows[1].mean_total, rows[2].mean_total);
}

TEST(Compare, MldsaIsLargestAuthMechanism) {
  const auto rows = compare(run_campaign(model_spec({config("x25519", "mldsa65"),
                                                     config("x25519", "ed25519"),
                                                     config("x25519", "rsa2048"),
                                                     config("x25519", "ecdsa_p256")})),
                            GroupBy::kAuthMechanism);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows.back().group, "mldsa65");
  EXPECT_GE(rows.back().mean_total / rows.front().mean_total, 2.0);
}

TEST(Compare, GroupStddevOverAllSamples) {
  CampaignResult r;
  ConfigResult a, b;
  a.config = config("x25519", "ed25519");
  b.config = config("secp256r1", "ed25519");
  a.samples = {{50, 50}, {55, 55}};
  b.samples = {{60, 60}};
  r.configs = {a, b};
  const auto rows = compare(r, GroupBy::kAuthMechanism);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].configs, 2u);
  EXPECT_NEAR(rows[0].stddev_total, oracle::naive_pop_stddev({100, 110, 120}), 1e-9);
}

TEST(Spec, JsonRoundTrip) {
  auto s = model_spec({config("x25519", "ed25519")});
  s.runs_per_config = 7;
  s.transport = TransportMode::kTcpIpv4;
  const auto back = campaign_spec_from_json(to_json(s));
  EXPECT_EQ(back.configs, s.configs);
  EXPECT_EQ(back.runs_per_config, 7);
  EXPECT_EQ(back.transport, TransportMode::kTcpIpv4);
}

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "tlsprof/errors.hpp"
#include "tlsprof/json_io.hpp"
#include "tlsprof/pipeline.hpp"

using namespace tlsprof;

namespace {

const std::string kData = TLSPROF_TEST_DATA_DIR;

Json entry(const std::string& group, const std::string& sig, bool mutual = true) {
  return {{"version", "TLS1_3"},
          {"key_exchange", group},
          {"signature_scheme", sig},
          {"cipher_suite", "TLS_AES_128_GCM_SHA256"},
          {"mutual_auth", mutual},
          {"resumption", "none"}};
}

std::vector<TlsConfig> matrix(const std::vector<Json>& entries) {
  Json doc{{"schema_version", 1}, {"configs", entries}};
  return config_matrix_from_json(doc, builtin_catalog());
}

Profile classical(std::string id, ByteCount total) {
  Profile p;
  p.id = std::move(id);
  p.config = matrix({entry("x25519", "ed25519")})[0];
  p.security = {128, false};
  p.overhead.handshake_bytes_up = total / 2;
  p.overhead.handshake_bytes_down = total - total / 2;
  return p;
}

Profile pq(std::string id, ByteCount total) {
  Profile p = classical(std::move(id), total);
  p.config.key_exchange = "x25519_mlkem768_hybrid";
  p.security.pq_secure = true;
  return p;
}

std::vector<LinkObservation> constant_trace(int n, double goodput) {
  std::vector<LinkObservation> t;
  for (int i = 1; i <= n; ++i) t.push_back({i * 1000, goodput, 0.0, std::nullopt});
  return t;
}

void expect_reverifiable(const ReplayTimeline& t, const ProfileStore& store,
                         const SelectionPolicy& pol) {
  for (const auto& e : t.entries) {
    if (e.result) {
      EXPECT_EQ(select(store, e.constraints, e.prev, pol), *e.result) << e.timestamp_ms;
    } else {
      EXPECT_THROW(select(store, e.constraints, e.prev, pol), NoFeasibleProfile);
    }
  }
}

}  // namespace

TEST(Generate, SingleConfig) {
  const auto store = generate_profiles(matrix({entry("x25519", "ed25519")}), builtin_catalog());
  ASSERT_EQ(store.size(), 1u);
  const auto& p = store.profiles()[0];
  EXPECT_EQ(p.id, "tls13-x25519-ed25519-aes128gcm-mutual");
  const auto want = total_bytes(estimate_transcript(p.config, builtin_catalog()));
  EXPECT_EQ(p.overhead.handshake_bytes_up, want.first);
  EXPECT_EQ(p.overhead.handshake_bytes_down, want.second);
  EXPECT_EQ(p.security, (SecurityLevel{128, false}));
}

TEST(Generate, DominatedConfigOmitted) {
  // rsa2048 is weaker and larger than ed25519 on the same group.
  const auto m = matrix({entry("x25519", "ed25519"), entry("x25519", "rsa2048"),
                         entry("secp384r1", "ecdsa_p384")});
  const auto pruned = generate_profiles(m, builtin_catalog());
  GenerateOptions keep;
  keep.prune = false;
  const auto all = generate_profiles(m, builtin_catalog(), keep);
  EXPECT_EQ(all.size(), 3u);
  EXPECT_EQ(pruned, ProfileStore(oracle::undominated(all.profiles())));
  EXPECT_EQ(pruned.find("tls13-x25519-rsa2048-aes128gcm-mutual"), nullptr);
}

TEST(Generate, Tls12WithPqGroupAborts) {
  auto bad = entry("mlkem768", "ecdsa_p256");
  bad["version"] = "TLS1_2";
  bad["cipher_suite"] = "TLS_ECDHE_ECDSA_WITH_AES_128_GCM_SHA256";
  try {
    generate_profiles(matrix({entry("x25519", "ed25519"), bad}), builtin_catalog());
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("configs[1]"), std::string::npos);
  }
}

TEST(Replay, ConstantTraceGivesOneEvent) {
  const ProfileStore store({classical("a", 1400), pq("b", 20000)});
  const auto t = replay(store, constant_trace(30, 100000), AppMetadata());
  ASSERT_EQ(t.summary.events, 1u);
  EXPECT_EQ(t.entries[0].result->reason, SelectionReason::kInitial);
  EXPECT_EQ(t.summary.switches, 0u);
}

TEST(Replay, BudgetBoundaryCrossingSwitchesAtMostTwice) {
  const ProfileStore store({classical("a", 1400), pq("b", 20000)});
  // Budget falls from 50000 B past 20000 B and stays there.
  std::vector<LinkObservation> trace = constant_trace(10, 80000);
  for (int i = 11; i <= 40; ++i) trace.push_back({i * 1000, 16000.0, 0.0, std::nullopt});
  const auto t = replay(store, trace, AppMetadata());
  EXPECT_LE(t.summary.switches, 2u);
  EXPECT_GE(t.summary.switches, 1u);
  EXPECT_EQ(t.entries.front().result->chosen, "b");
  EXPECT_EQ(t.entries.back().result->chosen, "a");
  expect_reverifiable(t, store, {});
}

TEST(Replay, OverloadFallbackAndReturn) {
  const auto store = load_store(kData + "/overload/store.json");
  const auto trace = load_trace(kData + "/overload/trace.csv");
  const auto meta = app_metadata_from_json(
      JsonReader(read_json_file(kData + "/overload/meta.json"), "meta"));
  const auto opts = replay_options_from_json(read_json_file(kData + "/overload/policy.json"));
  const auto t = replay(store, trace, meta, opts);
  const std::string a = "tls13-x25519-ed25519-aes128gcm-mutual";
  const std::string b = "tls13-x25519_mlkem768_hybrid-mldsa65-aes128gcm-mutual";
  ASSERT_EQ(t.entries.size(), 3u);
  EXPECT_EQ(t.entries[0].timestamp_ms, 1000);
  EXPECT_EQ(t.entries[0].result->chosen, b);
  EXPECT_EQ(t.entries[0].result->reason, SelectionReason::kInitial);
  EXPECT_EQ(t.entries[1].timestamp_ms, 10000);
  EXPECT_EQ(t.entries[1].result->chosen, a);
  EXPECT_EQ(t.entries[1].result->reason, SelectionReason::kOverloadFallback);
  EXPECT_EQ(t.entries[2].timestamp_ms, 14000);
  EXPECT_EQ(t.entries[2].result->chosen, b);
  EXPECT_EQ(t.entries[2].result->reason, SelectionReason::kConstraintChange);
  EXPECT_EQ(t.summary.switches, 2u);
  expect_reverifiable(t, store, opts.selection);
}

TEST(Replay, InfeasibleStepsRecordedAndReplayContinues) {
  const ProfileStore store({classical("a", 6000)});
  std::vector<LinkObservation> trace = constant_trace(3, 80000);
  // 80000 * 0.8^n falls under the 9600 bit/s that a 6000 B budget needs at n = 10.
  for (int i = 4; i <= 18; ++i) trace.push_back({i * 1000, 800.0, 0.0, std::nullopt});
  const auto t = replay(store, trace, AppMetadata());
  EXPECT_GE(t.summary.infeasible, 1u);
  EXPECT_FALSE(t.entries.back().rejections.empty());
  expect_reverifiable(t, store, {});
  EXPECT_EQ(to_json(t)["entries"].size(), t.entries.size());
  EXPECT_NE(timeline_text(t).find("a"), std::string::npos);
}

TEST(Replay, EmptyStoreRejected) {
  EXPECT_THROW(replay(ProfileStore(), constant_trace(2, 1000), AppMetadata()), ConfigError);
}

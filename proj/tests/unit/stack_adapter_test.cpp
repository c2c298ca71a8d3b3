#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

#include "tlsprof/cost_model.hpp"
#include "tlsprof/stack_adapter.hpp"

using namespace tlsprof;

namespace {

constexpr int kCertificate = 11;
constexpr int kCertificateRequest = 13;
constexpr int kCertificateVerify = 15;

TlsConfig fixture_config(const StackAdapter& a, std::string group, std::string sig,
                         bool mutual = true) {
  TlsConfig c;
  c.version = TlsVersion::kTls13;
  c.key_exchange = std::move(group);
  c.signature_scheme = sig;
  c.cipher_suite = "TLS_AES_128_GCM_SHA256";
  c.mutual_auth = mutual;
  c.cert_chain = *a.fixture_chain(sig);
  return c;
}

ByteCount sealed_bytes(const LoopbackReport& r, Direction d, int type) {
  ByteCount n = 0;
  for (const auto& m : r.messages) {
    if (m.direction == d && m.handshake_type == type) n += m.length + 22;
  }
  return n;
}

}  // namespace

TEST(Supports, Baseline) {
  const StackAdapter a;
  EXPECT_TRUE(a.supports(fixture_config(a, "x25519", "ed25519")));
}

TEST(Supports, InvalidCombination) {
  const StackAdapter a;
  TlsConfig c = fixture_config(a, "mlkem768", "ecdsa_p256");
  c.version = TlsVersion::kTls12;
  c.cipher_suite = "TLS_ECDHE_ECDSA_WITH_AES_128_GCM_SHA256";
  EXPECT_FALSE(a.supports(c));
}

TEST(Supports, UnknownGroup) {
  const StackAdapter a;
  EXPECT_FALSE(a.supports(fixture_config(a, "nonsense", "ed25519")));
}

TEST(Supports, ChainMustMatchFixture) {
  const StackAdapter a;
  TlsConfig c = fixture_config(a, "x25519", "ed25519");
  c.cert_chain.cert_sizes[0] += 1;
  EXPECT_FALSE(a.supports(c));
}

TEST(Loopback, UnsupportedRefused) {
  const StackAdapter a;
  EXPECT_THROW(a.loopback_handshake(fixture_config(a, "nonsense", "ed25519")), CapabilityError);
}

TEST(Loopback, Ed25519RepeatsHaveZeroVariance) {
  const StackAdapter a;
  const auto c = fixture_config(a, "x25519", "ed25519");
  const auto first = a.loopback_handshake(c);
  for (int i = 0; i < 29; ++i) {
    const auto r = a.loopback_handshake(c);
    EXPECT_EQ(r.up_bytes, first.up_bytes);
    EXPECT_EQ(r.down_bytes, first.down_bytes);
  }
  EXPECT_FALSE(first.mismatched);
  EXPECT_EQ(first.negotiated.group, "x25519");
}

TEST(Loopback, EcdsaRepeatsVaryBySignatureLengthOnly) {
  // DER-encoded ECDSA signatures shrink by a byte or two at random.
  const StackAdapter a;
  const auto c = fixture_config(a, "secp256r1", "ecdsa_p256");
  ByteCount lo = ~ByteCount{0}, hi = 0;
  for (int i = 0; i < 30; ++i) {
    const auto r = a.loopback_handshake(c);
    lo = std::min(lo, r.up_bytes);
    hi = std::max(hi, r.up_bytes);
  }
  EXPECT_LE(hi - lo, 72u - 70u + 4u);
}

TEST(Loopback, MutualAuthDeltaIsClientCredentials) {
  const StackAdapter a;
  for (const char* sig : {"ed25519", "rsa2048"}) {
    const auto with = a.loopback_handshake(fixture_config(a, "x25519", sig, true));
    const auto without = a.loopback_handshake(fixture_config(a, "x25519", sig, false));
    EXPECT_EQ(with.up_bytes - without.up_bytes,
              sealed_bytes(with, Direction::kUp, kCertificate) +
                  sealed_bytes(with, Direction::kUp, kCertificateVerify))
        << sig;
    EXPECT_EQ(with.down_bytes - without.down_bytes,
              sealed_bytes(with, Direction::kDown, kCertificateRequest))
        << sig;
    EXPECT_EQ(sealed_bytes(without, Direction::kUp, kCertificate), 0u);
  }
}

TEST(Loopback, PhaseSplitAccountsForEveryByte) {
  const StackAdapter a;
  for (const char* sig : {"ed25519", "ecdsa_p384", "rsa2048"}) {
    const auto r = a.loopback_handshake(fixture_config(a, "secp384r1", sig));
    EXPECT_EQ(r.up_bytes + r.app_up_bytes, r.client_transport_bytes) << sig;
    EXPECT_EQ(r.down_bytes + r.app_down_bytes, r.server_transport_bytes) << sig;
    // Two 128 B messages, one each way, in one sealed record apiece.
    EXPECT_EQ(r.app_up_bytes, 128u + 22u);
  }
}

TEST(Fixtures, DerSizesMatchCatalogSamples) {
  const StackAdapter a;
  const auto cat = builtin_catalog();
  for (const char* sig : {"ed25519", "ecdsa_p256", "ecdsa_p384", "ecdsa_p521", "rsa2048"}) {
    const auto chain = a.fixture_chain(sig);
    ASSERT_TRUE(chain.has_value()) << sig;
    EXPECT_EQ(chain->cert_sizes, sample_chain(cat, sig).cert_sizes) << sig;
  }
  EXPECT_FALSE(a.fixture_chain("mldsa65").has_value());
}

TEST(Fixtures, EnvironmentOverride) {
  ::setenv(kFixtureDirEnv, "/nonexistent/fixtures", 1);
  EXPECT_EQ(default_fixture_dir(), "/nonexistent/fixtures");
  ::unsetenv(kFixtureDirEnv);
  EXPECT_NE(default_fixture_dir(), "/nonexistent/fixtures");
}

TEST(Calibration, ModelWithinTenPercentOfCapture) {
  const StackAdapter a;
  const auto cat = builtin_catalog();
  for (auto [g, s] : std::vector<std::pair<std::string, std::string>>{
           {"x25519", "ed25519"}, {"secp256r1", "ecdsa_p256"}, {"secp384r1", "ecdsa_p384"},
           {"secp521r1", "ecdsa_p521"}, {"x25519", "rsa2048"}}) {
    for (bool mutual : {true, false}) {
      const auto c = fixture_config(a, g, s, mutual);
      const auto model = total_bytes(estimate_transcript(c, cat));
      const auto real = a.loopback_handshake(c);
      EXPECT_LE(std::abs(double(model.first) - double(real.up_bytes)) / real.up_bytes, 0.10)
          << g << "/" << s;
      EXPECT_LE(std::abs(double(model.second) - double(real.down_bytes)) / real.down_bytes, 0.10)
          << g << "/" << s;
    }
  }
}

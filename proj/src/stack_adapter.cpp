#include "tlsprof/stack_adapter.hpp"

#include <openssl/bio.h>
#include <openssl/err.h>
#include <openssl/evp.h>
#include <openssl/pem.h>
#include <openssl/ssl.h>
#include <openssl/x509.h>

#include <cstdlib>
#include <fstream>
#include <memory>
#include <string_view>

#ifndef TLSPROF_DEFAULT_FIXTURE_DIR
#define TLSPROF_DEFAULT_FIXTURE_DIR "fixtures/certs"
#endif

namespace tlsprof {

namespace {

struct SslCtxDeleter {
  void operator()(SSL_CTX* p) const { SSL_CTX_free(p); }
};
struct SslDeleter {
  void operator()(SSL* p) const { SSL_free(p); }
};
struct X509Deleter {
  void operator()(X509* p) const { X509_free(p); }
};
using SslCtxPtr = std::unique_ptr<SSL_CTX, SslCtxDeleter>;
using SslPtr = std::unique_ptr<SSL, SslDeleter>;
using X509Ptr = std::unique_ptr<X509, X509Deleter>;

struct NameMap {
  std::string_view ours;
  std::string_view openssl;
};

// Group names as OpenSSL spells them. PQ entries are probed at run time and
// simply fail on stacks that lack them.
constexpr NameMap kGroups[] = {
    {"x25519", "X25519"},
    {"secp256r1", "P-256"},
    {"secp384r1", "P-384"},
    {"secp521r1", "P-521"},
    {"brainpoolP256r1", "brainpoolP256r1"},
    {"mlkem768", "MLKEM768"},
    {"x25519_mlkem768_hybrid", "X25519MLKEM768"},
};

constexpr NameMap kGroupsTls13Override[] = {
    {"brainpoolP256r1", "brainpoolP256r1tls13"},
};

constexpr NameMap kSigalgsTls13[] = {
    {"ed25519", "ed25519"},
    {"ecdsa_p256", "ecdsa_secp256r1_sha256"},
    {"ecdsa_p384", "ecdsa_secp384r1_sha384"},
    {"ecdsa_p521", "ecdsa_secp521r1_sha512"},
    {"rsa2048", "rsa_pss_rsae_sha256"},
    {"mldsa65", "mldsa65"},
};

constexpr NameMap kSigalgsTls12[] = {
    {"ed25519", "ed25519"},
    {"ecdsa_p256", "ECDSA+SHA256"},
    {"ecdsa_p384", "ECDSA+SHA384"},
    {"ecdsa_p521", "ECDSA+SHA512"},
    {"rsa2048", "RSA+SHA256"},
};

constexpr NameMap kTls12Ciphers[] = {
    {"TLS_ECDHE_ECDSA_WITH_AES_128_GCM_SHA256", "ECDHE-ECDSA-AES128-GCM-SHA256"},
    {"TLS_ECDHE_ECDSA_WITH_AES_256_GCM_SHA384", "ECDHE-ECDSA-AES256-GCM-SHA384"},
    {"TLS_ECDHE_ECDSA_WITH_CHACHA20_POLY1305_SHA256",
     "ECDHE-ECDSA-CHACHA20-POLY1305"},
    {"TLS_ECDHE_RSA_WITH_AES_128_GCM_SHA256", "ECDHE-RSA-AES128-GCM-SHA256"},
    {"TLS_ECDHE_RSA_WITH_AES_256_GCM_SHA384", "ECDHE-RSA-AES256-GCM-SHA384"},
};

// TLS 1.2 only accepts an ECDSA certificate whose curve is among the
// offered groups; with a single offered group they must coincide.
constexpr NameMap kTls12EcdsaCurve[] = {
    {"ecdsa_p256", "secp256r1"},
    {"ecdsa_p384", "secp384r1"},
    {"ecdsa_p521", "secp521r1"},
};

struct NidMap {
  int nid;
  std::string_view ours;
};

const NidMap kGroupNids[] = {
    {NID_X25519, "x25519"},
    {NID_X9_62_prime256v1, "secp256r1"},
    {NID_secp384r1, "secp384r1"},
    {NID_secp521r1, "secp521r1"},
    {NID_brainpoolP256r1, "brainpoolP256r1"},
};

template <std::size_t N>
std::optional<std::string> lookup(const NameMap (&table)[N],
                                  std::string_view key) {
  for (const auto& e : table) {
    if (e.ours == key) return std::string(e.openssl);
  }
  return std::nullopt;
}

std::optional<std::string> openssl_group(const TlsConfig& c) {
  if (c.version == TlsVersion::kTls13) {
    if (auto o = lookup(kGroupsTls13Override, c.key_exchange)) return o;
  }
  return lookup(kGroups, c.key_exchange);
}

std::optional<std::string> openssl_sigalg(const TlsConfig& c) {
  return c.version == TlsVersion::kTls13
             ? lookup(kSigalgsTls13, c.signature_scheme)
             : lookup(kSigalgsTls12, c.signature_scheme);
}

std::string openssl_errors() {
  std::string out;
  unsigned long code = 0;
  char buf[256];
  while ((code = ERR_get_error()) != 0) {
    ERR_error_string_n(code, buf, sizeof(buf));
    if (!out.empty()) out += "; ";
    out += buf;
  }
  return out.empty() ? "no OpenSSL diagnostics" : out;
}

int version_constant(TlsVersion v) {
  return v == TlsVersion::kTls13 ? TLS1_3_VERSION : TLS1_2_VERSION;
}

X509Ptr read_certificate(const std::filesystem::path& pem) {
  BIO* bio = BIO_new_file(pem.string().c_str(), "r");
  if (bio == nullptr) return nullptr;
  X509* cert = PEM_read_bio_X509(bio, nullptr, nullptr, nullptr);
  BIO_free(bio);
  return X509Ptr(cert);
}

// Applies the algorithm restrictions to a context. Returns false when the
// stack rejects any of them.
bool restrict_context(SSL_CTX* ctx, const TlsConfig& c) {
  const int v = version_constant(c.version);
  if (SSL_CTX_set_min_proto_version(ctx, v) != 1) return false;
  if (SSL_CTX_set_max_proto_version(ctx, v) != 1) return false;
  SSL_CTX_set_options(ctx, SSL_OP_NO_TICKET);
  SSL_CTX_clear_options(ctx, SSL_OP_ENABLE_MIDDLEBOX_COMPAT);
  SSL_CTX_set_num_tickets(ctx, 0);

  const auto group = openssl_group(c);
  const auto sigalg = openssl_sigalg(c);
  if (!group || !sigalg) return false;
  if (SSL_CTX_set1_groups_list(ctx, group->c_str()) != 1) return false;
  if (SSL_CTX_set1_sigalgs_list(ctx, sigalg->c_str()) != 1) return false;
  if (SSL_CTX_set1_client_sigalgs_list(ctx, sigalg->c_str()) != 1) return false;
  if (c.version == TlsVersion::kTls13) {
    if (SSL_CTX_set_ciphersuites(ctx, c.cipher_suite.c_str()) != 1) return false;
  } else {
    const auto cipher = lookup(kTls12Ciphers, c.cipher_suite);
    if (!cipher) return false;
    if (SSL_CTX_set_cipher_list(ctx, cipher->c_str()) != 1) return false;
  }
  return true;
}

struct Capture {
  std::vector<ObservedMessage>* messages;
  Direction sent_direction;
};

void on_message(int write_p, int /*version*/, int content_type, const void* buf,
                size_t len, SSL* /*ssl*/, void* arg) {
  if (content_type != SSL3_RT_HANDSHAKE || len < 4) return;
  auto* cap = static_cast<Capture*>(arg);
  const auto* bytes = static_cast<const unsigned char*>(buf);
  const Direction dir =
      write_p ? cap->sent_direction
              : (cap->sent_direction == Direction::kUp ? Direction::kDown
                                                       : Direction::kUp);
  // Each message is reported by both peers; keep only the sender's view.
  if (!write_p) return;
  cap->messages->push_back({dir, bytes[0], static_cast<ByteCount>(len)});
}

// Moves all pending bytes out of one peer's write BIO into the other's
// read BIO and returns the count.
ByteCount transfer(BIO* from, BIO* to) {
  ByteCount moved = 0;
  char buf[16384];
  for (;;) {
    const int n = BIO_read(from, buf, sizeof(buf));
    if (n <= 0) break;
    if (BIO_write(to, buf, n) != n) {
      throw ProtocolError("memory BIO write failed");
    }
    moved += static_cast<ByteCount>(n);
  }
  return moved;
}

bool wants_io(SSL* ssl, int rc) {
  const int err = SSL_get_error(ssl, rc);
  return err == SSL_ERROR_WANT_READ || err == SSL_ERROR_WANT_WRITE;
}

std::string group_name_from_nid(int nid) {
  for (const auto& e : kGroupNids) {
    if (e.nid == nid) return std::string(e.ours);
  }
  const char* sn = OBJ_nid2sn(nid);
  return sn != nullptr ? sn : "nid:" + std::to_string(nid);
}

}  // namespace

std::filesystem::path default_fixture_dir() {
  if (const char* env = std::getenv(kFixtureDirEnv); env != nullptr && *env) {
    return env;
  }
  return TLSPROF_DEFAULT_FIXTURE_DIR;
}

StackAdapter::StackAdapter(std::filesystem::path fixture_dir)
    : fixture_dir_(std::move(fixture_dir)) {}

std::optional<CertChainSpec> StackAdapter::fixture_chain(
    const std::string& scheme) const {
  X509Ptr cert = read_certificate(fixture_dir_ / scheme / "cert.pem");
  if (!cert) return std::nullopt;
  const int der = i2d_X509(cert.get(), nullptr);
  if (der <= 0) return std::nullopt;
  CertChainSpec chain;
  chain.chain_length = 1;
  chain.cert_sizes = {static_cast<ByteCount>(der)};
  chain.leaf_key_algorithm = scheme;
  return chain;
}

bool StackAdapter::supports(const TlsConfig& config) const {
  if (!validate_config(config).empty()) return false;
  if (config.resumption != Resumption::kNone) return false;
  if (config.version == TlsVersion::kTls12) {
    const auto curve = lookup(kTls12EcdsaCurve, config.signature_scheme);
    if (curve && *curve != config.key_exchange) return false;
  }
  const auto chain = fixture_chain(config.signature_scheme);
  if (!chain || *chain != config.cert_chain) return false;
  SslCtxPtr probe(SSL_CTX_new(TLS_method()));
  if (!probe) return false;
  const bool ok = restrict_context(probe.get(), config);
  ERR_clear_error();
  return ok;
}

LoopbackReport StackAdapter::loopback_handshake(
    const TlsConfig& config, const PayloadSpec& payload) const {
  if (!supports(config)) {
    throw CapabilityError("linked TLS stack cannot honor configuration " +
                          std::string(to_string(config.version)) + "/" +
                          config.key_exchange + "/" + config.signature_scheme +
                          "/" + config.cipher_suite);
  }
  const auto dir = fixture_dir_ / config.signature_scheme;
  const std::string cert_path = (dir / "cert.pem").string();
  const std::string key_path = (dir / "key.pem").string();
  X509Ptr trust = read_certificate(dir / "cert.pem");

  SslCtxPtr server_ctx(SSL_CTX_new(TLS_server_method()));
  SslCtxPtr client_ctx(SSL_CTX_new(TLS_client_method()));
  if (!server_ctx || !client_ctx || !trust) {
    throw ProtocolError("context setup failed: " + openssl_errors());
  }
  for (SSL_CTX* ctx : {server_ctx.get(), client_ctx.get()}) {
    if (!restrict_context(ctx, config)) {
      throw ProtocolError("algorithm restriction failed: " + openssl_errors());
    }
    if (X509_STORE_add_cert(SSL_CTX_get_cert_store(ctx), trust.get()) != 1) {
      throw ProtocolError("trust store setup failed: " + openssl_errors());
    }
  }
  auto load_identity = [&](SSL_CTX* ctx) {
    if (SSL_CTX_use_certificate_file(ctx, cert_path.c_str(), SSL_FILETYPE_PEM) != 1 ||
        SSL_CTX_use_PrivateKey_file(ctx, key_path.c_str(), SSL_FILETYPE_PEM) != 1) {
      throw ProtocolError("loading fixture " + dir.string() + " failed: " +
                          openssl_errors());
    }
  };
  load_identity(server_ctx.get());
  SSL_CTX_set_verify(client_ctx.get(), SSL_VERIFY_PEER, nullptr);
  if (config.mutual_auth) {
    load_identity(client_ctx.get());
    SSL_CTX_set_verify(server_ctx.get(),
                       SSL_VERIFY_PEER | SSL_VERIFY_FAIL_IF_NO_PEER_CERT,
                       nullptr);
  }

  LoopbackReport report;
  Capture client_capture{&report.messages, Direction::kUp};
  Capture server_capture{&report.messages, Direction::kDown};
  SSL_CTX_set_msg_callback(client_ctx.get(), on_message);
  SSL_CTX_set_msg_callback(server_ctx.get(), on_message);

  SslPtr client(SSL_new(client_ctx.get()));
  SslPtr server(SSL_new(server_ctx.get()));
  if (!client || !server) {
    throw ProtocolError("session setup failed: " + openssl_errors());
  }
  SSL_set_msg_callback_arg(client.get(), &client_capture);
  SSL_set_msg_callback_arg(server.get(), &server_capture);

  // Each SSL owns its two memory BIOs once attached.
  BIO* client_in = BIO_new(BIO_s_mem());
  BIO* client_out = BIO_new(BIO_s_mem());
  BIO* server_in = BIO_new(BIO_s_mem());
  BIO* server_out = BIO_new(BIO_s_mem());
  SSL_set_bio(client.get(), client_in, client_out);
  SSL_set_bio(server.get(), server_in, server_out);
  SSL_set_connect_state(client.get());
  SSL_set_accept_state(server.get());

  ByteCount up = 0;
  ByteCount down = 0;
  bool client_done = false;
  bool server_done = false;
  for (int round = 0; round < 64 && !(client_done && server_done); ++round) {
    if (!client_done) {
      const int rc = SSL_do_handshake(client.get());
      if (rc == 1) {
        client_done = true;
      } else if (!wants_io(client.get(), rc)) {
        throw ProtocolError("client handshake failed: " + openssl_errors());
      }
    }
    up += transfer(client_out, server_in);
    if (!server_done) {
      const int rc = SSL_do_handshake(server.get());
      if (rc == 1) {
        server_done = true;
      } else if (!wants_io(server.get(), rc)) {
        throw ProtocolError("server handshake failed: " + openssl_errors());
      }
    }
    down += transfer(server_out, client_in);
  }
  if (!(client_done && server_done)) {
    throw ProtocolError("handshake did not complete");
  }
  up += transfer(client_out, server_in);
  down += transfer(server_out, client_in);
  report.up_bytes = up;
  report.down_bytes = down;

  const std::string message(payload.message_bytes, 'm');
  std::string sink(payload.message_bytes + 1, '\0');
  for (int i = 0; i < payload.message_count; ++i) {
    const bool from_client = (i % 2) == 0;
    SSL* writer = from_client ? client.get() : server.get();
    SSL* reader = from_client ? server.get() : client.get();
    if (!message.empty() &&
        SSL_write(writer, message.data(), static_cast<int>(message.size())) <= 0) {
      throw ProtocolError("application write failed: " + openssl_errors());
    }
    if (from_client) {
      report.app_up_bytes += transfer(client_out, server_in);
    } else {
      report.app_down_bytes += transfer(server_out, client_in);
    }
    std::size_t received = 0;
    while (received < message.size()) {
      const int n = SSL_read(reader, sink.data(), static_cast<int>(sink.size()));
      if (n <= 0) {
        throw ProtocolError("application read failed: " + openssl_errors());
      }
      received += static_cast<std::size_t>(n);
    }
    // Reads can trigger protocol output (e.g. key updates); account for it.
    report.app_up_bytes += transfer(client_out, server_in);
    report.app_down_bytes += transfer(server_out, client_in);
  }
  report.client_transport_bytes = report.up_bytes + report.app_up_bytes;
  report.server_transport_bytes = report.down_bytes + report.app_down_bytes;

  NegotiatedParams& neg = report.negotiated;
  neg.version = SSL_version(client.get()) == TLS1_3_VERSION ? TlsVersion::kTls13
                                                             : TlsVersion::kTls12;
  if (const SSL_CIPHER* cipher = SSL_get_current_cipher(client.get())) {
    neg.cipher_suite = SSL_CIPHER_standard_name(cipher);
  }
  EVP_PKEY* tmp = nullptr;
  if (SSL_get_peer_tmp_key(client.get(), &tmp) == 1 && tmp != nullptr) {
    char name[80] = {0};
    size_t name_len = 0;
    if (EVP_PKEY_get_group_name(tmp, name, sizeof(name), &name_len) == 1) {
      neg.group = group_name_from_nid(OBJ_sn2nid(name));
    } else {
      neg.group = group_name_from_nid(EVP_PKEY_get_base_id(tmp));
    }
    EVP_PKEY_free(tmp);
  }
  ERR_clear_error();

  const NegotiatedParams requested{config.version, config.key_exchange,
                                   config.cipher_suite};
  if (neg != requested) {
    report.mismatched = true;
    throw MismatchError("negotiated " + std::string(to_string(neg.version)) +
                            "/" + neg.group + "/" + neg.cipher_suite +
                            " differs from requested " +
                            std::string(to_string(config.version)) + "/" +
                            config.key_exchange + "/" + config.cipher_suite,
                        report);
  }
  return report;
}

}  // namespace tlsprof

#pragma once

// Reference implementations used by tests. They are written directly from
// the documented rules and deliberately share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "tlsprof/constraint_monitor.hpp"
#include "tlsprof/profile.hpp"
#include "tlsprof/selector.hpp"

namespace oracle {

using tlsprof::ByteCount;
using tlsprof::Profile;

inline ByteCount bytes_of(const Profile& p) {
  return p.overhead.handshake_bytes_up + p.overhead.handshake_bytes_down;
}

// O(n^2) pairwise dominance filter, input order preserved.
inline std::vector<Profile> undominated(const std::vector<Profile>& in) {
  std::vector<Profile> out;
  for (const auto& q : in) {
    bool dominated = false;
    for (const auto& p : in) {
      if (&p == &q) continue;
      const bool geq = p.security.classical_bits >= q.security.classical_bits &&
                       (p.security.pq_secure || !q.security.pq_secure) &&
                       bytes_of(p) <= bytes_of(q);
      const bool strict = p.security.classical_bits > q.security.classical_bits ||
                          (p.security.pq_secure && !q.security.pq_secure) ||
                          bytes_of(p) < bytes_of(q);
      if (geq && strict) dominated = true;
    }
    if (!dominated) out.push_back(q);
  }
  return out;
}

// TLS 1.3 full handshake, one record per message. Plaintext records cost a
// 5 B header; protected records add a content-type byte and a 16 B tag.
struct Tls13Sizes {
  ByteCount client_share, server_share;
  ByteCount signature;
  std::vector<ByteCount> cert_sizes;
  ByteCount finished_hash = 32;
  bool mutual = true;
};

inline std::pair<ByteCount, ByteCount> tls13_totals(const Tls13Sizes& s) {
  const ByteCount plain = 5, sealed = 5 + 1 + 16, hs = 4;
  ByteCount certificate = hs + 1 + 3;
  for (ByteCount c : s.cert_sizes) certificate += 3 + c + 2;
  const ByteCount verify = hs + 2 + 2 + s.signature;
  const ByteCount finished = hs + s.finished_hash;

  ByteCount up = plain + hs + 100 + s.client_share;  // ClientHello
  ByteCount down = plain + hs + 54 + s.server_share;  // ServerHello
  down += sealed + hs + 2;                            // EncryptedExtensions
  if (s.mutual) down += sealed + hs + 11;             // CertificateRequest
  down += (sealed + certificate) + (sealed + verify) + (sealed + finished);
  if (s.mutual) up += (sealed + certificate) + (sealed + verify);
  up += sealed + finished;
  return {up, down};
}

inline std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) {
  std::uint64_t q = 0;
  while (q * b < a) ++q;
  return q;
}

inline double naive_mean(const std::vector<double>& xs) {
  long double s = 0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : static_cast<double>(s / xs.size());
}

inline double naive_pop_stddev(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  const long double m = naive_mean(xs);
  long double acc = 0;
  for (double x : xs) acc += (x - m) * (x - m);
  return static_cast<double>(std::sqrt(acc / xs.size()));
}

// Exhaustive selector: enumerate every candidate and keep the one that no
// other candidate beats under the documented order.
struct Outcome {
  bool infeasible = false;
  std::string chosen;
  tlsprof::SelectionReason reason = tlsprof::SelectionReason::kInitial;
  std::vector<std::string> feasible_set;
};

inline bool admissible(const Profile& p, const tlsprof::ConstraintSet& c) {
  if (p.security.classical_bits < c.min_security_bits) return false;
  if (c.require_pq && !p.security.pq_secure) return false;
  if (c.max_handshake_bytes && bytes_of(p) > *c.max_handshake_bytes) return false;
  return true;
}

// Rank key: larger is better.
inline std::tuple<int, int, std::int64_t> key(const Profile& p,
                                              const tlsprof::SelectionPolicy& pol) {
  return {pol.pq_opportunistic && p.security.pq_secure ? 1 : 0,
          p.security.classical_bits, -static_cast<std::int64_t>(bytes_of(p))};
}

inline bool better(const Profile& a, const Profile& b,
                   const tlsprof::SelectionPolicy& pol) {
  if (key(a, pol) != key(b, pol)) return key(a, pol) > key(b, pol);
  return a.id < b.id;
}

inline Outcome select(const std::vector<Profile>& store,
                      const tlsprof::ConstraintSet& c,
                      const std::optional<std::string>& prev,
                      const tlsprof::SelectionPolicy& pol) {
  Outcome o;
  std::vector<const Profile*> cand, excluded;
  for (const auto& p : store) {
    if (!admissible(p, c)) continue;
    if (c.overload && pol.overload_fallback && p.security.pq_secure) {
      excluded.push_back(&p);
      continue;
    }
    cand.push_back(&p);
  }
  if (cand.empty()) {
    o.infeasible = true;
    return o;
  }
  for (const auto* p : cand) o.feasible_set.push_back(p->id);
  std::sort(o.feasible_set.begin(), o.feasible_set.end());

  const Profile* best = nullptr;
  for (const auto* p : cand) {
    bool beaten = false;
    for (const auto* q : cand) {
      if (q != p && better(*q, *p, pol)) beaten = true;
    }
    if (!beaten) best = p;
  }

  const Profile* held = nullptr;
  for (const auto* p : cand) {
    if (prev && p->id == *prev) held = p;
  }
  if (held && held != best) {
    const bool same_tier = std::get<0>(key(*held, pol)) == std::get<0>(key(*best, pol)) &&
                           std::get<1>(key(*held, pol)) == std::get<1>(key(*best, pol));
    if (same_tier && bytes_of(*held) < bytes_of(*best) + pol.switch_margin_bytes) {
      o.chosen = held->id;
      o.reason = tlsprof::SelectionReason::kHysteresisHold;
      return o;
    }
  }
  o.chosen = best->id;
  bool fallback = false;
  for (const auto* e : excluded) fallback = fallback || better(*e, *best, pol);
  bool prev_known = false;
  for (const auto& p : store) prev_known = prev_known || (prev && p.id == *prev);
  if (fallback) {
    o.reason = tlsprof::SelectionReason::kOverloadFallback;
  } else if (!prev_known) {
    o.reason = tlsprof::SelectionReason::kInitial;
  } else {
    o.reason = tlsprof::SelectionReason::kConstraintChange;
  }
  return o;
}

}  // namespace oracle

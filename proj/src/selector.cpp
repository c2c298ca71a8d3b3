#include "tlsprof/selector.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace tlsprof {

std::string_view to_string(SelectionReason r) {
  switch (r) {
    case SelectionReason::kInitial:
      return "initial";
    case SelectionReason::kConstraintChange:
      return "constraint_change";
    case SelectionReason::kOverloadFallback:
      return "overload_fallback";
    case SelectionReason::kHysteresisHold:
      return "hysteresis_hold";
  }
  return "initial";
}

std::optional<SelectionReason> parse_selection_reason(std::string_view s) {
  for (auto r : {SelectionReason::kInitial, SelectionReason::kConstraintChange,
                 SelectionReason::kOverloadFallback,
                 SelectionReason::kHysteresisHold}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

std::optional<std::string> binding_constraint(const Profile& p,
                                              const ConstraintSet& c) {
  if (p.security.classical_bits < c.min_security_bits) {
    return "min_security_bits: " + std::to_string(p.security.classical_bits) +
           " < " + std::to_string(c.min_security_bits);
  }
  if (c.require_pq && !p.security.pq_secure) {
    return std::string("require_pq: profile is not pq_secure");
  }
  if (c.max_handshake_bytes && p.overhead.total() > *c.max_handshake_bytes) {
    return "max_handshake_bytes: " + std::to_string(p.overhead.total()) +
           " > " + std::to_string(*c.max_handshake_bytes);
  }
  return std::nullopt;
}

bool feasible(const Profile& p, const ConstraintSet& c) {
  return !binding_constraint(p, c).has_value();
}

namespace {

constexpr std::string_view kOverloadExclusion =
    "overload_fallback: pq_secure profiles excluded during overload";

auto tier(const Profile& p, const SelectionPolicy& policy) {
  const bool pq = policy.pq_opportunistic && p.security.pq_secure;
  return std::make_tuple(pq, p.security.classical_bits);
}

bool excluded_by_overload(const Profile& p, const ConstraintSet& c,
                          const SelectionPolicy& policy) {
  return c.overload && policy.overload_fallback && p.security.pq_secure;
}

}  // namespace

bool same_security_tier(const Profile& a, const Profile& b,
                        const SelectionPolicy& policy) {
  return tier(a, policy) == tier(b, policy);
}

bool ranks_above(const Profile& a, const Profile& b,
                 const SelectionPolicy& policy) {
  const auto ta = tier(a, policy);
  const auto tb = tier(b, policy);
  if (ta != tb) return ta > tb;
  if (a.overhead.total() != b.overhead.total()) {
    return a.overhead.total() < b.overhead.total();
  }
  return a.id < b.id;
}

NoFeasibleProfile::NoFeasibleProfile(std::vector<Rejection> rejections)
    : Error([&] {
        std::string msg = "no feasible profile";
        for (const auto& r : rejections) {
          msg += "; " + r.id + ": " + r.constraint;
        }
        return msg;
      }()),
      rejections_(std::move(rejections)) {}

SelectionResult select(const ProfileStore& store, const ConstraintSet& c,
                       const std::optional<std::string>& prev,
                       const SelectionPolicy& policy) {
  if (store.empty()) throw ConfigError("profile store is empty");

  SelectionResult result;
  std::vector<const Profile*> candidates;
  std::vector<const Profile*> excluded;
  std::vector<NoFeasibleProfile::Rejection> rejections;
  for (const auto& p : store.profiles()) {
    if (auto why = binding_constraint(p, c)) {
      rejections.push_back({p.id, *why});
    } else if (excluded_by_overload(p, c, policy)) {
      excluded.push_back(&p);
      rejections.push_back({p.id, std::string(kOverloadExclusion)});
    } else {
      candidates.push_back(&p);
      result.feasible_set.push_back(p.id);
    }
  }
  if (candidates.empty()) throw NoFeasibleProfile(std::move(rejections));

  const Profile* best = *std::min_element(
      candidates.begin(), candidates.end(),
      [&](const Profile* a, const Profile* b) { return ranks_above(*a, *b, policy); });

  const Profile* previous = prev ? store.find(*prev) : nullptr;
  const bool prev_feasible =
      previous != nullptr &&
      std::find(candidates.begin(), candidates.end(), previous) != candidates.end();

  if (prev_feasible && best != previous &&
      same_security_tier(*best, *previous, policy) &&
      previous->overhead.total() - best->overhead.total() <
          policy.switch_margin_bytes) {
    result.chosen = previous->id;
    result.reason = SelectionReason::kHysteresisHold;
    result.held_against = best->id;
    return result;
  }

  result.chosen = best->id;
  const bool fallback_applied =
      std::any_of(excluded.begin(), excluded.end(), [&](const Profile* p) {
        return ranks_above(*p, *best, policy);
      });
  if (fallback_applied) {
    result.reason = SelectionReason::kOverloadFallback;
  } else if (previous == nullptr) {
    result.reason = SelectionReason::kInitial;
  } else {
    result.reason = SelectionReason::kConstraintChange;
  }
  return result;
}

namespace {

std::string describe_constraints(const ConstraintSet& c) {
  std::ostringstream out;
  out << "constraints: max_handshake_bytes=";
  if (c.max_handshake_bytes) {
    out << *c.max_handshake_bytes;
  } else {
    out << "unlimited";
  }
  out << " min_security_bits=" << c.min_security_bits
      << " require_pq=" << (c.require_pq ? "true" : "false")
      << " overload=" << (c.overload ? "true" : "false");
  return out.str();
}

std::string describe_profile(const Profile& p) {
  return "security=" + std::to_string(p.security.classical_bits) + "/" +
         (p.security.pq_secure ? "pq" : "classical") +
         " bytes=" + std::to_string(p.overhead.total());
}

std::size_t id_width(const ProfileStore& store) {
  std::size_t w = 0;
  for (const auto& p : store.profiles()) w = std::max(w, p.id.size());
  return w;
}

}  // namespace

std::string explain(const SelectionResult& result, const ProfileStore& store,
                    const ConstraintSet& c, const SelectionPolicy& policy) {
  std::ostringstream out;
  out << "selection: chosen=" << result.chosen
      << " reason=" << to_string(result.reason) << '\n';
  out << describe_constraints(c) << '\n';
  const std::size_t width = id_width(store);
  for (const auto& p : store.profiles()) {
    std::string verdict;
    std::string detail = describe_profile(p);
    if (p.id == result.chosen) {
      verdict = "chosen";
    } else if (auto why = binding_constraint(p, c)) {
      verdict = "rejected";
      detail = *why;
    } else if (excluded_by_overload(p, c, policy)) {
      verdict = "rejected";
      detail = std::string(kOverloadExclusion);
    } else {
      verdict = "feasible";
    }
    out << "  " << p.id << std::string(width - p.id.size(), ' ') << "  "
        << verdict << std::string(8 - verdict.size(), ' ') << "  " << detail
        << '\n';
  }
  if (result.reason == SelectionReason::kHysteresisHold && result.held_against) {
    const Profile* held = store.find(result.chosen);
    const Profile* cand = store.find(*result.held_against);
    out << "hysteresis: holding prev=" << result.chosen
        << " against candidate=" << *result.held_against
        << " margin=" << policy.switch_margin_bytes;
    if (held != nullptr && cand != nullptr) {
      out << " advantage="
          << (held->overhead.total() - cand->overhead.total());
    }
    out << '\n';
  }
  return out.str();
}

std::string explain_infeasible(const NoFeasibleProfile& error,
                               const ProfileStore& store,
                               const ConstraintSet& c) {
  std::ostringstream out;
  out << "selection: no feasible profile\n" << describe_constraints(c) << '\n';
  const std::size_t width = id_width(store);
  for (const auto& r : error.rejections()) {
    out << "  " << r.id << std::string(width - r.id.size(), ' ')
        << "  rejected  " << r.constraint << '\n';
  }
  return out.str();
}

Json to_json(const SelectionResult& r) {
  Json j{{"chosen", r.chosen},
         {"feasible_set", r.feasible_set},
         {"reason", to_string(r.reason)}};
  if (r.held_against) j["held_against"] = *r.held_against;
  return j;
}

SelectionResult selection_result_from_json(const JsonReader& r) {
  r.expect_object({"chosen", "feasible_set", "reason", "held_against"});
  SelectionResult s;
  s.chosen = r.get_string("chosen");
  const JsonReader set = r.child("feasible_set");
  if (!set.node().is_array()) r.fail("feasible_set", "expected array");
  for (const auto& id : set.node()) {
    if (!id.is_string()) r.fail("feasible_set", "expected array of strings");
    s.feasible_set.push_back(id.get<std::string>());
  }
  const auto reason = parse_selection_reason(r.get_string("reason"));
  if (!reason) r.fail("reason", "unknown selection reason");
  s.reason = *reason;
  if (r.has("held_against")) s.held_against = r.get_string("held_against");
  return s;
}

Json to_json(const SelectionPolicy& p) {
  return Json{{"objective", "max_security_then_min_bytes"},
              {"switch_margin_bytes", p.switch_margin_bytes},
              {"pq_opportunistic", p.pq_opportunistic},
              {"overload_fallback", p.overload_fallback}};
}

SelectionPolicy selection_policy_from_json(const JsonReader& r) {
  r.expect_object({"objective", "switch_margin_bytes", "pq_opportunistic",
                   "overload_fallback"});
  SelectionPolicy p;
  if (r.has("objective") &&
      r.get_string("objective") != "max_security_then_min_bytes") {
    r.fail("objective", "only max_security_then_min_bytes is supported");
  }
  if (r.has("switch_margin_bytes")) {
    p.switch_margin_bytes = r.get_bytes("switch_margin_bytes");
  }
  if (r.has("pq_opportunistic")) p.pq_opportunistic = r.get_bool("pq_opportunistic");
  if (r.has("overload_fallback")) p.overload_fallback = r.get_bool("overload_fallback");
  return p;
}

}  // namespace tlsprof

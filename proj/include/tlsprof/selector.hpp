#pragma once

// Profile selection: filter the store by the current constraints, then take
// the best remaining profile under a total order (most secure first, then
// fewest handshake bytes, then id). A switching margin keeps the previous
// profile while a same-security alternative saves too little to be worth a
// change.

#include <optional>
#include <string>
#include <vector>

#include "tlsprof/constraint_monitor.hpp"
#include "tlsprof/errors.hpp"
#include "tlsprof/profile.hpp"

namespace tlsprof {

enum class Objective { kMaxSecurityThenMinBytes };

struct SelectionPolicy {
  Objective objective = Objective::kMaxSecurityThenMinBytes;
  ByteCount switch_margin_bytes = 1000;
  bool pq_opportunistic = true;
  bool overload_fallback = true;
};

enum class SelectionReason {
  kInitial,
  kConstraintChange,
  kOverloadFallback,
  kHysteresisHold
};

std::string_view to_string(SelectionReason r);
std::optional<SelectionReason> parse_selection_reason(std::string_view s);

struct SelectionResult {
  std::string chosen;
  std::vector<std::string> feasible_set;  // id order
  SelectionReason reason = SelectionReason::kInitial;
  // Set for hysteresis holds: the best candidate that was not taken.
  std::optional<std::string> held_against;

  bool operator==(const SelectionResult&) const = default;
};

/// Constraint that rules a profile out, or nullopt when it is feasible.
/// Checked in order: security floor, PQ requirement, byte budget.
std::optional<std::string> binding_constraint(const Profile& p,
                                              const ConstraintSet& c);

bool feasible(const Profile& p, const ConstraintSet& c);

/// True if a ranks strictly above b under the selection order. With
/// pq_opportunistic off, PQ status is ignored when ranking.
bool ranks_above(const Profile& a, const Profile& b,
                 const SelectionPolicy& policy = {});

/// Same security tier under the selection order.
bool same_security_tier(const Profile& a, const Profile& b,
                        const SelectionPolicy& policy = {});

class NoFeasibleProfile : public Error {
 public:
  struct Rejection {
    std::string id;
    std::string constraint;
  };

  explicit NoFeasibleProfile(std::vector<Rejection> rejections);
  const std::vector<Rejection>& rejections() const { return rejections_; }

 private:
  std::vector<Rejection> rejections_;
};

/// Throws ConfigError for an empty store and NoFeasibleProfile when no
/// profile survives the constraints.
SelectionResult select(const ProfileStore& store, const ConstraintSet& c,
                       const std::optional<std::string>& prev,
                       const SelectionPolicy& policy = {});

/// Deterministic human-readable account of a selection: one verdict line
/// per profile, naming the binding constraint for every rejection.
std::string explain(const SelectionResult& result, const ProfileStore& store,
                    const ConstraintSet& c, const SelectionPolicy& policy = {});

/// Report for a selection that failed.
std::string explain_infeasible(const NoFeasibleProfile& error,
                               const ProfileStore& store,
                               const ConstraintSet& c);

Json to_json(const SelectionResult& r);
SelectionResult selection_result_from_json(const JsonReader& r);
Json to_json(const SelectionPolicy& p);
SelectionPolicy selection_policy_from_json(const JsonReader& r);

}  // namespace tlsprof

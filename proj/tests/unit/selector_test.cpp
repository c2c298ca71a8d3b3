#include <gtest/gtest.h>

#include "oracles.hpp"
#include "selector_checks.hpp"
#include "tlsprof/selector.hpp"

using namespace tlsprof;

namespace {

Profile prof(std::string id, int bits, bool pq, ByteCount total) {
  return checks::grid_profile(id, bits, pq, total);
}

ProfileStore abc() {
  return ProfileStore({prof("A", 128, false, 4000), prof("B", 128, true, 15000),
                       prof("C", 192, false, 6000)});
}

ConstraintSet budget(ByteCount b) {
  ConstraintSet c;
  c.max_handshake_bytes = b;
  return c;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

void expect_clean(const checks::Tally& t, std::size_t min_cases) {
  EXPECT_GE(t.cases, min_cases);
  EXPECT_EQ(t.failures, 0u) << t.first_failure;
}

}  // namespace

TEST(Feasible, SecurityFloor) {
  ConstraintSet c;
  c.min_security_bits = 192;
  EXPECT_FALSE(feasible(prof("p", 128, false, 4000), c));
  EXPECT_EQ(binding_constraint(prof("p", 128, false, 4000), c), "min_security_bits: 128 < 192");
}

TEST(Feasible, SlackBudget) {
  EXPECT_TRUE(feasible(prof("p", 128, false, 4000), budget(50000)));
}

TEST(Feasible, PqGate) {
  ConstraintSet c;
  c.require_pq = true;
  EXPECT_FALSE(feasible(prof("p", 128, false, 4000), c));
  EXPECT_TRUE(feasible(prof("q", 128, true, 4000), c));
}

TEST(Select, EmptyStoreIsAPreconditionViolation) {
  EXPECT_THROW(select(ProfileStore(), ConstraintSet(), std::nullopt), ConfigError);
}

TEST(Select, Singleton) {
  const auto r = select(ProfileStore({prof("p1", 128, false, 1000)}), ConstraintSet(), std::nullopt);
  EXPECT_EQ(r.chosen, "p1");
  EXPECT_EQ(r.reason, SelectionReason::kInitial);
}

TEST(Select, PqPreferredUnderDocumentedOrder) {
  const auto r = select(abc(), budget(20000), std::nullopt);
  EXPECT_EQ(r.chosen, "B");
  EXPECT_EQ(r.feasible_set, (std::vector<std::string>{"A", "B", "C"}));
  const auto o = oracle::select(abc().profiles(), budget(20000), std::nullopt, {});
  EXPECT_EQ(o.chosen, "B");
}

TEST(Select, OverloadFallsBackToClassical) {
  auto c = budget(20000);
  c.overload = true;
  const auto r = select(abc(), c, std::string("B"));
  EXPECT_EQ(r.chosen, "C");
  EXPECT_EQ(r.reason, SelectionReason::kOverloadFallback);
  EXPECT_EQ(oracle::select(abc().profiles(), c, std::string("B"), {}).chosen, "C");
}

TEST(Select, OverloadWithoutFallbackKeepsPq) {
  auto c = budget(20000);
  c.overload = true;
  SelectionPolicy pol;
  pol.overload_fallback = false;
  EXPECT_EQ(select(abc(), c, std::nullopt, pol).chosen, "B");
}

TEST(Select, HysteresisHoldsCheapSameTierPrev) {
  const ProfileStore s({prof("x", 128, false, 4000), prof("y", 128, false, 3500)});
  const auto r = select(s, ConstraintSet(), std::string("x"));
  EXPECT_EQ(r.chosen, "x");
  EXPECT_EQ(r.reason, SelectionReason::kHysteresisHold);
  EXPECT_EQ(r.held_against, "y");
  // A saving at the margin is enough to switch.
  const ProfileStore t({prof("x", 128, false, 4000), prof("y", 128, false, 3000)});
  EXPECT_EQ(select(t, ConstraintSet(), std::string("x")).chosen, "y");
}

TEST(Select, InfeasibleListsEveryRejection) {
  ConstraintSet c = budget(100);
  c.min_security_bits = 192;
  try {
    select(abc(), c, std::nullopt);
    FAIL() << "expected NoFeasibleProfile";
  } catch (const NoFeasibleProfile& e) {
    ASSERT_EQ(e.rejections().size(), 3u);
    EXPECT_EQ(e.rejections()[2].id, "C");
    EXPECT_TRUE(contains(e.rejections()[2].constraint, "max_handshake_bytes"));
    const auto report = explain_infeasible(e, abc(), c);
    for (const char* id : {"A", "B", "C"}) EXPECT_TRUE(contains(report, std::string("  ") + id));
  }
}

TEST(Explain, BudgetRejectionNamesBothNumbers) {
  const auto c = budget(10000);
  const auto r = select(abc(), c, std::nullopt);
  const auto text = explain(r, abc(), c);
  EXPECT_TRUE(contains(text, "max_handshake_bytes"));
  EXPECT_TRUE(contains(text, "15000"));
  EXPECT_TRUE(contains(text, "10000"));
  EXPECT_TRUE(contains(text, "chosen=C"));
}

TEST(Explain, HysteresisNamesPrevAndMargin) {
  const ProfileStore s({prof("x", 128, false, 4000), prof("y", 128, false, 3500)});
  const auto r = select(s, ConstraintSet(), std::string("x"));
  const auto text = explain(r, s, ConstraintSet());
  EXPECT_TRUE(contains(text, "prev=x"));
  EXPECT_TRUE(contains(text, "margin=1000"));
  EXPECT_EQ(text, explain(r, s, ConstraintSet()));
}

TEST(Select, ResultJsonRoundTrip) {
  const ProfileStore s({prof("x", 128, false, 4000), prof("y", 128, false, 3500)});
  const auto r = select(s, ConstraintSet(), std::string("x"));
  EXPECT_EQ(selection_result_from_json(JsonReader(to_json(r), "r")), r);
}

TEST(SelectorOracle, GridEquivalence) { expect_clean(checks::grid_equivalence(), 10000); }

TEST(SelectorProperty, Soundness) { expect_clean(checks::soundness(2000, 101), 1000); }
TEST(SelectorProperty, Determinism) { expect_clean(checks::determinism(2000, 103), 1000); }
TEST(SelectorProperty, ScaleInvariance) { expect_clean(checks::scale_invariance(2000, 107), 1000); }
TEST(SelectorProperty, ArgmaxMonotonicity) {
  expect_clean(checks::argmax_monotonicity(2000, 109), 1000);
}
TEST(SelectorProperty, HysteresisSwitchBound) {
  expect_clean(checks::hysteresis_bound(1000, 113), 1000);
}

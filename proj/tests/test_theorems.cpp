#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace hadamard;

namespace hadamard {
inline void PrintTo(TheoremId id, std::ostream* os) { *os << to_string(id); }
}  // namespace hadamard

namespace {

ModeSpec suite_spec() {
  ModeSpec s;
  s.points = families::default_grid();
  s.lambdas = {1.0, 0.5, 0.1, 0.01};
  return s;
}

Verdict pass(double residual = 0.0) { return Verdict::consistent(residual, "ok"); }
Verdict fail() { return Verdict::violated(Witness{"(0)", 1.0, 7, 1.0, "synthetic"}, "synthetic failure"); }

TheoremReport two_step(Verdict hyp, Verdict concl) {
  TheoremReport r;
  r.theorem_id = "synthetic";
  r.add("h", Role::hypothesis, std::move(hyp));
  r.add("c", Role::conclusion, std::move(concl));
  r.implications.push_back({"h => c", {"h"}, {"c"}});
  settle(r);
  return r;
}

}  // namespace

TEST(TheoremIds, ParseAndList) {
  EXPECT_EQ(all_theorems().size(), 6u);
  for (auto id : all_theorems()) EXPECT_EQ(parse_theorem(to_string(id)), id);
  try {
    parse_theorem("thm9");
    FAIL();
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("attouch_hadamard"), std::string::npos);
  }
}

TEST(Settle, BothPass) {
  const auto r = two_step(pass(), pass(0.003));
  EXPECT_EQ(r.conclusion_verdict.outcome, Outcome::consistent_with);
  EXPECT_EQ(r.implications[0].outcome, Outcome::consistent_with);
  EXPECT_FALSE(r.falsification_flag);
}

TEST(Settle, FailedPremiseIsInconclusiveNotViolated) {
  const auto r = two_step(fail(), fail());
  EXPECT_EQ(r.implications[0].outcome, Outcome::inconclusive);
  EXPECT_EQ(r.conclusion_verdict.outcome, Outcome::inconclusive);
  EXPECT_FALSE(r.falsification_flag);
}

TEST(Settle, FalsificationPattern) {
  const auto r = two_step(pass(), fail());
  EXPECT_TRUE(r.falsification_flag);
  EXPECT_NE(r.conclusion_verdict.outcome, Outcome::consistent_with);
}

TEST(Settle, InconclusiveConclusion) {
  const auto r = two_step(pass(), Verdict::inconclusive("budget"));
  EXPECT_EQ(r.conclusion_verdict.outcome, Outcome::inconclusive);
  EXPECT_FALSE(r.falsification_flag);
}

TEST(Settle, NoImplications) {
  TheoremReport r;
  settle(r);
  EXPECT_EQ(r.conclusion_verdict.outcome, Outcome::inconclusive);
}

class ShiftedAbsSuite : public ::testing::TestWithParam<TheoremId> {};

TEST_P(ShiftedAbsSuite, HypothesesAndConclusionsPass) {
  const auto fam = families::shifted_abs();
  const auto rep = theorem_verify(GetParam(), fam.seq, fam.limit, suite_spec());
  EXPECT_TRUE(rep.hypotheses_pass()) << rep.theorem_id;
  EXPECT_EQ(rep.conclusion_verdict.outcome, Outcome::consistent_with) << rep.conclusion_verdict.reason;
  EXPECT_FALSE(rep.falsification_flag);
  for (const auto& c : rep.checks) {
    EXPECT_EQ(c.verdict.outcome, Outcome::consistent_with) << c.name << ": " << c.verdict.reason;
    if (c.role != Role::identity) {
      EXPECT_LE(c.verdict.residual, 1e-2) << c.name;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(AllTheorems, ShiftedAbsSuite, ::testing::ValuesIn(all_theorems()),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(Theorems, Thm2CarriesDiagonalNote) {
  const auto fam = families::shifted_abs();
  const auto rep = theorem_verify("thm2", fam.seq, fam.limit, suite_spec());
  EXPECT_NE(rep.notes.find("diagonal"), std::string::npos);
}

TEST(Theorems, OscillatingNeverFalsifies) {
  const auto fam = families::oscillating();
  ModeSpec s = suite_spec();
  s.tail.n_min = 32;
  s.tail.n_max = 128;
  for (auto id : all_theorems()) {
    const auto rep = theorem_verify(id, fam.seq, fam.limit, s);
    EXPECT_FALSE(rep.falsification_flag) << to_string(id);
    EXPECT_NE(rep.conclusion_verdict.outcome, Outcome::consistent_with) << to_string(id);
  }
}

TEST(TheoremsProperty, FlagNeverFiresOnCorpus) {
  const ModeSpec s = suite_spec();
  for (const auto& name : families::names()) {
    const auto fam = families::by_name(name);
    for (auto id : {TheoremId::bacak_fwd, TheoremId::bacak2_bwd, TheoremId::thm1, TheoremId::mainthm}) {
      const auto rep = theorem_verify(id, fam.seq, fam.limit, s);
      EXPECT_FALSE(rep.falsification_flag) << name << " " << to_string(id) << ": " << rep.conclusion_verdict.reason;
    }
  }
}

TEST(IntegralIdentity, SquaredDistanceOnSeveralSpaces) {
  ProxParams p;
  p.lambda = 0.5;
  const std::vector<std::pair<Point, GeodesicSegment>> cases = {
      {euclidean_point({0.3}), GeodesicSegment(euclidean_point({-1}), euclidean_point({2}))},
      {euclidean_point({1, -1}), GeodesicSegment(euclidean_point({0, 0}), euclidean_point({2, 1}))},
      {half_plane_point(0, 1), GeodesicSegment(half_plane_point(-1, 0.5), half_plane_point(1, 2))},
  };
  for (const auto& [a, g] : cases) {
    const auto r = integral_identity(ConvexFunctional::dist_sq(a), g, p, 1024);
    EXPECT_LE(r.error, 1e-6) << a.to_string();
    // Independent value: the envelope of d^2 / 2 is D^2 / (2 (1 + lambda)).
    const double da = distance(g.start(), a), db = distance(g.end(), a);
    EXPECT_NEAR(r.direct, (db * db - da * da) / (2.0 * (1.0 + p.lambda)), 1e-8);
  }
}

TEST(IntegralIdentity, HuberEnvelopeOfAbs) {
  ProxParams p;
  const auto r = integral_identity(ConvexFunctional::dist(euclidean_point({0})),
                                   GeodesicSegment(euclidean_point({-2}), euclidean_point({0.5})), p, 1024);
  EXPECT_NEAR(r.direct, 0.125 - 1.5, 1e-10);
  EXPECT_LE(r.error, 1e-6);
}

TEST(IntegralIdentity, NodeCountValidated) {
  ProxParams p;
  EXPECT_THROW(integral_identity(ConvexFunctional::zero(Space::euclidean(1)),
                                 GeodesicSegment(euclidean_point({0}), euclidean_point({1})), p, 0),
               UsageError);
}

#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace hadamard;

namespace {

ModeSpec corpus_spec(Mode m = Mode::pointwise) {
  ModeSpec s;
  s.mode = m;
  s.points = families::default_grid();
  return s;
}

/// Smaller window for checks whose outcome does not depend on the depth
/// of the tail.
ModeSpec short_spec(Mode m = Mode::pointwise) {
  ModeSpec s = corpus_spec(m);
  s.tail.n_min = 16;
  s.tail.n_max = 64;
  return s;
}

Outcome mode_outcome(const Family& fam, Mode m, ModeSpec spec) {
  spec.mode = m;
  return limit_mode_check(fam.seq, fam.limit, spec).outcome;
}

}  // namespace

TEST(ModeSpec, Validation) {
  ModeSpec s = corpus_spec();
  s.tail.n_min = 300;
  EXPECT_THROW(s.validate(), UsageError);
  s = corpus_spec();
  s.points.clear();
  EXPECT_THROW(s.validate(), UsageError);
  s = corpus_spec();
  s.tail.tol = 0.0;
  EXPECT_THROW(s.validate(), UsageError);
  EXPECT_THROW(parse_mode("sideways"), UsageError);
  EXPECT_EQ(parse_mode("mosco"), Mode::mosco);
}

TEST(TailEstimator, ConvergentAndOscillating) {
  const TailWindow w;
  const auto ns = w.indices();
  std::vector<double> conv, osc;
  for (int n : ns) conv.push_back(1.0 / n), osc.push_back(n % 2);
  EXPECT_LT(tail_residual(ns, conv, w.split()), 1e-2);
  EXPECT_GE(tail_oscillation(osc), 0.9);
  EXPECT_GE(tail_residual(ns, osc, w.split()), 0.9);
}

TEST(LimitMode, ConstantSequenceAllModes) {
  const auto f = ConvexFunctional::dist_sq(euclidean_point({0.5}));
  const auto fam = families::constant(f);
  for (Mode m : {Mode::pointwise, Mode::envelope, Mode::prox}) {
    const auto v = limit_mode_check(fam.seq, fam.limit, [&] { auto s = short_spec(m); return s; }());
    EXPECT_EQ(v.outcome, Outcome::consistent_with) << to_string(m);
    EXPECT_LE(v.residual, 1e-9);
  }
}

TEST(LimitMode, ShiftedAbsAllModes) {
  const auto fam = families::shifted_abs();
  for (Mode m : {Mode::pointwise, Mode::envelope, Mode::prox}) EXPECT_EQ(mode_outcome(fam, m, corpus_spec()), Outcome::consistent_with) << to_string(m);
}

TEST(LimitMode, ShiftedAbsEnvelopeMatchesClosedForm) {
  // Envelope of |. - a| with lambda = 1 is the Huber function of x - a.
  auto huber = [](double u) { return std::abs(u) <= 1 ? 0.5 * u * u : std::abs(u) - 0.5; };
  const auto fam = families::shifted_abs();
  for (int n : {3, 50, 200})
    for (double x : {-2.0, -0.2, 0.0, 0.5, 2.0}) {
      ProxParams p;
      EXPECT_NEAR(moreau_envelope(fam.seq(n), euclidean_point({x}), p).value(), huber(x - 1.0 / n), 1e-9);
    }
}

TEST(LimitMode, OscillatingCounterexample) {
  const auto fam = families::oscillating();
  const auto prox_v = limit_mode_check(fam.seq, fam.limit, corpus_spec(Mode::prox));
  EXPECT_EQ(prox_v.outcome, Outcome::consistent_with);
  EXPECT_EQ(prox_v.residual, 0.0);
  const auto env = limit_mode_check(fam.seq, fam.limit, corpus_spec(Mode::envelope));
  ASSERT_EQ(env.outcome, Outcome::violated);
  ASSERT_TRUE(env.metric("tail_oscillation").has_value());
  EXPECT_GE(*env.metric("tail_oscillation"), 0.9);
  ASSERT_TRUE(env.witness.has_value());
  EXPECT_EQ(limit_mode_check(fam.seq, fam.limit, corpus_spec(Mode::pointwise)).outcome, Outcome::violated);
}

TEST(LimitModeProperty, OscillationPersistsForSmallLambdas) {
  // The envelope of a constant is the constant, so f^n_lambda alternates 0,1.
  const auto fam = families::oscillating();
  for (double l : {1.0, 0.5, 0.1, 0.01, 1e-3}) {
    ModeSpec s = corpus_spec(Mode::envelope);
    s.lambdas = {l};
    const auto v = limit_mode_check(fam.seq, fam.limit, s);
    EXPECT_GE(v.metric("tail_oscillation").value_or(0.0), 0.9) << l;
  }
}

TEST(LimitMode, WrongModeIsUsageError) {
  const auto fam = families::shifted_abs();
  EXPECT_THROW(limit_mode_check(fam.seq, fam.limit, corpus_spec(Mode::mosco)), UsageError);
}

TEST(Mosco, ConstantSequence) {
  const auto fam = families::constant(ConvexFunctional::dist(euclidean_point({1})));
  EXPECT_EQ(mosco_check(fam.seq, fam.limit, short_spec(Mode::mosco)).outcome, Outcome::consistent_with);
}

TEST(Mosco, ShiftedAbs) {
  const auto fam = families::shifted_abs();
  const auto v = mosco_check(fam.seq, fam.limit, corpus_spec(Mode::mosco));
  EXPECT_EQ(v.outcome, Outcome::consistent_with) << v.reason;
  EXPECT_NE(v.reason.find("necessary condition"), std::string::npos);
}

TEST(Mosco, OscillatingFailsAgainstZeroAndOne) {
  const auto fam = families::oscillating();
  const auto v0 = mosco_check(fam.seq, fam.limit, corpus_spec(Mode::mosco));
  EXPECT_EQ(v0.outcome, Outcome::violated);
  const auto v1 = mosco_check(fam.seq, ConvexFunctional::constant(Space::euclidean(1), 1.0), corpus_spec(Mode::mosco));
  EXPECT_EQ(v1.outcome, Outcome::violated);
  // Against f = 1 the constant probe fails condition (i) on odd n.
  EXPECT_GE(v1.metric("condition_i_residual").value_or(0.0), 0.9);
}

TEST(Mosco, AlternatingProbeIsNotWeaklyConvergent) {
  // A bounded probe alternating between -1 and 1 fails the weak-limit test
  // against 0 and therefore does not count against condition (i).
  const auto fam = families::constant(ConvexFunctional::dist(euclidean_point({0})));
  ModeSpec s = short_spec(Mode::mosco);
  s.points = {euclidean_point({0})};
  WeakProbe alt{"alternating", euclidean_point({0}), [](int n) { return euclidean_point({n % 2 ? 1.0 : -1.0}); },
                {GeodesicSegment(euclidean_point({0}), euclidean_point({1}))}};
  EXPECT_EQ(mosco_check(fam.seq, fam.limit, s, {alt}).outcome, Outcome::consistent_with);
}

TEST(MoscoProperty, MoscoImpliesGammaOnCorpus) {
  for (const auto& name : families::names()) {
    const auto fam = families::by_name(name);
    const auto m = mosco_check(fam.seq, fam.limit, short_spec(Mode::mosco));
    if (m.outcome != Outcome::consistent_with) continue;
    EXPECT_EQ(gamma_check(fam.seq, fam.limit, short_spec(Mode::gamma)).outcome, Outcome::consistent_with) << name;
  }
}

TEST(MoscoProperty, EnvelopeAndProxAgreeWithMoscoOnCorpus) {
  for (const auto& name : families::names()) {
    const auto fam = families::by_name(name);
    ConvergenceLab lab(fam.seq, fam.limit, corpus_spec());
    const bool mosco = lab.mosco({}, Recovery::prox_path, false).ok();
    const bool env = lab.limit_check(Mode::envelope).ok();
    const bool prx = lab.limit_check(Mode::prox).ok();
    // Mosco => envelope and prox; envelope => Mosco.
    if (mosco) {
      EXPECT_TRUE(env) << name;
      EXPECT_TRUE(prx) << name;
    }
    if (env) {
      EXPECT_TRUE(mosco) << name;
    }
  }
}

TEST(LimitModeProperty, DoublingTheWindowKeepsVerdicts) {
  for (const char* name : {"shifted_abs", "oscillating", "intervals_shrinking"}) {
    const auto fam = families::by_name(name);
    for (Mode m : {Mode::envelope, Mode::prox}) {
      ModeSpec a = corpus_spec(m), b = corpus_spec(m);
      b.tail.n_max = 512;
      EXPECT_EQ(limit_mode_check(fam.seq, fam.limit, a).outcome, limit_mode_check(fam.seq, fam.limit, b).outcome)
          << name << " " << to_string(m);
    }
  }
}

TEST(SetMosco, NestedIntervals) {
  const auto shrink = families::region_family("intervals_shrinking");
  const auto grow = families::region_family("intervals_growing");
  EXPECT_EQ(detect_monotone(shrink.seq, 64), Monotonicity::nonincreasing);
  EXPECT_EQ(detect_monotone(grow.seq, 64), Monotonicity::nondecreasing);
  for (const auto* rf : {&shrink, &grow}) {
    const auto v = set_mosco_check(rf->seq, rf->limit, corpus_spec(Mode::mosco));
    EXPECT_EQ(v.outcome, Outcome::consistent_with) << rf->name << ": " << v.reason;
    EXPECT_LE(v.metric("envelope_residual").value_or(1.0), 1e-2) << rf->name;
  }
}

TEST(SetMosco, PredictedLimitWithoutExplicitLimit) {
  const auto rf = families::region_family("intervals_shrinking");
  const auto v = set_mosco_check(rf.seq, std::nullopt, corpus_spec(Mode::mosco));
  EXPECT_EQ(v.outcome, Outcome::consistent_with) << v.reason;
}

TEST(SetMosco, ConstantRegions) {
  const Region c = families::interval(-1.0, 2.0);
  RegionSequence seq{Space::euclidean(1), [c](int) { return c; }, "constant"};
  EXPECT_EQ(detect_monotone(seq, 16), Monotonicity::constant);
  EXPECT_EQ(set_mosco_check(seq, c, short_spec(Mode::mosco)).outcome, Outcome::consistent_with);
}

TEST(SetMosco, WrongLimitIsViolated) {
  const auto rf = families::region_family("intervals_shrinking");
  EXPECT_EQ(set_mosco_check(rf.seq, families::interval(0.0, 2.0), short_spec(Mode::mosco)).outcome, Outcome::violated);
}

TEST(SetMosco, NonMonotoneWithoutLimitIsUsageError) {
  RegionSequence seq{Space::euclidean(1), [](int n) { return families::interval(n % 2 ? 0.0 : 0.5, 1.0); }, "flip"};
  EXPECT_THROW(set_mosco_check(seq, std::nullopt, short_spec(Mode::mosco)), UsageError);
}

TEST(SlopeProfile, ZeroSequence) {
  const auto fam = families::constant(ConvexFunctional::zero(Space::euclidean(1)));
  const auto p = asymptotic_slope_check(fam.seq, families::default_grid(), short_spec());
  EXPECT_EQ(p.in_A0, Outcome::consistent_with);
  EXPECT_NEAR(p.bound, 0.0, 1e-12);
}

TEST(SlopeProfile, ShiftedAbsBoundedByOne) {
  const auto fam = families::shifted_abs();
  const auto p = asymptotic_slope_check(fam.seq, families::default_grid(), short_spec());
  EXPECT_EQ(p.in_A, Outcome::consistent_with);
  EXPECT_EQ(p.in_A0, Outcome::consistent_with);
  EXPECT_NEAR(p.bound, 1.0, 1e-6);
  for (const auto& pt : p.points) EXPECT_LE(pt.tail_estimate, p.bound);
}

TEST(SlopeProfile, QuadraticGrowthLeavesA) {
  const auto fam = families::quadratic_growth();
  const auto p = asymptotic_slope_check(fam.seq, {euclidean_point({0}), euclidean_point({1})}, short_spec());
  EXPECT_EQ(p.in_A, Outcome::violated);
  const auto* at1 = p.at(euclidean_point({1}));
  ASSERT_NE(at1, nullptr);
  EXPECT_TRUE(at1->diverging);
  // Calculus oracle: the slope of n x^2 at x = 1 is 2n.
  EXPECT_NEAR(slope(fam.seq(40), euclidean_point({1})).value, 80.0, 1e-4);
  EXPECT_EQ(p.verdict().outcome, Outcome::violated);
}

TEST(ConeClosure, ZeroSummand) {
  const auto f = families::shifted_abs().seq;
  const auto g = families::constant(ConvexFunctional::zero(Space::euclidean(1))).seq;
  EXPECT_EQ(cone_closure_check(f, g, 1.0, 1.0, families::default_grid(), short_spec()).outcome, Outcome::consistent_with);
}

TEST(ConeClosure, ShiftedAbsPlusQuadratic) {
  const auto f = families::shifted_abs().seq;
  const auto g = families::constant(ConvexFunctional::dist_sq(euclidean_point({0}))).seq;
  std::vector<Point> grid;
  for (double x : {-2.0, -1.0, 0.0, 1.0, 2.0}) grid.push_back(euclidean_point({x}));
  const auto v = cone_closure_check(f, g, 1.0, 1.0, grid, short_spec());
  EXPECT_EQ(v.outcome, Outcome::consistent_with);
  const auto h = FunctionSequence::combination(f, 1.0, g, 1.0);
  for (const auto& x : grid) EXPECT_LE(slope(h(64), x).value, 1.0 + std::abs(x[0]) + 1e-6);
}

TEST(ConeClosure, PositiveHomogeneity) {
  const auto f = families::constant(ConvexFunctional::dist(euclidean_point({0}))).seq;
  const auto v = cone_closure_check(f, f, 2.0, 3.0, {euclidean_point({1}), euclidean_point({-2})}, short_spec());
  EXPECT_EQ(v.outcome, Outcome::consistent_with);
  EXPECT_NEAR(v.metric("bound_h").value_or(0.0), 5.0, 1e-6);
}

TEST(SufficientCondition, ConstantSequence) {
  const auto fam = families::constant(ConvexFunctional::dist(euclidean_point({0})));
  const auto rep = sufficient_condition_check(fam.seq, fam.limit, {euclidean_point({1}), euclidean_point({-0.5})}, short_spec());
  EXPECT_TRUE(rep.hypotheses_pass());
  EXPECT_EQ(rep.conclusion_verdict.outcome, Outcome::consistent_with);
}

TEST(SufficientCondition, ScaledAbsSlopesConverge) {
  const auto fam = families::scaled_abs();
  const auto rep = sufficient_condition_check(fam.seq, fam.limit, {euclidean_point({1}), euclidean_point({-2})}, short_spec());
  EXPECT_TRUE(rep.hypotheses_pass());
  EXPECT_EQ(rep.conclusion_verdict.outcome, Outcome::consistent_with);
  EXPECT_FALSE(rep.falsification_flag);
}

TEST(SufficientCondition, ShiftedAbsHypothesisFails) {
  const auto fam = families::shifted_abs();
  const auto rep = sufficient_condition_check(fam.seq, fam.limit, {euclidean_point({0})}, short_spec());
  const auto* h = rep.find("uniform_ratio");
  ASSERT_NE(h, nullptr);
  EXPECT_EQ(h->verdict.outcome, Outcome::violated);
  EXPECT_EQ(rep.conclusion_verdict.outcome, Outcome::inconclusive);
  EXPECT_FALSE(rep.falsification_flag);
}

TEST(Normalization, ConstantSequenceTailsVanish) {
  const auto fam = families::constant(ConvexFunctional::dist(euclidean_point({0})));
  const auto v = normalization_check(fam.seq, fam.limit, euclidean_point({2}), 1.0, short_spec());
  EXPECT_EQ(v.outcome, Outcome::consistent_with);
  EXPECT_LE(v.residual, 1e-9);
}

TEST(Normalization, ShiftedAbs) {
  const auto fam = families::shifted_abs();
  const auto v = normalization_check(fam.seq, fam.limit, euclidean_point({2}), 1.0, corpus_spec());
  EXPECT_EQ(v.outcome, Outcome::consistent_with) << v.reason;
  // J^n_1(2) = 2 - 1 since 2 lies right of 1/n + 1.
  EXPECT_NEAR(prox(families::shifted_abs().seq(10), euclidean_point({2})).minimizer[0], 1.0, 1e-8);
}

TEST(Normalization, OscillatingRefused) {
  const auto fam = families::oscillating();
  EXPECT_THROW(normalization_check(fam.seq, fam.limit, euclidean_point({0}), 1.0, short_spec()), UsageError);
}

TEST(EquiLipschitz, ZeroSequence) {
  const auto fam = families::constant(ConvexFunctional::zero(Space::euclidean(1)));
  const auto v = equi_lipschitz_check(fam.seq, 1.0, euclidean_point({0}), families::interval(-2, 2), 12, short_spec());
  EXPECT_EQ(v.outcome, Outcome::consistent_with);
  EXPECT_NEAR(v.metric("lipschitz_constant").value_or(1.0), 0.0, 1e-9);
}

TEST(EquiLipschitz, ShiftedAbsConstantAtMostOne) {
  const auto fam = families::shifted_abs();
  const auto v = equi_lipschitz_check(fam.seq, 1.0, euclidean_point({0}), families::interval(-2, 2), 12, short_spec());
  EXPECT_EQ(v.outcome, Outcome::consistent_with) << v.reason;
  EXPECT_LE(v.metric("lipschitz_constant").value_or(2.0), 1.0 + 1e-6);
}

TEST(EquiLipschitz, QuadraticGrowthEnvelopes) {
  // f^n = n x^2 has envelope n x^2 / (1 + 2 lambda n), whose slope on
  // [-2, 2] stays below 2 / lambda.
  const auto fam = families::quadratic_growth();
  const double lambda = 1.0;
  const auto v = equi_lipschitz_check(fam.seq, lambda, euclidean_point({0}), families::interval(-2, 2), 12, short_spec());
  EXPECT_EQ(v.outcome, Outcome::consistent_with) << v.reason;
  EXPECT_LE(v.metric("lipschitz_constant").value_or(1e9), 2.0 / lambda);
  ProxParams p;
  EXPECT_NEAR(moreau_envelope(fam.seq(30), euclidean_point({1.5}), p).value(), 30 * 2.25 / (1 + 60.0), 1e-9);
}

TEST(EquiLipschitz, DivergentEnvelopeFailsPrecondition) {
  const Space E = Space::euclidean(1);
  FunctionSequence up(E, [E](int n) { return ConvexFunctional::constant(E, double(n)); }, "n");
  const auto v = equi_lipschitz_check(up, 1.0, euclidean_point({0}), families::interval(-1, 1), 8, short_spec());
  EXPECT_EQ(v.outcome, Outcome::violated);
  EXPECT_NE(v.reason.find("precondition"), std::string::npos);
}

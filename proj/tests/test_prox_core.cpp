#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace hadamard;
using testing_support::all_spaces;
using testing_support::oracle_prox;
using testing_support::random_library_functional;
using testing_support::random_point;

namespace {

ProxParams with_lambda(double l) {
  ProxParams p;
  p.lambda = l;
  return p;
}

Region interval(double a, double b) { return Region::interval(GeodesicSegment(euclidean_point({a}), euclidean_point({b}))); }

}  // namespace

TEST(Prox, AbsAtTwo) {
  const auto r = prox(ConvexFunctional::dist(euclidean_point({0})), euclidean_point({2}), with_lambda(1.0));
  EXPECT_NEAR(r.minimizer[0], 1.0, 1e-8);
  EXPECT_NEAR(r.envelope.value(), 1.5, 1e-10);
  EXPECT_TRUE(r.converged);
}

TEST(Prox, AbsInsideTheKinkRegion) {
  const auto r = prox(ConvexFunctional::dist(euclidean_point({0})), euclidean_point({0.3}), with_lambda(1.0));
  EXPECT_NEAR(r.minimizer[0], 0.0, 1e-8);
  EXPECT_NEAR(r.envelope.value(), 0.045, 1e-10);
}

TEST(Prox, IndicatorIsProjection) {
  const auto f = ConvexFunctional::indicator(interval(0, 1));
  const auto r = prox(f, euclidean_point({2.5}), with_lambda(0.7));
  EXPECT_NEAR(r.minimizer[0], 1.0, 1e-8);
  EXPECT_NEAR(r.envelope.value(), 2.25 / 1.4, 1e-10);
}

TEST(Prox, HalfPlaneBallProjectionMatchesGeodesicOracle) {
  // Projection onto a ball lies on the geodesic from the center to x at
  // distance radius from the center.
  const Point c = half_plane_point(0, 1), x = half_plane_point(2, 3);
  const auto r = prox(ConvexFunctional::indicator(Region::ball(c, 0.5)), x, with_lambda(1.0));
  const Point foot = step_toward(c, x, 0.5);
  EXPECT_LT(distance(r.minimizer, foot), 1e-6);
  EXPECT_NEAR(r.envelope.value(), std::pow(distance(x, c) - 0.5, 2) / 2.0, 1e-8);
}

TEST(Prox, Errors) {
  const auto f = ConvexFunctional::zero(Space::euclidean(1));
  EXPECT_THROW(prox(f, euclidean_point({0}), with_lambda(0.0)), UsageError);
  EXPECT_THROW(prox(f, euclidean_point({0}), with_lambda(-1.0)), UsageError);
  EXPECT_THROW(prox(f, euclidean_point({0, 0})), UsageError);
  ProxParams p;
  p.tol_min = 0.0;
  EXPECT_THROW(prox(f, euclidean_point({0}), p), UsageError);
}

TEST(Prox, EnvelopeIsFiniteOutsideTheDomain) {
  const auto f = ConvexFunctional::indicator(interval(0, 1));
  EXPECT_TRUE(moreau_envelope(f, euclidean_point({40}), with_lambda(0.01)).is_finite());
}

TEST(ProxOracle, DenseGridEuclideanAndSpider) {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> lam(0.05, 3.0);
  for (const auto& s : {Space::euclidean(1), Space::spider(3)})
    for (int i = 0; i < 40; ++i) {
      const auto f = random_library_functional(s, rng);
      const Point x = random_point(s, rng);
      const double l = lam(rng);
      const auto r = prox(f, x, with_lambda(l));
      const auto o = oracle_prox(f, x, l);
      EXPECT_LE(distance(r.minimizer, o.minimizer), 1e-6) << f.descriptor() << " x=" << x.to_string() << " l=" << l;
      EXPECT_NEAR(r.envelope.value(), o.envelope, 1e-8) << f.descriptor();
    }
}

TEST(ProxClosedForm, SquaredDistanceEverySpace) {
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> lam(0.1, 4.0);
  for (const auto& s : all_spaces())
    for (int i = 0; i < 20; ++i) {
      const Point a = random_point(s, rng), x = random_point(s, rng);
      const double l = lam(rng), D = distance(x, a);
      const auto r = prox(ConvexFunctional::dist_sq(a), x, with_lambda(l));
      const Point expect = geodesic_point(GeodesicSegment(x, a), l / (1.0 + l));
      EXPECT_LE(distance(r.minimizer, expect), 1e-8) << s.tag();
      EXPECT_NEAR(r.envelope.value(), D * D / (2.0 * (1.0 + l)), 1e-8) << s.tag();
    }
}

TEST(ProxProperty, Nonexpansive) {
  std::mt19937_64 rng(71);
  for (const auto& s : all_spaces())
    for (int i = 0; i < 8; ++i) {
      const auto f = random_library_functional(s, rng);
      const Point x = random_point(s, rng), y = random_point(s, rng);
      const auto jx = prox(f, x).minimizer, jy = prox(f, y).minimizer;
      EXPECT_LE(distance(jx, jy), distance(x, y) + 1e-6) << s.tag() << " " << f.descriptor();
    }
}

TEST(ProxProperty, EnvelopeBelowFunctionAndMonotoneInLambda) {
  std::mt19937_64 rng(73);
  for (const auto& s : all_spaces())
    for (int i = 0; i < 6; ++i) {
      const auto f = random_library_functional(s, rng);
      const Point x = random_point(s, rng);
      const double e1 = moreau_envelope(f, x, with_lambda(1.0)).value();
      const double e2 = moreau_envelope(f, x, with_lambda(0.25)).value();
      EXPECT_LE(e2, f.raw(x) + 1e-9);
      EXPECT_LE(e1, e2 + 1e-9) << s.tag() << " " << f.descriptor();
    }
}

TEST(ProxProperty, FixedPointsAreMinimizers) {
  std::mt19937_64 rng(79);
  for (const auto& s : all_spaces()) {
    const Point a = random_point(s, rng);
    const auto r = prox(ConvexFunctional::dist(a, 1.5), a, with_lambda(0.8));
    EXPECT_LE(distance(r.minimizer, a), 1e-8) << s.tag();
  }
}

TEST(Slope, Examples) {
  const auto absf = ConvexFunctional::dist(euclidean_point({0}));
  EXPECT_NEAR(slope(absf, euclidean_point({2})).value, 1.0, 1e-6);
  EXPECT_NEAR(slope(absf, euclidean_point({0})).value, 0.0, 1e-6);
  EXPECT_NEAR(slope(ConvexFunctional::zero(Space::euclidean(2)), euclidean_point({1, 1})).value, 0.0, 1e-12);
  const auto ind = ConvexFunctional::indicator(interval(0, 1));
  EXPECT_NEAR(slope(ind, euclidean_point({0.5})).value, 0.0, 1e-12);
  EXPECT_EQ(slope(ind, euclidean_point({2})).value, std::numeric_limits<double>::infinity());
}

TEST(SlopeProperty, SquaredDistanceSlopeIsDistance) {
  std::mt19937_64 rng(83);
  for (const auto& s : all_spaces())
    for (int i = 0; i < 4; ++i) {
      const Point a = random_point(s, rng), x = random_point(s, rng);
      EXPECT_NEAR(slope(ConvexFunctional::dist_sq(a), x).value, distance(x, a), 1e-6) << s.tag();
    }
}

TEST(SlopeProperty, DistanceSlopeIsWeight) {
  std::mt19937_64 rng(89);
  for (const auto& s : all_spaces()) {
    const Point a = random_point(s, rng), x = random_point(s, rng);
    if (distance(a, x) < 1e-3) continue;
    EXPECT_NEAR(slope(ConvexFunctional::dist(a, 0.7), x).value, 0.7, 1e-6) << s.tag();
  }
}

TEST(SlopeProperty, LinearSlopeIsGradientNorm) {
  const auto f = ConvexFunctional::linear(Space::euclidean(2), {3.0, -4.0}, 1.0);
  EXPECT_NEAR(slope(f, euclidean_point({0.2, 0.7})).value, 5.0, 1e-6);
}

TEST(ProxLemmas, AbsAtTwoAttainsEquality) {
  const auto rep = verify_prox_lemmas(ConvexFunctional::dist(euclidean_point({0})), euclidean_point({2}), {1.0, 0.5, 0.1, 0.01, 1e-4});
  for (const auto& c : rep.checks) EXPECT_EQ(c.verdict.outcome, Outcome::consistent_with) << c.name << ": " << c.verdict.reason;
  const auto* id2 = rep.find("id2");
  ASSERT_NE(id2, nullptr);
  ASSERT_TRUE(id2->verdict.metric("equality_gap").has_value());
  EXPECT_NEAR(*id2->verdict.metric("equality_gap"), 0.0, 1e-6);
  EXPECT_FALSE(rep.falsification_flag);
}

TEST(ProxLemmas, IndicatorPlusLinearResolventLimit) {
  const auto f = ConvexFunctional::sum({{1.0, ConvexFunctional::indicator(interval(0, 1))},
                                        {1.0, ConvexFunctional::linear(Space::euclidean(1), {0.7}, 0.0)}});
  const auto rep = verify_prox_lemmas(f, euclidean_point({2}), {1.0, 0.1, 0.01, 1e-3, 1e-4});
  for (const auto& c : rep.checks) EXPECT_EQ(c.verdict.outcome, Outcome::consistent_with) << c.name << ": " << c.verdict.reason;
  // J_lambda 2 = 1 for every lambda: the projection of 2 onto [0, 1].
  const auto r = prox(f, euclidean_point({2}), with_lambda(1e-4));
  EXPECT_LE(std::abs(r.minimizer[0] - 1.0), 1e-3);
}

TEST(ProxLemmas, LambdaGridValidated) {
  const auto f = ConvexFunctional::zero(Space::euclidean(1));
  EXPECT_THROW(verify_prox_lemmas(f, euclidean_point({0}), {}), UsageError);
  EXPECT_THROW(verify_prox_lemmas(f, euclidean_point({0}), {0.1, 1.0}), UsageError);
}

TEST(ProxLemmasProperty, RandomLibraryDraws) {
  std::mt19937_64 rng(97);
  for (const auto& s : {Space::euclidean(1), Space::spider(3), Space::half_plane()})
    for (int i = 0; i < 4; ++i) {
      const auto f = random_library_functional(s, rng);
      const Point x = random_point(s, rng);
      const auto rep = verify_prox_lemmas(f, x, {1.0, 0.1, 0.01});
      for (const char* name : {"ubound", "id2"}) {
        const auto* c = rep.find(name);
        ASSERT_NE(c, nullptr);
        EXPECT_NE(c->verdict.outcome, Outcome::violated) << name << " " << f.descriptor() << " at " << x.to_string();
        EXPECT_LE(c->verdict.residual, 1e-6) << name << " " << f.descriptor();
      }
    }
}

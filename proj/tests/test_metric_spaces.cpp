#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>

#include "test_support.hpp"

using namespace hadamard;
using testing_support::all_spaces;
using testing_support::random_point;

namespace {

/// Hyperbolic length of the geodesic between two half-plane points, by
/// quadrature of ds = |dz| / y along the vertical line or the circle
/// centred on the boundary.
double half_plane_length_quadrature(double x1, double y1, double x2, double y2, int nodes = 200000) {
  if (std::abs(x1 - x2) < 1e-14) {
    double acc = 0.0;
    for (int i = 0; i < nodes; ++i) {
      const double y = y1 + (y2 - y1) * (i + 0.5) / nodes;
      acc += std::abs(y2 - y1) / nodes / y;
    }
    return acc;
  }
  const double c = (x2 * x2 + y2 * y2 - x1 * x1 - y1 * y1) / (2.0 * (x2 - x1));
  const double a1 = std::atan2(y1, x1 - c), a2 = std::atan2(y2, x2 - c);
  double acc = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double th = a1 + (a2 - a1) * (i + 0.5) / nodes;
    acc += std::abs(a2 - a1) / nodes / std::sin(th);
  }
  return acc;
}

}  // namespace

TEST(Distance, EuclideanPythagoras) {
  EXPECT_DOUBLE_EQ(distance(euclidean_point({0, 0}), euclidean_point({3, 4})), 5.0);
}

TEST(Distance, SpiderSumsRadiiThroughOrigin) {
  const Space s = Space::spider(3);
  EXPECT_NEAR(distance(spider_point(s, 1, 2), spider_point(s, 2, 3)), 5.0, 1e-15);
  EXPECT_NEAR(distance(spider_point(s, 1, 2), spider_point(s, 1, 3)), 1.0, 1e-15);
}

TEST(Distance, HalfPlaneVerticalMatchesQuadrature) {
  const double d = distance(half_plane_point(0, 1), half_plane_point(0, 2));
  EXPECT_NEAR(d, std::log(2.0), 1e-14);
  EXPECT_NEAR(d, half_plane_length_quadrature(0, 1, 0, 2), 1e-9);
}

TEST(Distance, HalfPlaneGeneralMatchesQuadrature) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20; ++i) {
    const Point a = random_point(Space::half_plane(), rng), b = random_point(Space::half_plane(), rng);
    EXPECT_NEAR(distance(a, b), half_plane_length_quadrature(a[0], a[1], b[0], b[1]), 1e-7 * (1 + distance(a, b)));
  }
}

TEST(Distance, MismatchedSpacesIsUsageError) {
  EXPECT_THROW(distance(euclidean_point({0}), euclidean_point({0, 0})), UsageError);
  EXPECT_THROW(distance(euclidean_point({0, 0}), half_plane_point(0, 1)), UsageError);
}

TEST(Distance, ProductIsRootSumOfSquares) {
  std::mt19937_64 rng(3);
  for (const auto& s : all_spaces()) {
    if (s.kind() != SpaceKind::product) continue;
    for (int i = 0; i < 50; ++i) {
      const Point a = random_point(s, rng), b = random_point(s, rng);
      double acc = 0.0;
      for (std::size_t k = 0; k < s.factors().size(); ++k) acc += std::pow(distance(a.factor(k), b.factor(k)), 2);
      EXPECT_NEAR(distance(a, b), std::sqrt(acc), 1e-12);
    }
  }
}

TEST(Space, Invariants) {
  EXPECT_THROW(Space::euclidean(0), UsageError);
  EXPECT_THROW(Space::spider(1), UsageError);
  EXPECT_THROW(Space::product({}), UsageError);
  EXPECT_THROW(half_plane_point(0, 0), UsageError);
  EXPECT_THROW(spider_point(Space::spider(3), 4, 1.0), UsageError);
  EXPECT_THROW(spider_point(Space::spider(3), 1, -1.0), UsageError);
}

TEST(Space, SpiderOriginIdentification) {
  const Space s = Space::spider(4);
  EXPECT_TRUE(spider_point(s, 1, 0.0) == spider_point(s, 3, 0.0));
  EXPECT_TRUE(spider_point(s, 1, 1e-13) == spider_point(s, 2, 0.0));
  EXPECT_FALSE(spider_point(s, 1, 1e-3) == spider_point(s, 2, 1e-3));
}

TEST(Space, PointTextRoundTrip) {
  std::mt19937_64 rng(5);
  for (const auto& s : all_spaces())
    for (int i = 0; i < 50; ++i) {
      const Point p = random_point(s, rng);
      const Point q = Point::parse(p.to_string());
      ASSERT_TRUE(q.space() == s);
      for (std::size_t k = 0; k < p.coords().size(); ++k) EXPECT_NEAR(p[k], q[k], 1e-15 * (1 + std::abs(p[k])));
    }
}

TEST(Space, TagRoundTrip) {
  for (const auto& s : all_spaces()) EXPECT_TRUE(Space::from_tag(s.tag()) == s);
}

TEST(Geodesic, Endpoints) {
  std::mt19937_64 rng(7);
  for (const auto& s : all_spaces()) {
    const Point a = random_point(s, rng), b = random_point(s, rng);
    const GeodesicSegment g(a, b);
    EXPECT_LT(distance(geodesic_point(g, 0.0), a), 1e-12);
    EXPECT_LT(distance(geodesic_point(g, 1.0), b), 1e-9);
  }
}

TEST(Geodesic, LinearInterpolationOnTheLine) {
  const Point p = geodesic_point(GeodesicSegment(euclidean_point({0}), euclidean_point({4})), 0.25);
  EXPECT_NEAR(p[0], 1.0, 1e-15);
}

TEST(Geodesic, SpiderTravelsThroughOrigin) {
  const Space s = Space::spider(3);
  const Point a = spider_point(s, 1, 2), b = spider_point(s, 2, 3);
  const Point p = geodesic_point(GeodesicSegment(a, b), 0.6);
  EXPECT_EQ(p[0], 2.0);
  EXPECT_NEAR(p[1], 1.0, 1e-12);
  EXPECT_NEAR(distance(p, a), 3.0, 1e-12);
  EXPECT_NEAR(distance(p, b), 2.0, 1e-12);
}

TEST(Geodesic, ParameterOutsideUnitIntervalIsUsageError) {
  const GeodesicSegment g(euclidean_point({0}), euclidean_point({1}));
  EXPECT_THROW(geodesic_point(g, -0.1), UsageError);
  EXPECT_THROW(geodesic_point(g, 1.1), UsageError);
}

TEST(GeodesicProperty, ParameterizationIdentities) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ut(0.0, 1.0);
  for (const auto& s : all_spaces())
    for (int i = 0; i < 100; ++i) {
      const Point a = random_point(s, rng), b = random_point(s, rng);
      const double t = ut(rng), d = distance(a, b);
      const Point xt = geodesic_point(GeodesicSegment(a, b), t);
      EXPECT_LE(std::abs(distance(xt, a) - t * d), 1e-9 * (1 + d)) << s.tag();
      EXPECT_LE(std::abs(distance(xt, b) - (1 - t) * d), 1e-9 * (1 + d)) << s.tag();
    }
}

TEST(MetricProperty, Axioms) {
  std::mt19937_64 rng(17);
  for (const auto& s : all_spaces())
    for (int i = 0; i < 200; ++i) {
      const Point a = random_point(s, rng), b = random_point(s, rng), c = random_point(s, rng);
      EXPECT_EQ(distance(a, b), distance(b, a)) << s.tag();
      EXPECT_GE(distance(a, b), 0.0);
      EXPECT_EQ(distance(a, a), 0.0);
      const double lhs = distance(a, c), rhs = distance(a, b) + distance(b, c);
      EXPECT_LE(lhs, rhs * (1 + 1e-12) + 1e-15) << s.tag();
    }
}

TEST(Projection, MemberPointProjectsToItself) {
  const GeodesicSegment g(half_plane_point(0, 1), half_plane_point(2, 1));
  const Point x = geodesic_point(g, 0.3);
  const auto p = project_to_geodesic(x, g);
  EXPECT_LT(distance(p.point, x), 1e-8);
}

TEST(Projection, EuclideanOrthogonalDrop) {
  const auto p = project_to_geodesic(euclidean_point({1, 1}), GeodesicSegment(euclidean_point({0, 0}), euclidean_point({2, 0})));
  EXPECT_NEAR(p.t, 0.5, 1e-12);
  EXPECT_NEAR(p.point[0], 1.0, 1e-12);
  EXPECT_NEAR(p.point[1], 0.0, 1e-12);
}

TEST(Projection, HalfPlaneAgainstDenseGrid) {
  const Point x = half_plane_point(1, 1);
  const GeodesicSegment g(half_plane_point(0, 1), half_plane_point(0, 3));
  const auto p = project_to_geodesic(x, g);
  double best_t = 0.0, best = 1e300;
  for (int i = 0; i <= 100000; ++i) {
    const double t = i / 100000.0, d = distance(x, geodesic_point(g, t));
    if (d < best) best = d, best_t = t;
  }
  EXPECT_NEAR(p.t, best_t, 2e-5);
  const double tg = testing_support::golden_argmin([&](double t) { return distance(x, geodesic_point(g, t)); }, 0, 1);
  EXPECT_NEAR(p.t, tg, 1e-7);
  // The foot is where the circle |z| = sqrt(2) meets the imaginary axis.
  EXPECT_NEAR(p.point[0], 0.0, 1e-9);
  EXPECT_NEAR(p.point[1], std::sqrt(2.0), 1e-7);
}

TEST(Projection, DegenerateSegmentReturnsStart) {
  const Point a = half_plane_point(0, 1);
  const auto p = project_to_geodesic(half_plane_point(1, 1), GeodesicSegment(a, a));
  EXPECT_EQ(p.t, 0.0);
  EXPECT_TRUE(p.point == a);
}

TEST(ProjectionProperty, Optimality) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> ut(0.0, 1.0);
  for (const auto& s : all_spaces())
    for (int i = 0; i < 10; ++i) {
      const Point a = random_point(s, rng), b = random_point(s, rng), x = random_point(s, rng);
      const GeodesicSegment g(a, b);
      const double dp = distance(x, project_to_geodesic(x, g).point);
      for (int k = 0; k < 100; ++k) EXPECT_LE(dp, distance(x, geodesic_point(g, ut(rng))) + 1e-9) << s.tag();
    }
}

TEST(Comparison, EuclideanTriangleIsFlat) {
  const auto st = comparison_slacks(euclidean_point({0, 0}), euclidean_point({1, 0}), euclidean_point({0, 2}), 64);
  for (const auto& s : st.samples) EXPECT_NEAR(s.slack, 0.0, 1e-12);
  EXPECT_EQ(cat0_comparison_check(euclidean_point({0, 0}), euclidean_point({1, 0}), euclidean_point({0, 2}), 64).outcome,
            Outcome::consistent_with);
}

TEST(Comparison, HyperbolicTriangleIsThin) {
  const Point p = half_plane_point(0, 1), q = half_plane_point(1, 1), r = half_plane_point(0, 2);
  EXPECT_EQ(cat0_comparison_check(p, q, r, 100).outcome, Outcome::consistent_with);
  const auto st = comparison_slacks(p, q, r, 100);
  int strict = 0;
  for (const auto& s : st.samples) strict += s.slack > 1e-9;
  EXPECT_GT(strict, 90);
}

TEST(Comparison, SpiderTripodConsistent) {
  const Space s = Space::spider(3);
  EXPECT_EQ(cat0_comparison_check(spider_point(s, 1, 1), spider_point(s, 2, 1.5), spider_point(s, 3, 0.7), 100).outcome,
            Outcome::consistent_with);
}

TEST(Comparison, DegenerateTriangleInconclusive) {
  const Point a = euclidean_point({0, 0});
  EXPECT_EQ(cat0_comparison_check(a, a, a, 10).outcome, Outcome::inconclusive);
}

TEST(ComparisonProperty, RandomTrianglesEverySpace) {
  std::mt19937_64 rng(23);
  for (const auto& s : all_spaces()) {
    if (s == Space::euclidean(1)) continue;  // every triangle on a line is degenerate
    for (int i = 0; i < 100; ++i) {
      const auto st = comparison_slacks(random_point(s, rng), random_point(s, rng), random_point(s, rng), 16, i);
      for (const auto& x : st.samples) EXPECT_GE(x.slack, -1e-8) << s.tag();
    }
  }
}

TEST(WeakLimit, StrongConvergenceIsWeak) {
  const Point x = euclidean_point({0, 0});
  std::vector<Point> xs;
  for (int n = 1; n <= 256; ++n) xs.push_back(euclidean_point({1.0 / n, -2.0 / n}));
  std::vector<GeodesicSegment> bundle{GeodesicSegment(x, euclidean_point({1, 0})), GeodesicSegment(x, euclidean_point({0, 1}))};
  EXPECT_EQ(weak_limit_test(xs, x, bundle, TailWindow{}).outcome, Outcome::consistent_with);
}

TEST(WeakLimit, AlternatingSequenceViolates) {
  const Point x = euclidean_point({0, 0});
  std::vector<Point> xs;
  for (int n = 1; n <= 256; ++n) xs.push_back(euclidean_point({n % 2 ? 1.0 : -1.0, 0.0}));
  const auto v = weak_limit_test(xs, x, {GeodesicSegment(x, euclidean_point({1, 0}))}, TailWindow{});
  EXPECT_EQ(v.outcome, Outcome::violated);
  EXPECT_NE(v.reason.find("necessary condition"), std::string::npos);
}

TEST(WeakLimit, ConstantSequence) {
  const Point x = half_plane_point(0, 1);
  std::vector<Point> xs(256, x);
  EXPECT_EQ(weak_limit_test(xs, x, {GeodesicSegment(x, half_plane_point(1, 2))}, TailWindow{}).outcome,
            Outcome::consistent_with);
}

TEST(WeakLimit, EmptyBundleIsUsageError) {
  const Point x = euclidean_point({0});
  EXPECT_THROW(weak_limit_test(std::vector<Point>(256, x), x, {}, TailWindow{}), UsageError);
}

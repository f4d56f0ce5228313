#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "hadamard/functional.hpp"
#include "hadamard/verdict.hpp"

namespace hadamard {

/// Sampled audit of (mu-strong) geodesic convexity:
///   f(x_t) <= (1-t) f(x_0) + t f(x_1) - mu/2 t(1-t) d(x_0,x_1)^2 + tol
/// with tol = 1e-9 (1 + |f(x_0)| + |f(x_1)|), over triples whose endpoint
/// values are finite.
inline Verdict convexity_check(const ConvexFunctional& f, double mu, int samples, std::uint64_t seed = 0) {
  if (samples < 1) throw UsageError("convexity_check needs samples >= 1");
  if (!(mu >= 0.0)) throw UsageError("convexity modulus must be >= 0");
  const auto hint = f.domain_hint();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Point> pool = f.anchors(hint.center);
  pool.push_back(hint.center);
  auto draw = [&]() -> Point {
    if (!pool.empty() && unit(rng) < 0.1) return pool[static_cast<std::size_t>(unit(rng) * pool.size()) % pool.size()];
    return sample_ball(hint.center, std::max(hint.radius, 1e-6), rng);
  };

  int tested = 0;
  double worst = -std::numeric_limits<double>::infinity();
  std::optional<Witness> witness;
  const long max_draws = 50L * samples;
  for (long draws = 0; tested < samples && draws < max_draws; ++draws) {
    const Point x0 = draw(), x1 = draw();
    const double f0 = f.raw(x0), f1 = f.raw(x1);
    if (!std::isfinite(f0) || !std::isfinite(f1)) continue;
    const double t = unit(rng);
    const Point xt = geodesic_point(GeodesicSegment(x0, x1), t);
    const double d = distance(x0, x1);
    const double bound = (1.0 - t) * f0 + t * f1 - 0.5 * mu * t * (1.0 - t) * d * d;
    const double tol = 1e-9 * (1.0 + std::abs(f0) + std::abs(f1));
    const double excess = f.raw(xt) - bound;
    ++tested;
    if (excess > worst) worst = excess;
    if (excess > tol && (!witness || excess > witness->residual)) {
      Witness w;
      w.point = x0.to_string() + " / " + x1.to_string();
      w.residual = excess;
      w.detail = "t=" + format_real(t);
      witness = w;
    }
  }
  if (witness) return Verdict::violated(*witness, "convexity inequality broken");
  if (tested == 0) return Verdict::inconclusive("no sampled pair with finite values");
  auto v = Verdict::consistent(std::max(0.0, worst));
  v.set_metric("pairs", tested);
  return v;
}

enum class Side { lower, upper };

/// Steps s_k = base 2^-k for k in [k_min, k_max]; base <= 0 means the
/// segment length.
struct StepSchedule {
  int k_min = 3;
  int k_max = 20;
  double base = -1.0;
};

/// One-sided derivative of f at x along g from its difference quotients
///   (f(x_s) - f(x)) / s,  x_s at distance s from x,
/// read off at the smallest steps with one Richardson step. When the tail
/// quotients are not monotone the lower (upper) side reports their min
/// (max).
inline double directional_derivative(const ConvexFunctional& f, const Point& x, const GeodesicSegment& g,
                                     Side side = Side::lower, const StepSchedule& sched = {}) {
  if (!(g.start() == x)) throw UsageError("directional_derivative: segment must start at x");
  const double fx = f(x).value();
  if (!std::isfinite(fx)) throw UsageError("directional_derivative: f(x) = +inf");
  if (sched.k_min < 0 || sched.k_max < sched.k_min + 2) throw UsageError("step schedule needs at least 3 steps");
  const double L = g.length();
  if (L <= 0.0) return 0.0;
  // An absolute base keeps the steps independent of the segment length;
  // it is used only when the largest step still fits on the segment.
  const double base = sched.base > 0.0 && std::ldexp(sched.base, -sched.k_min) <= L ? sched.base : L;

  std::vector<double> q;
  for (int k = sched.k_min; k <= sched.k_max; ++k) {
    const double s = std::ldexp(base, -k);
    const double fs = f.raw(geodesic_point(g, s / L));
    q.push_back(std::isfinite(fs) ? (fs - fx) / s : std::numeric_limits<double>::infinity());
  }
  const std::size_t m = q.size();
  const double a = q[m - 3], b = q[m - 2], c = q[m - 1];
  if (!std::isfinite(c)) return std::numeric_limits<double>::infinity();
  const bool monotone = std::isfinite(a) && a >= b && b >= c;
  if (monotone) {
    const double extrap = 2.0 * c - b;
    // Richardson is exact for smooth tails; never overshoot the spread.
    return std::max(extrap, c - (a - c));
  }
  if (side == Side::lower) return std::min({a, b, c});
  return std::isfinite(a) && std::isfinite(b) ? std::max({a, b, c}) : std::numeric_limits<double>::infinity();
}

}  // namespace hadamard

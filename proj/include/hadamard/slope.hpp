#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "hadamard/detail/golden_section.hpp"
#include "hadamard/functional.hpp"
#include "hadamard/prox.hpp"

namespace hadamard {

inline constexpr double kSlopeTol = 1e-6;

struct SlopeBudget {
  int global_samples = 256;
  int local_random = 16;
  std::vector<double> radii{1e-3, 1e-5, 1e-7};
  std::uint64_t seed = 0;
};

struct SlopeEstimate {
  double value = 0.0;  // +inf when f(x) = +inf
  std::optional<Point> witness;
  int samples_used = 0;
  bool inconclusive = false;
};

/// |df|(x) = sup_{y != x} max(f(x) - f(y), 0) / d(x, y), a lower bound from
/// global samples around the domain hint, local quotients on shrinking
/// spheres, and a golden-section refinement across the two best local
/// directions.
inline SlopeEstimate slope(const ConvexFunctional& f, const Point& x, const SlopeBudget& budget = {}) {
  if (!(x.space() == f.space())) throw UsageError("slope: point and functional live in different spaces");
  SlopeEstimate est;
  const double fx = f.raw(x);
  if (!std::isfinite(fx)) {
    est.value = std::numeric_limits<double>::infinity();
    est.witness = x;
    return est;
  }
  std::mt19937_64 rng(budget.seed);
  const auto hint = f.domain_hint();
  const auto anchors = f.anchors(x);

  auto quotient = [&](const Point& y) {
    ++est.samples_used;
    const double d = distance(x, y);
    if (!(d > 0.0)) return 0.0;
    const double fy = f.raw(y);
    if (!std::isfinite(fy)) return 0.0;
    return std::max(fx - fy, 0.0) / d;
  };
  auto consider = [&](const Point& y) {
    const double q = quotient(y);
    if (q > est.value) est.value = q, est.witness = y;
    return q;
  };

  bool any_finite = false;
  for (int i = 0; i < budget.global_samples; ++i) {
    const Point y = sample_ball(hint.center, hint.radius, rng);
    any_finite |= std::isfinite(f.raw(y));
    consider(y);
  }
  for (const auto& a : anchors) consider(a);
  // Proximal points approach x along the steepest descent direction.
  for (double lam : {1.0, 1e-1, 1e-2, 1e-3}) {
    std::vector<Point> c;
    detail::closed_form_candidates(f, x, lam, c);
    for (const auto& y : c) consider(y);
  }
  // Solved proximal points give the steepest descent direction for sums
  // and maxima, where the closed forms of the pieces do not.
  std::vector<Point> descent;
  for (double lam : {1e-2, 1e-4}) {
    ProxParams pp;
    pp.lambda = lam * (1.0 + hint.radius);
    pp.seed = budget.seed;
    pp.max_iter = 2000;
    const auto r = prox(f, x, pp);
    consider(r.minimizer);
    descent.push_back(r.minimizer);
  }
  if (budget.global_samples > 0 && !any_finite && !std::isfinite(f.raw(hint.center))) est.inconclusive = true;

  const double scale = 1.0 + hint.radius;
  for (double r0 : budget.radii) {
    const double r = r0 * scale;
    std::vector<Point> local = neighbors(x, r);
    for (int i = 0; i < budget.local_random; ++i) local.push_back(random_neighbor(x, r, rng));
    for (const auto& a : anchors)
      if (distance(x, a) > r) local.push_back(step_toward(x, a, r));
    for (const auto& p : descent)
      if (distance(x, p) > 0.0) local.push_back(step_toward(x, p, r));

    // Best local direction, then refine across toward each other one.
    int i1 = -1;
    double q1 = 0.0;
    for (int i = 0; i < static_cast<int>(local.size()); ++i) {
      const double q = consider(local[static_cast<std::size_t>(i)]);
      if (q > q1) i1 = i, q1 = q;
    }
    if (i1 < 0) continue;
    const Point z1 = local[static_cast<std::size_t>(i1)];
    for (const auto& z2 : local) {
      const GeodesicSegment across(z1, z2);
      // Skip when [z1, z2] runs through x: the directions are opposite.
      if (across.length() >= distance(x, z1) + distance(x, z2) - 1e-9 * r) continue;
      auto neg_q = [&](double t) {
        const Point m = geodesic_point(across, t);
        if (!(distance(x, m) > 0.0)) return 0.0;
        return -consider(step_toward(x, m, r));
      };
      detail::golden_minimize(neg_q, 0.0, 1.0, 1e-6, -q1, 40);
    }
  }
  // One Richardson step along the best local ray removes the O(r) bias of
  // smooth quotients; kinks give equal quotients and no change.
  if (est.witness && !budget.radii.empty()) {
    const double r = budget.radii.back() * scale;
    const double d = distance(x, *est.witness);
    if (d > 0.0 && d <= 1.5 * r) {
      const double qa = quotient(step_toward(x, *est.witness, r));
      const double qb = quotient(step_toward(x, *est.witness, 0.5 * r));
      if (qb >= qa && qa > 0.0) est.value = std::max(est.value, 2.0 * qb - qa);
    }
  }
  return est;
}

}  // namespace hadamard

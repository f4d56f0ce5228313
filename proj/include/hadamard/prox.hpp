#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "hadamard/detail/golden_section.hpp"
#include "hadamard/errors.hpp"
#include "hadamard/functional.hpp"

namespace hadamard {

struct ProxParams {
  double lambda = 1.0;
  double tol_min = 1e-10;
  double tol_point = 1e-8;
  int max_iter = 10000;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw UsageError("lambda must be > 0");
    if (!(tol_min > 0.0) || !(tol_point > 0.0)) throw UsageError("prox tolerances must be > 0");
    if (max_iter < 1) throw UsageError("max_iter must be >= 1");
  }
};

struct ProxResult {
  Point minimizer;
  ExtendedReal envelope;
  double objective_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

/// Exact proximal points of the single-node functionals, used as starting
/// candidates; for sums and maxima the candidates of every term.
inline void closed_form_candidates(const ConvexFunctional& f, const Point& x, double lambda,
                                   std::vector<Point>& out) {
  using K = ConvexFunctional::Kind;
  switch (f.kind()) {
    case K::zero:
    case K::constant:
    case K::custom: out.push_back(x); break;
    case K::linear: {
      std::vector<double> c(x.coords().begin(), x.coords().end());
      for (std::size_t i = 0; i < c.size(); ++i) c[i] -= lambda * f.linear_slope()[i];
      out.emplace_back(x.space(), std::move(c));
      break;
    }
    case K::dist: out.push_back(step_toward(x, *f.anchor(), lambda * f.weight())); break;
    case K::dist_sq: {
      const double lw = lambda * f.weight();
      out.push_back(geodesic_point(GeodesicSegment(x, *f.anchor()), lw / (1.0 + lw)));
      break;
    }
    case K::indicator: out.push_back(f.region()->project(x)); break;
    case K::sum:
      for (const auto& [w, g] : f.terms()) closed_form_candidates(g, x, lambda * w, out);
      break;
    case K::max:
      for (const auto& [w, g] : f.terms()) closed_form_candidates(g, x, lambda, out);
      break;
  }
}

class ProxObjective {
 public:
  ProxObjective(const ConvexFunctional& f, const Point& x, double lambda) : f_(f), x_(x), inv2l_(0.5 / lambda) {}
  double operator()(const Point& y) const {
    const double fy = f_.raw(y);
    if (!std::isfinite(fy)) return fy;
    const double d = distance(y, x_);
    return fy + d * d * inv2l_;
  }
  double quad(double d) const { return d * d * inv2l_; }

 private:
  const ConvexFunctional& f_;
  const Point& x_;
  double inv2l_;
};

struct LineStep {
  bool improved = false;
  bool hit_end = false;
  double moved = 0.0;
};

/// Golden-section line search of F along [y, z]; replaces y when better.
/// Gains below min_gain move y but do not count as progress.
inline LineStep line_search(const ProxObjective& F, Point& y, double& Fy, const Point& z, double tol_t,
                            double min_gain) {
  LineStep s;
  const GeodesicSegment g(y, z);
  const double len = g.length();
  if (!(len > 0.0)) return s;
  auto phi = [&](double t) { return F(geodesic_point(g, t)); };
  const auto best = golden_minimize(phi, 0.0, 1.0, tol_t, Fy);
  if (best.value < Fy) {
    s.improved = Fy - best.value > min_gain;
    s.hit_end = best.t >= 1.0;
    s.moved = best.t * len;
    y = geodesic_point(g, best.t);
    Fy = best.value;
  }
  return s;
}

}  // namespace detail

/// J_lambda x = argmin_y f(y) + d(y,x)^2 / (2 lambda), with the envelope
/// f_lambda(x) as the minimum value.
///
/// Starts from the best of x, the exact proximal points of the pieces of f,
/// its anchors and samples around its domain hint; then cycles golden-
/// section line searches toward the anchors and along local directions
/// with an adaptive step. The result is audited against the strong-
/// convexity certificate
///   F(J) + d(J,y)^2/(2 lambda) <= F(y) + tol_min
/// and the search restarts from any audit point that breaks it.
inline ProxResult prox(const ConvexFunctional& f, const Point& x, const ProxParams& p = {}) {
  p.validate();
  if (!(x.space() == f.space())) throw UsageError("prox: point and functional live in different spaces");
  const detail::ProxObjective F(f, x, p.lambda);
  std::mt19937_64 rng(p.seed);
  const auto hint = f.domain_hint();

  std::vector<Point> targets;
  detail::closed_form_candidates(f, x, p.lambda, targets);
  for (auto& a : f.anchors(x)) targets.push_back(std::move(a));
  if (auto q = f.domain_projection(x)) targets.push_back(std::move(*q));
  targets.push_back(hint.center);
  std::vector<Point> starts{x};
  starts.insert(starts.end(), targets.begin(), targets.end());
  for (int i = 0; i < 16; ++i) starts.push_back(sample_ball(hint.center, hint.radius, rng));
  targets.push_back(x);

  std::optional<Point> best;
  double Fbest = std::numeric_limits<double>::infinity();
  for (const auto& s : starts) {
    const double v = F(s);
    if (v < Fbest) Fbest = v, best = s;
  }
  for (int i = 0; !best && i < 1024; ++i) {
    const Point s = sample_ball(hint.center, hint.radius * (1.0 + i / 64.0), rng);
    const double v = F(s);
    if (v < Fbest) Fbest = v, best = s;
  }
  if (!best) throw PropernessError("prox: no point with finite value found; functional is not proper");

  Point y = *best;
  double Fy = Fbest;
  const bool multi_dir = !neighbors_exhaustive(f.space());
  const int n_random = multi_dir ? 2 * static_cast<int>(f.space().coord_count()) : 0;
  const double scale = 1.0 + distance(x, y);
  const double min_gain = 1e-3 * p.tol_min;
  int iterations = 0;
  double residual = std::numeric_limits<double>::infinity();

  for (int round = 0; round < 8 && iterations < p.max_iter; ++round) {
    double h = std::max(0.1 * scale, 1e-3);
    while (iterations < p.max_iter) {
      ++iterations;
      bool improved = false, hit_end = false;
      double max_step = 0.0;
      for (const auto& t : targets) {
        const double len = distance(y, t);
        if (!(len > 0.0)) continue;
        const double tol_t = std::clamp(0.1 * p.tol_point / len, 1e-15, 1e-3);
        const auto s = detail::line_search(F, y, Fy, t, tol_t, min_gain);
        improved |= s.improved;
      }
      std::vector<Point> dirs = neighbors(y, h);
      for (int i = 0; i < n_random; ++i) dirs.push_back(random_neighbor(y, h, rng));
      for (const auto& z : dirs) {
        const auto s = detail::line_search(F, y, Fy, z, 1e-3, min_gain);
        improved |= s.improved;
        hit_end |= s.hit_end;
        max_step = std::max(max_step, s.moved);
      }
      if (hit_end)
        h *= 2.0;
      else if (improved)
        h = std::clamp(2.0 * max_step, 0.1 * h, 2.0 * h);
      else
        h *= 0.1;
      if (!improved && h < p.tol_point * 0.01) break;
    }

    // Kinks: prefer an exact anchor when it is as good and essentially here.
    for (const auto& a : targets) {
      if (distance(a, y) > 1e3 * p.tol_point) continue;
      const double v = F(a);
      if (v <= Fy + p.tol_min) y = a, Fy = v;
    }

    // Audit the certificate; restart from any point that breaks it.
    residual = 0.0;
    std::optional<Point> better;
    double Fbetter = Fy;
    std::vector<Point> audit;
    for (double r : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
      const double rad = r * scale;
      for (auto& z : neighbors(y, rad)) audit.push_back(std::move(z));
      for (int i = 0; i < 4 + n_random; ++i) audit.push_back(random_neighbor(y, rad, rng));
    }
    for (int i = 0; i < 16; ++i) audit.push_back(sample_ball(hint.center, hint.radius, rng));
    for (const auto& t : targets) audit.push_back(t);
    for (const auto& z : audit) {
      const double Fz = F(z);
      if (!std::isfinite(Fz)) continue;
      const double d = distance(y, z);
      residual = std::max(residual, Fy + F.quad(d) - Fz);
      if (Fz < Fbetter) Fbetter = Fz, better = z;
    }
    if (residual <= p.tol_min || !better) break;
    y = *better;
    Fy = Fbetter;
  }

  ProxResult r{y, ExtendedReal(Fy), std::max(0.0, residual), iterations, residual <= p.tol_min};
  return r;
}

inline ExtendedReal moreau_envelope(const ConvexFunctional& f, const Point& x, const ProxParams& p = {}) {
  return prox(f, x, p).envelope;
}

/// x -> f_lambda(x) as a functional (evaluated by solving the prox).
inline ConvexFunctional envelope_functional(const ConvexFunctional& f, const ProxParams& p) {
  p.validate();
  auto eval = [f, p](const Point& x) { return prox(f, x, p).envelope.value(); };
  auto anchors = [f](const Point& x) { return f.anchors(x); };
  return ConvexFunctional::custom(f.space(), eval, f.domain_hint(),
                                  "envelope(" + f.label() + ",lambda=" + format_real(p.lambda) + ")", anchors);
}

}  // namespace hadamard

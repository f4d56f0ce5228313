#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hadamard/convergence.hpp"
#include "hadamard/slope.hpp"
#include "hadamard/theorem_report.hpp"

namespace hadamard {

inline constexpr double kSlopeCap = 1e6;

struct PointSlope {
  Point x;
  double tail_estimate = 0.0;  // +inf when diverging or off the domain
  bool diverging = false;
  bool inconclusive = false;
  Series series;
};

/// Tail estimates of limsup_n |df^n|(x) on a grid and the membership flags
/// they imply.
struct SlopeEnvelopeProfile {
  std::vector<PointSlope> points;
  double bound = 0.0;  // max over the grid (+inf if any point is unbounded)
  Outcome in_A = Outcome::inconclusive;
  Outcome in_A0 = Outcome::inconclusive;

  const PointSlope* at(const Point& x) const {
    for (const auto& p : points)
      if (p.x == x) return &p;
    return nullptr;
  }

  Verdict verdict() const {
    for (const auto& p : points) {
      if (std::isfinite(p.tail_estimate)) continue;
      Witness w{p.x.to_string(), std::nan(""), p.series.data.empty() ? -1 : static_cast<long>(p.series.data.back().first),
                p.tail_estimate, p.diverging ? "slope grows along the tail" : "slope is +inf (point outside the domain)"};
      Verdict v = Verdict::violated(w, "limsup_n |df^n|(x) is not finite");
      v.set_metric("bound", bound);
      return v;
    }
    if (in_A == Outcome::inconclusive) return Verdict::inconclusive("slope estimate inconclusive on the grid");
    Verdict v = Verdict::consistent(0.0, "finite grid: uniform bound is the grid maximum");
    v.set_metric("bound", bound);
    for (const auto& p : points) v.series.push_back(p.series);
    return v;
  }
};

namespace detail {

/// Least-squares slope of log v against log n over the positive entries.
inline double log_log_rate(const std::vector<int>& ns, const std::vector<double>& v) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) continue;
    const double x = std::log(double(ns[i])), y = std::log(v[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
    ++m;
  }
  if (m < 3) return 0.0;
  const double den = m * sxx - sx * sx;
  return den > 0 ? (m * sxy - sx * sy) / den : 0.0;
}

inline PointSlope profile_point(const FunctionSequence& seq, const Point& x, const ModeSpec& spec) {
  const auto ns = spec.tail.indices();
  PointSlope ps{x, 0.0, false, false, Series{"slope x=" + x.to_string(), "n", "|df^n|(x)", {}}};
  std::vector<double> v;
  for (int n : ns) {
    const auto est = slope(seq(n), x, spec.slope);
    ps.inconclusive |= est.inconclusive;
    v.push_back(est.value);
    ps.series.data.emplace_back(n, est.value);
  }
  const double late = tail_limsup(ns, v, spec.tail.split());
  const double first = v.front(), last = v.back();
  ps.diverging = std::isfinite(late) && log_log_rate(ns, v) >= 0.25 && last >= 1.5 * first && last > 0.0;
  ps.tail_estimate = (ps.diverging || !std::isfinite(late) || late > kSlopeCap) ? kInf : std::max(0.0, late);
  ps.diverging |= std::isfinite(late) && late > kSlopeCap;
  return ps;
}

}  // namespace detail

inline SlopeEnvelopeProfile asymptotic_slope_check(const FunctionSequence& seq, const std::vector<Point>& points,
                                                   const ModeSpec& spec) {
  if (points.empty()) throw UsageError("asymptotic_slope_check needs a nonempty grid");
  spec.tail.validate();
  SlopeEnvelopeProfile prof;
  bool any_inconclusive = false, all_finite = true;
  for (const auto& x : points) {
    prof.points.push_back(detail::profile_point(seq, x, spec));
    const auto& p = prof.points.back();
    any_inconclusive |= p.inconclusive;
    all_finite &= std::isfinite(p.tail_estimate);
    prof.bound = std::max(prof.bound, p.tail_estimate);
  }
  prof.in_A = !all_finite ? Outcome::violated : any_inconclusive ? Outcome::inconclusive : Outcome::consistent_with;
  // On a finite grid every finite family of estimates is uniformly bounded.
  prof.in_A0 = prof.in_A;
  return prof;
}

/// h^n = alpha f^n + beta g^n stays in A on the grid with
/// limsup |dh^n| <= alpha limsup |df^n| + beta limsup |dg^n|.
inline Verdict cone_closure_check(const FunctionSequence& a, const FunctionSequence& b, double alpha, double beta,
                                  const std::vector<Point>& points, const ModeSpec& spec, double tol_slope = kSlopeTol) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw UsageError("cone_closure_check needs alpha, beta > 0");
  const auto pa = asymptotic_slope_check(a, points, spec);
  const auto pb = asymptotic_slope_check(b, points, spec);
  if (pa.in_A != Outcome::consistent_with || pb.in_A != Outcome::consistent_with)
    return Verdict::inconclusive("precondition: both sequences must have asymptotically bounded slope on the grid");
  const auto h = FunctionSequence::combination(a, alpha, b, beta);
  const auto ph = asymptotic_slope_check(h, points, spec);
  if (ph.in_A == Outcome::violated) {
    Verdict v = ph.verdict();
    v.reason = "combination left A on the grid: " + v.reason;
    return v;
  }
  double worst = -detail::kInf;
  std::optional<Witness> witness;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double bound = alpha * pa.points[i].tail_estimate + beta * pb.points[i].tail_estimate;
    const double excess = ph.points[i].tail_estimate - bound;
    const double tol = tol_slope * (1.0 + bound);
    if (excess > worst) worst = excess;
    if (excess > tol && !witness)
      witness = Witness{points[i].to_string(), std::nan(""), -1, excess,
                        "combined " + format_real(ph.points[i].tail_estimate) + " > bound " + format_real(bound)};
  }
  if (witness) return Verdict::violated(*witness, "slope of the combination exceeds the cone bound");
  if (ph.in_A == Outcome::inconclusive) return Verdict::inconclusive("slope estimate inconclusive");
  Verdict v = Verdict::consistent(std::max(0.0, worst));
  v.set_metric("bound_f", pa.bound);
  v.set_metric("bound_g", pb.bound);
  v.set_metric("bound_h", ph.bound);
  for (const auto& p : ph.points) v.series.push_back(p.series);
  return v;
}

struct RatioBudget {
  int global_samples = 128;
  std::vector<double> radii{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
  int local_random = 4;
  std::uint64_t seed = 0;
};

namespace detail {

inline std::vector<Point> ratio_samples(const ConvexFunctional& f, const Point& x, const RatioBudget& b, int global) {
  std::mt19937_64 rng(b.seed);
  const auto hint = f.domain_hint();
  std::vector<Point> ys;
  for (int i = 0; i < global; ++i) ys.push_back(sample_ball(hint.center, hint.radius, rng));
  for (double r : b.radii) {
    for (auto& y : neighbors(x, r)) ys.push_back(std::move(y));
    for (int i = 0; i < b.local_random; ++i) ys.push_back(random_neighbor(x, r, rng));
  }
  for (auto& a : f.anchors(x)) ys.push_back(std::move(a));
  return ys;
}

inline double ratio(const ConvexFunctional& f, double fx, const Point& x, const Point& y) {
  const double d = distance(x, y);
  if (!(d > 0.0)) return 0.0;
  const double fy = f.raw(y);
  if (!std::isfinite(fy)) return 0.0;
  return std::max(fx - fy, 0.0) / d;
}

/// Tail residual of sup_y |g^n(y;x) - g(y;x)| with the given sample count.
inline TailAssessment uniform_ratio_tail(const FunctionSequence& seq, const ConvexFunctional& f, const Point& x,
                                         const ModeSpec& spec, const RatioBudget& b, int global, Series* series) {
  const auto ns = spec.tail.indices();
  const auto ys = ratio_samples(f, x, b, global);
  const double fx = f.raw(x);
  std::vector<double> g;
  for (const auto& y : ys) g.push_back(ratio(f, fx, x, y));
  std::vector<double> sup;
  for (int n : ns) {
    const auto fn = seq(n);
    const double fnx = fn.raw(x);
    double s = 0.0;
    if (!std::isfinite(fnx)) {
      s = kInf;
    } else {
      for (std::size_t i = 0; i < ys.size(); ++i) s = std::max(s, std::abs(ratio(fn, fnx, x, ys[i]) - g[i]));
    }
    sup.push_back(s);
    if (series) series->data.emplace_back(n, s);
  }
  return assess(ns, sup, spec.tail.split());
}

}  // namespace detail

/// The uniform ratio condition sup_y |g^n(y;x) - g(y;x)| -> 0 as a
/// hypothesis, and its conclusions: |df^n|(x) -> |df|(x) on the grid points
/// of dom|df| and membership in A there.
inline TheoremReport sufficient_condition_check(const FunctionSequence& seq, const ConvexFunctional& f,
                                                const std::vector<Point>& points, const ModeSpec& spec,
                                                const RatioBudget& budget = {}) {
  if (points.empty()) throw UsageError("sufficient_condition_check needs a nonempty grid");
  spec.tail.validate();
  TheoremReport rep;
  rep.theorem_id = "sufficient_condition";
  const double tol = spec.tail.tol;

  std::vector<Point> dom;
  std::vector<double> slope_f;
  for (const auto& x : points) {
    if (!std::isfinite(f.raw(x))) continue;
    const double s = slope(f, x, spec.slope).value;
    if (!std::isfinite(s)) continue;
    dom.push_back(x);
    slope_f.push_back(s);
  }
  if (dom.empty()) {
    rep.add("uniform_ratio", Role::hypothesis, Verdict::inconclusive("no grid point in dom|df|"));
  } else {
    double worst = 0.0;
    std::optional<Witness> wit;
    bool unstable = false;
    Verdict hyp;
    std::vector<Series> series;
    for (const auto& x : dom) {
      Series s{"uniform_ratio x=" + x.to_string(), "n", "sup_y |g^n - g|", {}};
      const auto a = detail::uniform_ratio_tail(seq, f, x, spec, budget, budget.global_samples, &s);
      const auto b = detail::uniform_ratio_tail(seq, f, x, spec, budget, 2 * budget.global_samples, nullptr);
      unstable |= (a.residual <= tol) != (b.residual <= tol);
      const double r = std::max(a.residual, b.residual);
      if (!wit || r > worst) worst = r, wit = Witness{x.to_string(), std::nan(""), a.worst_n, r, "ratio difference tail"};
      series.push_back(std::move(s));
    }
    if (unstable)
      hyp = Verdict::inconclusive("sup estimate changes verdict under sample doubling");
    else if (worst > tol)
      hyp = Verdict::violated(*wit, "uniform ratio difference does not vanish");
    else
      hyp = Verdict::consistent(worst);
    hyp.series = std::move(series);
    rep.add("uniform_ratio", Role::hypothesis, hyp);
  }

  if (!rep.checks.front().verdict.ok()) {
    rep.add("slope_convergence", Role::conclusion, Verdict::inconclusive("not tested: hypothesis not established"));
    rep.add("A_membership", Role::conclusion, Verdict::inconclusive("not tested: hypothesis not established"));
  } else {
    const auto prof = asymptotic_slope_check(seq, dom, spec);
    const auto ns = spec.tail.indices();
    double worst = 0.0, cross = 0.0;
    std::optional<Witness> wit;
    for (std::size_t i = 0; i < dom.size(); ++i) {
      std::vector<double> diff;
      for (const auto& [n, v] : prof.points[i].series.data) diff.push_back(std::abs(v - slope_f[i]));
      const auto a = detail::assess(ns, diff, spec.tail.split());
      cross = std::max(cross, std::abs(prof.points[i].tail_estimate - slope_f[i]));
      if (!wit || a.residual > worst)
        worst = a.residual, wit = Witness{dom[i].to_string(), std::nan(""), a.worst_n, a.residual, "|df^n|(x) - |df|(x)"};
    }
    Verdict conv = worst > tol ? Verdict::violated(*wit, "slopes do not converge to the slope of the limit")
                               : Verdict::consistent(worst);
    conv.set_metric("profile_cross_check", cross);
    rep.add("slope_convergence", Role::conclusion, conv);
    rep.add("A_membership", Role::conclusion, prof.verdict());
  }
  rep.implications.push_back({"uniform ratio => slope convergence and A(dom|df|)", {"uniform_ratio"},
                              {"slope_convergence", "A_membership"}});
  settle(rep);
  return rep;
}

}  // namespace hadamard

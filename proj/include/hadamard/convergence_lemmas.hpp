#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hadamard/convergence.hpp"
#include "hadamard/region.hpp"
#include "hadamard/slope.hpp"

namespace hadamard {

namespace detail {

struct NormalizationTails {
  double distance = 0.0;
  double value = 0.0;
  double slope = 0.0;
  int worst_n = -1;
  bool solver_failed = false;
  std::vector<Series> series;
};

/// Tails of d(x_n, x), |f^n(x_n) - f(x)| and | |df^n|(x_n) - |df|(x) |.
template <class Candidate>
NormalizationTails normalization_tails(ConvergenceLab& lab, const Point& x, Candidate&& xn, const std::string& tag) {
  const auto& spec = lab.spec();
  const auto& ns = lab.indices();
  const auto& f = lab.limit();
  const double fx = f.raw(x);
  const double sx = slope(f, x, spec.slope).value;
  std::vector<double> d, v, s;
  NormalizationTails t;
  Series sd{tag + " d(x_n,x)", "n", "distance", {}}, sv{tag + " |f^n(x_n)-f(x)|", "n", "gap", {}},
      ss{tag + " slope gap", "n", "gap", {}};
  for (int n : ns) {
    bool ok = true;
    const Point p = xn(n, ok);
    t.solver_failed |= !ok;
    const auto& fn = lab.member(n);
    d.push_back(distance(p, x));
    v.push_back(gap(fn.raw(p), fx));
    s.push_back(gap(slope(fn, p, spec.slope).value, sx));
    sd.data.emplace_back(n, d.back());
    sv.data.emplace_back(n, v.back());
    ss.data.emplace_back(n, s.back());
  }
  const auto a = assess(ns, d, lab.split()), b = assess(ns, v, lab.split()), c = assess(ns, s, lab.split());
  t.distance = a.residual, t.value = b.residual, t.slope = c.residual;
  t.worst_n = a.residual >= std::max(b.residual, c.residual) ? a.worst_n : b.residual >= c.residual ? b.worst_n : c.worst_n;
  t.series = {sd, sv, ss};
  return t;
}

inline Verdict normalization_verdict(const NormalizationTails& t, const Point& x, double lambda, double tol,
                                     const std::string& what) {
  const double worst = std::max({t.distance, t.value, t.slope});
  Verdict v;
  if (worst > tol) {
    Witness w{x.to_string(), lambda, t.worst_n, worst,
              "tails d=" + format_real(t.distance) + " f=" + format_real(t.value) + " slope=" + format_real(t.slope)};
    v = Verdict::violated(w, what + " fails");
  } else if (t.solver_failed) {
    v = Verdict::inconclusive("prox solver did not certify");
    v.residual = worst;
  } else {
    v = Verdict::consistent(worst);
  }
  v.set_metric("distance_tail", t.distance);
  v.set_metric("value_tail", t.value);
  v.set_metric("slope_tail", t.slope);
  v.series = t.series;
  return v;
}

}  // namespace detail

/// With x_n = J^n_lambda x0 and x = J_lambda x0: d(x_n, x) -> 0,
/// f^n(x_n) -> f(x) and |df^n|(x_n) -> |df|(x). Requires Mosco
/// convergence, checked first.
inline Verdict normalization_check(ConvergenceLab& lab, const Point& x0, double lambda) {
  const Verdict m = lab.mosco({}, Recovery::prox_path, false);
  if (!m.ok())
    throw UsageError("normalization_check: the sequence is not Mosco convergent to the limit (" +
                     std::string(to_string(m.outcome)) + ": " + m.reason + ")");
  const auto& f = lab.limit();
  ProxParams p = lab.params(lambda);
  const auto lim = prox(f, x0, p);
  const auto t = detail::normalization_tails(
      lab, lim.minimizer,
      [&](int n, bool& ok) {
        const auto r = prox(lab.member(n), x0, p);
        ok = r.converged;
        return r.minimizer;
      },
      "J^n x0");
  auto v = detail::normalization_verdict(t, lim.minimizer, lambda, lab.spec().tail.tol, "normalization condition");
  if (!lim.converged && v.ok()) v = Verdict::inconclusive("prox solver did not certify J_lambda x0");
  return v;
}

inline Verdict normalization_check(const FunctionSequence& seq, const ConvexFunctional& f, const Point& x0,
                                   double lambda, ModeSpec spec) {
  if (spec.points.empty()) spec.points = {x0};
  ConvergenceLab lab(seq, f, spec);
  return normalization_check(lab, x0, lambda);
}

/// Equi-Lipschitz envelopes on a bounded region: f^n_lambda(x0) converges
/// to a finite alpha_0, the lower-bound certificate
///   f^n(x) + r (d(x, x0)^2 + 1) >= 0,  r = max(1/(2 lambda), tol - alpha_0),
/// holds on samples, and the pairwise Lipschitz quotients of f^n_lambda stay
/// uniformly bounded along the tail.
inline Verdict equi_lipschitz_check(const FunctionSequence& seq, double lambda, const Point& x0, const Region& region,
                                    int samples, const ModeSpec& spec) {
  if (samples < 2) throw UsageError("equi_lipschitz_check needs samples >= 2");
  if (!(region.space() == seq.space()) || !(x0.space() == seq.space()))
    throw UsageError("equi_lipschitz_check: region, point and sequence must share a space");
  spec.tail.validate();
  const auto ns = spec.tail.indices();
  const int split = spec.tail.split();
  ProxParams p = spec.prox;
  p.lambda = lambda;

  // Precondition: f^n_lambda(x0) -> alpha_0 finite.
  std::vector<double> env;
  for (int n : ns) env.push_back(prox(seq(n), x0, p).envelope.value());
  const int n_half = std::max(spec.tail.n_min, spec.tail.n_max / 2);
  const double e_half = prox(seq(n_half), x0, p).envelope.value();
  const double alpha0 = 2.0 * env.back() - e_half;
  std::vector<double> dev;
  for (double e : env) dev.push_back(std::abs(e - alpha0));
  const auto pre = detail::assess(ns, dev, split);
  if (!std::isfinite(alpha0) || pre.residual > spec.tail.tol) {
    Witness w{x0.to_string(), lambda, pre.worst_n, pre.residual, "f^n_lambda(x0) does not settle"};
    return Verdict::violated(w, "precondition: envelope at x0 does not converge");
  }

  // Sample points of the region (fixed across n).
  std::mt19937_64 rng(spec.prox.seed);
  std::vector<Point> pts = region.extreme_points();
  const Point c = region.center();
  const double rad = std::max(region.bounding_radius(), 1e-3);
  pts.push_back(c);
  while (static_cast<int>(pts.size()) < samples) pts.push_back(region.project(sample_ball(c, rad, rng)));

  // (a) lower-bound certificate
  const double r = std::max(0.5 / lambda, spec.tail.tol - alpha0);
  double cert_worst = 0.0;
  std::optional<Witness> cert_w;
  std::vector<int> n_sub;
  for (std::size_t i = 0; i < ns.size(); i += std::max<std::size_t>(1, ns.size() / 24)) n_sub.push_back(ns[i]);
  if (n_sub.back() != ns.back()) n_sub.push_back(ns.back());
  for (int n : n_sub) {
    const auto fn = seq(n);
    for (const auto& x : pts) {
      const double d = distance(x, x0);
      const double lhs = fn.raw(x) + r * (d * d + 1.0);
      if (lhs < -1e-12 && (!cert_w || -lhs > cert_worst)) {
        cert_worst = -lhs;
        cert_w = Witness{x.to_string(), lambda, n, -lhs, "lower-bound certificate"};
      }
    }
  }
  if (cert_w) return Verdict::violated(*cert_w, "f^n + r(d(.,x0)^2 + 1) takes negative values");

  // (b) Lipschitz quotients of the envelopes
  Series s{"envelope Lipschitz", "n", "max quotient", {}};
  double early = 0.0, late = 0.0, overall = 0.0;
  bool solver_failed = false;
  int worst_n = -1;
  for (int n : n_sub) {
    const auto fn = seq(n);
    std::vector<double> e;
    for (const auto& x : pts) {
      const auto res = prox(fn, x, p);
      solver_failed |= !res.converged;
      e.push_back(res.envelope.value());
    }
    double L = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        const double d = distance(pts[i], pts[j]);
        if (d > 1e-9) L = std::max(L, std::abs(e[i] - e[j]) / d);
      }
    s.data.emplace_back(n, L);
    if (L > overall) overall = L, worst_n = n;
    (n < split ? early : late) = std::max(n < split ? early : late, L);
  }
  Verdict v;
  if (!std::isfinite(overall) || late > 1.1 * early + 1e-9) {
    Witness w{region.descriptor(), lambda, worst_n, overall, "late max " + format_real(late) + " vs early " + format_real(early)};
    v = Verdict::violated(w, "envelope Lipschitz constants keep growing along the tail");
  } else if (solver_failed) {
    v = Verdict::inconclusive("prox solver did not certify");
  } else {
    v = Verdict::consistent(0.0);
  }
  v.set_metric("lipschitz_constant", overall);
  v.set_metric("alpha0", alpha0);
  v.set_metric("certificate_r", r);
  v.series.push_back(std::move(s));
  return v;
}

}  // namespace hadamard

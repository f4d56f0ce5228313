#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hadamard/convergence.hpp"
#include "hadamard/convergence_lemmas.hpp"
#include "hadamard/convexity.hpp"
#include "hadamard/slope_profile.hpp"
#include "hadamard/theorem_report.hpp"

namespace hadamard {

enum class TheoremId { thm1, thm2, mainthm, bacak_fwd, bacak2_bwd, attouch_hadamard };

inline std::string_view to_string(TheoremId t) {
  switch (t) {
    case TheoremId::thm1: return "thm1";
    case TheoremId::thm2: return "thm2";
    case TheoremId::mainthm: return "mainthm";
    case TheoremId::bacak_fwd: return "bacak_fwd";
    case TheoremId::bacak2_bwd: return "bacak2_bwd";
    case TheoremId::attouch_hadamard: return "attouch_hadamard";
  }
  return "?";
}

inline std::vector<TheoremId> all_theorems() {
  return {TheoremId::thm1, TheoremId::thm2, TheoremId::mainthm, TheoremId::bacak_fwd, TheoremId::bacak2_bwd,
          TheoremId::attouch_hadamard};
}

inline TheoremId parse_theorem(std::string_view s) {
  for (auto t : all_theorems())
    if (to_string(t) == s) return t;
  throw UsageError("unknown theorem id '" + std::string(s) +
                   "' (thm1, thm2, mainthm, bacak_fwd, bacak2_bwd, attouch_hadamard)");
}

/// Theorem-specific inputs; unset fields fall back to the ModeSpec grid.
struct TheoremExtras {
  std::optional<Point> x0;                // normalization anchor (default: first grid point)
  std::optional<double> lambda;           // default: first lambda of the grid
  std::vector<GeodesicSegment> bundle;    // geodesics from x0 (default: toward the other grid points)
  int quadrature_nodes = 1024;
  double quadrature_tol = 1e-6;
  int derivative_stride = 8;              // every k-th tail index for derivative tails
  std::vector<WeakProbe> weak_probes;
};

struct IntegralIdentity {
  double direct = 0.0;      // f_lambda(x) - f_lambda(x0)
  double quadrature = 0.0;  // integral of g'(t) by the midpoint rule
  double error = 0.0;
};

/// f_lambda(x1) - f_lambda(x0) against the midpoint-rule integral of
/// g'(t) = d/dt f_lambda(x_t) along [x0, x1]; g' is the average of the two
/// one-sided derivatives at each node.
inline IntegralIdentity integral_identity(const ConvexFunctional& f, const GeodesicSegment& g, const ProxParams& p,
                                          int nodes = 1024) {
  if (nodes < 1) throw UsageError("quadrature needs nodes >= 1");
  const double L = g.length();
  IntegralIdentity out;
  const auto env = envelope_functional(f, p);
  out.direct = env.raw(g.end()) - env.raw(g.start());
  if (!(L > 0.0)) return out;
  const StepSchedule sched{17, 20, L};
  double acc = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const double t = (i + 0.5) / nodes;
    const Point xt = geodesic_point(g, t);
    const double fwd = directional_derivative(env, xt, GeodesicSegment(xt, g.end()), Side::lower, sched);
    const double bwd = directional_derivative(env, xt, GeodesicSegment(xt, g.start()), Side::lower, sched);
    acc += 0.5 * (fwd - bwd) * L / nodes;
  }
  out.quadrature = acc;
  out.error = std::abs(out.direct - out.quadrature);
  return out;
}

namespace detail {

class TheoremContext {
 public:
  TheoremContext(const FunctionSequence& seq, const ConvexFunctional& f, const ModeSpec& spec, const TheoremExtras& ex)
      : lab_(seq, f, spec), extras_(ex) {}

  ConvergenceLab& lab() { return lab_; }
  const ModeSpec& spec() const { return lab_.spec(); }

  Verdict mode(Mode m) {
    if (m == Mode::mosco) return lab_.mosco(extras_.weak_probes, Recovery::prox_path, false);
    return lab_.limit_check(m);
  }

  const SlopeEnvelopeProfile& profile() {
    if (!profile_) profile_ = asymptotic_slope_check(lab_.sequence(), spec().points, spec());
    return *profile_;
  }
  Verdict a_membership() { return profile().verdict(); }

  Point x0() const { return extras_.x0 ? *extras_.x0 : spec().points.front(); }
  double lambda() const { return extras_.lambda ? *extras_.lambda : spec().lambdas.front(); }

  std::vector<GeodesicSegment> bundle() const {
    if (!extras_.bundle.empty()) return extras_.bundle;
    std::vector<GeodesicSegment> out;
    const Point a = x0();
    for (const auto& x : spec().points)
      if (!(x == a)) out.emplace_back(a, x);
    if (out.empty())
      for (const auto& nb : neighbors(a, 1.0)) out.emplace_back(a, nb);
    return out;
  }

  /// Some x_n -> x0 with f^n(x_n) -> f(x0) and |df^n|(x_n) -> |df|(x0);
  /// candidates x_n = x0 and x_n = J^n_{1/n} x0.
  Verdict normalization_at_x0() {
    const Point a = x0();
    const double tol = spec().tail.tol;
    if (!std::isfinite(lab_.limit().raw(a))) return Verdict::inconclusive("f(x0) = +inf: normalization anchor off the domain");
    auto constant = normalization_tails(lab_, a, [&](int, bool& ok) { ok = true; return a; }, "x_n=x0");
    auto v = normalization_verdict(constant, a, std::nan(""), tol, "normalization with x_n = x0");
    if (v.ok()) return v;
    auto path = normalization_tails(
        lab_, a,
        [&](int n, bool& ok) {
          const auto r = prox(lab_.member(n), a, lab_.params(1.0 / n));
          ok = r.converged;
          return r.minimizer;
        },
        "x_n=J^n_{1/n}x0");
    auto w = normalization_verdict(path, a, std::nan(""), tol, "normalization with x_n = J^n_{1/n} x0");
    if (w.ok() || (w.is_violated() && v.is_violated() && w.residual < v.residual)) return w;
    return v.is_violated() && !w.is_violated() ? w : v;
  }

  /// Tail of |(f^n_lambda)'(x0; gamma) - (f_lambda)'(x0; gamma)| over the
  /// lambda grid and the geodesic bundle.
  Verdict derivative_convergence() {
    const auto& ns = lab_.indices();
    const Point a = x0();
    const StepSchedule sched{10, 14, -1.0};
    std::vector<int> sub;
    const int stride = std::max(1, extras_.derivative_stride);
    for (std::size_t i = 0; i < ns.size(); i += static_cast<std::size_t>(stride)) sub.push_back(ns[i]);
    if (sub.back() != ns.back()) sub.push_back(ns.back());
    double worst = 0.0;
    std::optional<Witness> wit;
    std::vector<Series> series;
    for (double lam : spec().lambdas) {
      const auto p = lab_.params(lam);
      const auto env = envelope_functional(lab_.limit(), p);
      for (const auto& g : bundle()) {
        const double d = directional_derivative(env, a, g, Side::lower, sched);
        std::vector<double> diff;
        Series s{"derivative lambda=" + format_real(lam) + " toward " + g.end().to_string(), "n", "gap", {}};
        for (int n : sub) {
          const auto en = envelope_functional(lab_.member(n), p);
          diff.push_back(std::abs(directional_derivative(en, a, g, Side::lower, sched) - d));
          s.data.emplace_back(n, diff.back());
        }
        const auto as = assess(sub, diff, lab_.split());
        if (!wit || as.residual > worst)
          worst = as.residual,
          wit = Witness{a.to_string(), lam, as.worst_n, as.residual, "derivative toward " + g.end().to_string()};
        series.push_back(std::move(s));
      }
    }
    Verdict v = worst > spec().tail.tol ? Verdict::violated(*wit, "envelope derivatives along the bundle do not converge")
                                        : Verdict::consistent(worst);
    v.series = std::move(series);
    return v;
  }

  Verdict identity() {
    const auto g = bundle().front();
    const auto p = lab_.params(lambda());
    const auto lim = integral_identity(lab_.limit(), g, p, extras_.quadrature_nodes);
    const int n = spec().tail.n_max;
    const auto mem = integral_identity(lab_.member(n), g, p, extras_.quadrature_nodes);
    const double err = std::max(lim.error, mem.error);
    Verdict v;
    if (err > extras_.quadrature_tol) {
      Witness w{g.end().to_string(), lambda(), lim.error >= mem.error ? -1 : n, err,
                "direct " + format_real(lim.error >= mem.error ? lim.direct : mem.direct) + " quadrature " +
                    format_real(lim.error >= mem.error ? lim.quadrature : mem.quadrature)};
      v = Verdict::violated(w, "quadrature does not reproduce the envelope difference");
    } else {
      v = Verdict::consistent(err);
    }
    v.set_metric("quadrature_error_limit", lim.error);
    v.set_metric("quadrature_error_member", mem.error);
    v.set_metric("nodes", extras_.quadrature_nodes);
    return v;
  }

  /// Diagonal lambda(n) = 1/sqrt(n): tail of |f^n_{lambda(n)}(x) - f(x)|.
  double diagonal_residual() {
    double worst = 0.0;
    const auto& ns = lab_.indices();
    for (const auto& x : spec().points) {
      const double fx = lab_.limit().raw(x);
      std::vector<double> v;
      for (int n : ns) v.push_back(gap(prox(lab_.member(n), x, lab_.params(1.0 / std::sqrt(double(n)))).envelope.value(), fx));
      worst = std::max(worst, tail_residual(ns, v, lab_.split()));
    }
    return worst;
  }

 private:
  ConvergenceLab lab_;
  TheoremExtras extras_;
  std::optional<SlopeEnvelopeProfile> profile_;
};

}  // namespace detail

/// Evaluates the hypotheses and conclusions of one theorem as sub-checks
/// and settles its implications.
inline TheoremReport theorem_verify(TheoremId id, const FunctionSequence& seq, const ConvexFunctional& f,
                                    const ModeSpec& spec, const TheoremExtras& extras = {}) {
  detail::TheoremContext ctx(seq, f, spec, extras);
  TheoremReport rep;
  rep.theorem_id = std::string(to_string(id));
  auto add = [&](const char* name, Role role, Verdict v) { rep.add(name, role, std::move(v)); };

  switch (id) {
    case TheoremId::thm1:
      add("pointwise", Role::hypothesis, ctx.mode(Mode::pointwise));
      add("A_H", Role::hypothesis, ctx.a_membership());
      add("prox", Role::hypothesis, ctx.mode(Mode::prox));
      add("envelope", Role::conclusion, ctx.mode(Mode::envelope));
      rep.implications.push_back({"pointwise, A(H), prox => envelope", {"pointwise", "A_H", "prox"}, {"envelope"}});
      break;
    case TheoremId::thm2: {
      add("A_H", Role::hypothesis, ctx.a_membership());
      add("envelope", Role::hypothesis, ctx.mode(Mode::envelope));
      add("prox", Role::conclusion, ctx.mode(Mode::prox));
      add("pointwise", Role::conclusion, ctx.mode(Mode::pointwise));
      rep.implications.push_back({"A(H), envelope => prox, pointwise", {"A_H", "envelope"}, {"prox", "pointwise"}});
      rep.note("diagonal lambda(n)=1/sqrt(n) residual " + format_real(ctx.diagonal_residual()) + " (informational)");
      break;
    }
    case TheoremId::mainthm:
      add("A_H", Role::hypothesis, ctx.a_membership());
      add("mosco", Role::hypothesis, ctx.mode(Mode::mosco));
      add("pointwise", Role::hypothesis, ctx.mode(Mode::pointwise));
      add("prox", Role::hypothesis, ctx.mode(Mode::prox));
      rep.implications.push_back({"A(H), mosco => pointwise, prox", {"A_H", "mosco"}, {"pointwise", "prox"}});
      rep.implications.push_back({"A(H), pointwise, prox => mosco", {"A_H", "pointwise", "prox"}, {"mosco"}});
      rep.note("both directions share sub-checks; roles are per implication");
      break;
    case TheoremId::bacak_fwd:
      add("mosco", Role::hypothesis, ctx.mode(Mode::mosco));
      add("envelope", Role::conclusion, ctx.mode(Mode::envelope));
      add("prox", Role::conclusion, ctx.mode(Mode::prox));
      rep.implications.push_back({"mosco => envelope, prox", {"mosco"}, {"envelope", "prox"}});
      break;
    case TheoremId::bacak2_bwd:
      add("envelope", Role::hypothesis, ctx.mode(Mode::envelope));
      add("mosco", Role::conclusion, ctx.mode(Mode::mosco));
      rep.implications.push_back({"envelope => mosco", {"envelope"}, {"mosco"}});
      break;
    case TheoremId::attouch_hadamard:
      add("prox", Role::hypothesis, ctx.mode(Mode::prox));
      add("normalization", Role::hypothesis, ctx.normalization_at_x0());
      add("dir_derivatives", Role::hypothesis, ctx.derivative_convergence());
      add("envelope", Role::conclusion, ctx.mode(Mode::envelope));
      add("integral_identity", Role::identity, ctx.identity());
      rep.implications.push_back({"prox, normalization, derivatives => envelope",
                                  {"prox", "normalization", "dir_derivatives"},
                                  {"envelope"}});
      rep.implications.push_back({"integral identity", {}, {"integral_identity"}});
      break;
  }
  settle(rep);
  return rep;
}

inline TheoremReport theorem_verify(std::string_view id, const FunctionSequence& seq, const ConvexFunctional& f,
                                    const ModeSpec& spec, const TheoremExtras& extras = {}) {
  return theorem_verify(parse_theorem(id), seq, f, spec, extras);
}

}  // namespace hadamard

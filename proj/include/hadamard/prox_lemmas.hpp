#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hadamard/prox.hpp"
#include "hadamard/slope.hpp"
#include "hadamard/theorem_report.hpp"

namespace hadamard {

/// Checks, for each lambda of a descending grid:
///   ubound           |df|(J x) <= d(J x, x) / lambda
///   id2              (f(x) - f_lambda(x)) / lambda <= |df|(x)^2 / 2
///   id1              J x approaches the nearest point of cl dom f
///   envelope_monotone f_lambda(x) nondecreasing as lambda decreases
inline TheoremReport verify_prox_lemmas(const ConvexFunctional& f, const Point& x, const std::vector<double>& lambdas,
                                        const ProxParams& p = {}, const SlopeBudget& budget = {},
                                        double tol_slope = kSlopeTol) {
  if (lambdas.empty()) throw UsageError("verify_prox_lemmas needs a nonempty lambda grid");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0)) throw UsageError("lambdas must be > 0");
    if (i && !(lambdas[i] < lambdas[i - 1])) throw UsageError("lambdas must be sorted descending");
  }
  TheoremReport rep;
  rep.theorem_id = "prox_lemmas";

  std::vector<ProxResult> res;
  bool all_converged = true;
  for (double lam : lambdas) {
    ProxParams q = p;
    q.lambda = lam;
    res.push_back(prox(f, x, q));
    all_converged &= res.back().converged;
  }
  const double fx = f.raw(x);
  const double slope_x = slope(f, x, budget).value;

  Series env{"envelope", "lambda", "f_lambda(x)", {}};
  Series path{"resolvent_path", "lambda", "d(J_lambda x, x)", {}};
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    env.data.emplace_back(lambdas[i], res[i].envelope.value());
    path.data.emplace_back(lambdas[i], distance(res[i].minimizer, x));
  }

  // ubound
  {
    Verdict v = Verdict::consistent();
    double worst = 0.0;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
      const auto& r = res[i];
      const double lhs = slope(f, r.minimizer, budget).value;
      const double rhs = distance(r.minimizer, x) / lambdas[i];
      const double excess = lhs - rhs;
      worst = std::max(worst, excess);
      if (excess > tol_slope && !v.is_violated()) {
        Witness w{r.minimizer.to_string(), lambdas[i], -1, excess, "slope=" + format_real(lhs) + " bound=" + format_real(rhs)};
        v = Verdict::violated(w, "slope at the resolvent exceeds d(J x, x)/lambda");
      }
    }
    if (!v.is_violated() && !all_converged) v = Verdict::inconclusive("prox solver did not certify");
    if (v.ok()) v.residual = std::max(0.0, worst);
    rep.add("ubound", Role::conclusion, v);
  }

  // id2
  {
    Verdict v = Verdict::consistent(0.0);
    if (!std::isfinite(fx)) {
      v.reason = "f(x) = +inf: not applicable";
    } else if (!std::isfinite(slope_x)) {
      v.reason = "slope at x is +inf: bound is vacuous";
    } else {
      double worst = 0.0;
      for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const double lhs = (fx - res[i].envelope.value()) / lambdas[i];
        const double rhs = 0.5 * slope_x * slope_x;
        const double excess = lhs - rhs;
        worst = std::max(worst, excess);
        if (excess > tol_slope && !v.is_violated()) {
          Witness w{x.to_string(), lambdas[i], -1, excess, "lhs=" + format_real(lhs) + " rhs=" + format_real(rhs)};
          v = Verdict::violated(w, "(f - f_lambda)/lambda exceeds |df|^2/2");
        }
        if (!v.is_violated() && !res[i].converged) v = Verdict::inconclusive("prox solver did not certify");
      }
      if (v.ok()) {
        v.residual = std::max(0.0, worst);
        v.set_metric("equality_gap", 0.5 * slope_x * slope_x - (fx - res.front().envelope.value()) / lambdas.front());
      }
    }
    rep.add("id2", Role::conclusion, v);
  }

  // id1
  {
    const double lam_min = lambdas.back();
    const auto target = f.domain_projection(x);
    Verdict v;
    if (!target) {
      v = Verdict::inconclusive("nearest domain point not directly computable");
    } else {
      const double s = slope(f, *target, budget).value;
      const double tol = 1e-3 + (std::isfinite(s) ? 2.0 * lam_min * s : 0.0);
      const double gap = distance(res.back().minimizer, *target);
      double jump = 0.0;
      for (std::size_t i = 1; i < res.size(); ++i) jump = std::max(jump, distance(res[i].minimizer, res[i - 1].minimizer));
      if (gap > tol) {
        Witness w{res.back().minimizer.to_string(), lam_min, -1, gap, "nearest domain point " + target->to_string()};
        v = Verdict::violated(w, "resolvent does not approach the nearest domain point");
      } else if (!res.back().converged) {
        v = Verdict::inconclusive("prox solver did not certify");
      } else {
        v = Verdict::consistent(gap);
      }
      v.set_metric("tolerance", tol);
      v.set_metric("max_step_between_lambdas", jump);
    }
    v.series.push_back(path);
    rep.add("id1", Role::conclusion, v);
  }

  // envelope_monotone
  {
    Verdict v = Verdict::consistent(0.0);
    double worst = 0.0;
    for (std::size_t i = 1; i < res.size(); ++i) {
      const double drop = res[i - 1].envelope.value() - res[i].envelope.value();
      worst = std::max(worst, drop);
      if (drop > 10.0 * p.tol_min && !v.is_violated()) {
        Witness w{x.to_string(), lambdas[i], -1, drop, "envelope decreased as lambda decreased"};
        v = Verdict::violated(w, "f_lambda(x) not nondecreasing as lambda decreases");
      }
    }
    for (const auto& r : res) worst = std::max(worst, r.envelope.value() - fx);
    if (!v.is_violated() && std::isfinite(fx) && res.back().envelope.value() > fx + 10.0 * p.tol_min) {
      Witness w{x.to_string(), lambdas.back(), -1, res.back().envelope.value() - fx, "envelope above f(x)"};
      v = Verdict::violated(w, "f_lambda(x) exceeds f(x)");
    }
    if (v.ok()) {
      if (!all_converged) v = Verdict::inconclusive("prox solver did not certify");
      else v.residual = std::max(0.0, worst);
      if (std::isfinite(fx)) v.set_metric("limit_gap", fx - res.back().envelope.value());
    }
    v.series.push_back(env);
    rep.add("envelope_monotone", Role::conclusion, v);
  }

  for (const auto& c : rep.checks) rep.implications.push_back({c.name, {}, {c.name}});
  settle(rep);
  return rep;
}

}  // namespace hadamard

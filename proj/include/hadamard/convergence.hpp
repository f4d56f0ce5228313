#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hadamard/errors.hpp"
#include "hadamard/functional.hpp"
#include "hadamard/metric_checks.hpp"
#include "hadamard/prox.hpp"
#include "hadamard/slope.hpp"
#include "hadamard/tail.hpp"
#include "hadamard/verdict.hpp"

namespace hadamard {

enum class Mode { pointwise, envelope, prox, gamma, mosco };

inline std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::pointwise: return "pointwise";
    case Mode::envelope: return "envelope";
    case Mode::prox: return "prox";
    case Mode::gamma: return "gamma";
    case Mode::mosco: return "mosco";
  }
  return "?";
}

inline Mode parse_mode(std::string_view s) {
  for (Mode m : {Mode::pointwise, Mode::envelope, Mode::prox, Mode::gamma, Mode::mosco})
    if (to_string(m) == s) return m;
  throw UsageError("unknown mode '" + std::string(s) + "' (pointwise, envelope, prox, gamma, mosco)");
}

struct ModeSpec {
  Mode mode = Mode::pointwise;
  std::vector<Point> points;
  std::vector<double> lambdas{1.0, 0.5, 0.1, 0.01};
  TailWindow tail;
  ProxParams prox;
  SlopeBudget slope;

  void validate() const {
    if (points.empty()) throw UsageError("mode spec needs at least one test point");
    if (lambdas.empty()) throw UsageError("mode spec needs at least one lambda");
    for (double l : lambdas)
      if (!(l > 0.0)) throw UsageError("lambdas must be > 0");
    tail.validate();
  }
};

/// A bounded sequence x_n meant to converge weakly to `limit`; admitted
/// only after weak_limit_test passes on `bundle`.
struct WeakProbe {
  std::string name;
  Point limit;
  std::function<Point(int)> at;
  std::vector<GeodesicSegment> bundle;
};

enum class Recovery { prox_path, constant };

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// |a - b| on (-inf, +inf], with inf - inf read as agreement.
inline double gap(double a, double b) {
  if (a == kInf && b == kInf) return 0.0;
  if (a == kInf || b == kInf) return kInf;
  return std::abs(a - b);
}

struct TailAssessment {
  double residual = 0.0;
  int worst_n = -1;
};

inline TailAssessment assess(const std::vector<int>& ns, const std::vector<double>& v, int split) {
  TailAssessment a;
  a.residual = tail_residual(ns, v, split);
  double worst = -kInf;
  for (std::size_t i = 0; i < ns.size(); ++i)
    if (ns[i] >= split && v[i] > worst) worst = v[i], a.worst_n = ns[i];
  return a;
}

inline std::string point_list(const std::vector<Point>& pts) {
  std::string s;
  for (const auto& p : pts) s += (s.empty() ? "" : " ") + p.to_string();
  return s;
}

}  // namespace detail

/// Shared evaluation context for one (sequence, limit, spec) triple. Prox
/// solves and sequence members are computed once and reused by every check
/// that needs them.
class ConvergenceLab {
 public:
  ConvergenceLab(FunctionSequence seq, ConvexFunctional f, ModeSpec spec)
      : seq_(std::move(seq)), f_(std::move(f)), spec_(std::move(spec)) {
    spec_.validate();
    if (!(seq_.space() == f_.space())) throw UsageError("sequence and limit live in different spaces");
    for (const auto& x : spec_.points)
      if (!(x.space() == f_.space())) throw UsageError("test point in the wrong space: " + x.to_string());
    ns_ = spec_.tail.indices();
    split_ = spec_.tail.split();
  }

  const FunctionSequence& sequence() const { return seq_; }
  const ConvexFunctional& limit() const { return f_; }
  const ModeSpec& spec() const { return spec_; }
  const std::vector<int>& indices() const { return ns_; }
  int split() const { return split_; }

  const ConvexFunctional& member(int n) {
    auto it = members_.find(n);
    if (it == members_.end()) it = members_.emplace(n, seq_(n)).first;
    return it->second;
  }

  ProxParams params(double lambda) const {
    ProxParams p = spec_.prox;
    p.lambda = lambda;
    return p;
  }

  /// J_lambda x for the limit, indexed [point][lambda].
  const ProxResult& limit_prox(std::size_t xi, std::size_t li) {
    if (limit_prox_.empty()) {
      for (const auto& x : spec_.points) {
        limit_prox_.emplace_back();
        for (double l : spec_.lambdas) limit_prox_.back().push_back(prox(f_, x, params(l)));
      }
    }
    return limit_prox_[xi][li];
  }

  /// J^n_lambda x, indexed by n then [point][lambda].
  const ProxResult& member_prox(int n, std::size_t xi, std::size_t li) {
    auto it = member_prox_.find(n);
    if (it == member_prox_.end()) {
      std::vector<std::vector<ProxResult>> grid;
      const auto& fn = member(n);
      for (const auto& x : spec_.points) {
        grid.emplace_back();
        for (double l : spec_.lambdas) grid.back().push_back(prox(fn, x, params(l)));
      }
      it = member_prox_.emplace(n, std::move(grid)).first;
    }
    return it->second[xi][li];
  }

  Verdict limit_check(Mode mode) {
    if (mode == Mode::mosco) return mosco({}, Recovery::prox_path, false);
    if (mode == Mode::gamma) return gamma();
    auto it = mode_cache_.find(mode);
    if (it != mode_cache_.end()) return it->second;
    Verdict v = compute_limit(mode);
    mode_cache_.emplace(mode, v);
    return v;
  }

  /// Mosco conditions: (ii) a recovery sequence y_n -> x with
  /// limsup f^n(y_n) <= f(x); (i) liminf f^n(x_n) >= f(x) along strong
  /// probes and any admitted weak probes.
  Verdict mosco(const std::vector<WeakProbe>& weak, Recovery recovery, bool strong_only) {
    const bool cacheable = weak.empty() && recovery == Recovery::prox_path;
    if (cacheable) {
      auto& slot = strong_only ? gamma_cache_ : mosco_cache_;
      if (slot) return *slot;
    }
    Verdict v = compute_mosco(weak, recovery, strong_only);
    if (cacheable) (strong_only ? gamma_cache_ : mosco_cache_) = v;
    return v;
  }
  Verdict gamma() { return mosco({}, Recovery::prox_path, true); }

 private:
  Verdict compute_limit(Mode mode) {
    const auto& pts = spec_.points;
    const std::size_t nl = mode == Mode::pointwise ? 1 : spec_.lambdas.size();
    double worst = 0.0, oscillation = 0.0;
    std::optional<Witness> witness;
    bool solver_failed = false;
    std::vector<Series> series;
    for (std::size_t xi = 0; xi < pts.size(); ++xi) {
      for (std::size_t li = 0; li < nl; ++li) {
        std::vector<double> resid, raw;
        double ref = 0.0;
        if (mode == Mode::pointwise) {
          ref = f_.raw(pts[xi]);
        } else {
          const auto& lim = limit_prox(xi, li);
          solver_failed |= !lim.converged;
          ref = lim.envelope.value();
        }
        for (int n : ns_) {
          if (mode == Mode::pointwise) {
            const double v = member(n).raw(pts[xi]);
            raw.push_back(v);
            resid.push_back(detail::gap(v, ref));
          } else {
            const auto& r = member_prox(n, xi, li);
            solver_failed |= !r.converged;
            if (mode == Mode::envelope) {
              raw.push_back(r.envelope.value());
              resid.push_back(std::abs(r.envelope.value() - ref));
            } else {
              const double d = distance(r.minimizer, limit_prox(xi, li).minimizer);
              raw.push_back(d);
              resid.push_back(d);
            }
          }
        }
        std::vector<double> finite;
        for (double r : raw)
          if (std::isfinite(r)) finite.push_back(r);
        oscillation = std::max(oscillation, tail_oscillation(finite));
        const auto a = detail::assess(ns_, resid, split_);
        Series s{std::string(to_string(mode)) + " x=" + pts[xi].to_string() +
                     (mode == Mode::pointwise ? "" : " lambda=" + format_real(spec_.lambdas[li])),
                 "n", "residual", {}};
        for (std::size_t i = 0; i < ns_.size(); ++i) s.data.emplace_back(ns_[i], resid[i]);
        series.push_back(std::move(s));
        if (!witness || a.residual > worst) {
          worst = a.residual;
          Witness w{pts[xi].to_string(), mode == Mode::pointwise ? std::nan("") : spec_.lambdas[li],
                    a.worst_n, a.residual, std::string(to_string(mode)) + " residual tail estimate"};
          witness = w;
        }
      }
    }
    Verdict v;
    if (worst > spec_.tail.tol) {
      v = Verdict::violated(*witness, std::string(to_string(mode)) + " limit not reached within tol_seq");
    } else if (solver_failed) {
      v = Verdict::inconclusive("prox solver did not certify every solve");
      v.residual = worst;
    } else {
      v = Verdict::consistent(worst);
    }
    v.set_metric("tail_oscillation", oscillation);
    v.series = std::move(series);
    return v;
  }

  Verdict compute_mosco(const std::vector<WeakProbe>& weak, Recovery recovery, bool strong_only) {
    const double tol = spec_.tail.tol;
    std::optional<Witness> w_i, w_ii;
    double res_i = 0.0, res_ii = 0.0;
    std::string notes;
    bool solver_failed = false;

    auto condition_i = [&](const std::string& probe, const Point& x, const std::function<Point(int)>& xn) {
      const double fx = f_.raw(x);
      std::vector<double> deficit;
      for (int n : ns_) {
        const double v = member(n).raw(xn(n));
        deficit.push_back(v == detail::kInf ? -detail::kInf : (fx == detail::kInf ? detail::kInf : fx - v));
      }
      const auto a = detail::assess(ns_, deficit, split_);
      if (!w_i || a.residual > res_i) {
        res_i = a.residual;
        w_i = Witness{x.to_string(), std::nan(""), a.worst_n, a.residual, "probe " + probe};
      }
    };

    for (const auto& x : spec_.points) {
      // (ii) recovery sequence
      const double fx = f_.raw(x);
      if (std::isfinite(fx)) {
        double best = detail::kInf;
        int best_n = -1;
        std::string used;
        auto attempt = [&](const std::string& name, const std::function<Point(int)>& yn) {
          std::vector<double> dist, excess;
          for (int n : ns_) {
            const Point y = yn(n);
            dist.push_back(distance(y, x));
            const double v = member(n).raw(y);
            excess.push_back(v == detail::kInf ? detail::kInf : v - fx);
          }
          const auto a = detail::assess(ns_, dist, split_);
          const auto b = detail::assess(ns_, excess, split_);
          const double r = std::max(a.residual, b.residual);
          if (r < best) best = r, best_n = a.residual >= b.residual ? a.worst_n : b.worst_n, used = name;
        };
        if (recovery == Recovery::prox_path) {
          attempt("prox path lambda_n=1/n", [&](int n) {
            ProxParams p = params(1.0 / n);
            const auto r = prox(member(n), x, p);
            solver_failed |= !r.converged;
            return r.minimizer;
          });
        }
        if (best > tol) attempt("constant", [&](int) { return x; });
        if (!w_ii || best > res_ii) {
          res_ii = best;
          w_ii = Witness{x.to_string(), std::nan(""), best_n, best, "best recovery attempt: " + used};
        }
      }

      // (i) strong probes
      condition_i("constant", x, [&](int) { return x; });
      const auto dirs = neighbors(x, 1.0);
      for (std::size_t k = 0; k < dirs.size(); ++k) {
        const Point& nb = dirs[k];
        condition_i("step 1/n toward " + nb.to_string(), x,
                    [&](int n) { return step_toward(x, nb, 1.0 / n); });
        condition_i("alternating step 1/n toward " + nb.to_string(), x,
                    [&](int n) { return n % 2 == 0 ? step_toward(x, nb, 1.0 / n) : x; });
      }
    }

    if (!strong_only) {
      for (const auto& probe : weak) {
        std::vector<Point> xs;
        for (int n = 1; n <= spec_.tail.n_max; ++n) xs.push_back(probe.at(n));
        const auto admit = weak_limit_test(xs, probe.limit, probe.bundle, spec_.tail);
        if (!admit.ok()) {
          notes += (notes.empty() ? "" : "; ") + std::string("weak probe '") + probe.name + "' rejected by weak_limit_test";
          continue;
        }
        condition_i("weak " + probe.name, probe.limit, [&](int n) { return xs[static_cast<std::size_t>(n - 1)]; });
      }
      if (weak.empty() && f_.space().kind() == SpaceKind::euclidean)
        notes += (notes.empty() ? "" : "; ") +
                 std::string("finite dimension: weak and strong convergence coincide, strong probes cover (i)");
    }

    const std::string caveat = "condition (i) checked on a finite probe family: necessary condition only";
    Verdict v;
    if (res_ii > tol) {
      v = Verdict::violated(*w_ii, "condition (ii): no recovery sequence found; " + caveat);
    } else if (res_i > tol) {
      v = Verdict::violated(*w_i, "condition (i): liminf inequality fails along a probe; " + caveat);
    } else if (solver_failed) {
      v = Verdict::inconclusive("prox solver did not certify a recovery point");
      v.residual = std::max(res_i, res_ii);
    } else {
      v = Verdict::consistent(std::max(res_i, res_ii), caveat);
    }
    if (!notes.empty()) v.reason += (v.reason.empty() ? "" : "; ") + notes;
    v.set_metric("condition_i_residual", res_i);
    v.set_metric("condition_ii_residual", res_ii);
    return v;
  }

  FunctionSequence seq_;
  ConvexFunctional f_;
  ModeSpec spec_;
  std::vector<int> ns_;
  int split_ = 0;
  std::map<int, ConvexFunctional> members_;
  std::vector<std::vector<ProxResult>> limit_prox_;
  std::map<int, std::vector<std::vector<ProxResult>>> member_prox_;
  std::map<Mode, Verdict> mode_cache_;
  std::optional<Verdict> mosco_cache_, gamma_cache_;
};

/// Tail convergence of f^n(x), f^n_lambda(x) or J^n_lambda x to the limit
/// over the ModeSpec grid.
inline Verdict limit_mode_check(const FunctionSequence& seq, const ConvexFunctional& f, const ModeSpec& spec) {
  if (spec.mode != Mode::pointwise && spec.mode != Mode::envelope && spec.mode != Mode::prox)
    throw UsageError("limit_mode_check: mode must be pointwise, envelope or prox");
  ConvergenceLab lab(seq, f, spec);
  return lab.limit_check(spec.mode);
}

inline Verdict mosco_check(const FunctionSequence& seq, const ConvexFunctional& f, const ModeSpec& spec,
                           const std::vector<WeakProbe>& weak = {}, Recovery recovery = Recovery::prox_path) {
  ConvergenceLab lab(seq, f, spec);
  return lab.mosco(weak, recovery, false);
}

/// Mosco condition (i) restricted to strongly convergent probes, plus (ii).
inline Verdict gamma_check(const FunctionSequence& seq, const ConvexFunctional& f, const ModeSpec& spec) {
  ConvergenceLab lab(seq, f, spec);
  return lab.gamma();
}

}  // namespace hadamard

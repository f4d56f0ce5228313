#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hadamard/errors.hpp"
#include "hadamard/extended_real.hpp"
#include "hadamard/region.hpp"
#include "hadamard/space.hpp"

namespace hadamard {

/// Where to look for points of dom f: a center and a radius around it.
struct DomainHint {
  Point center;
  double radius;
};

inline constexpr double kDefaultHintRadius = 4.0;

/// An extended-real-valued functional f: H -> (-inf, +inf] on one space.
///
/// Built from a small library of convex pieces (distance and squared
/// distance to an anchor, indicators, linear maps on euclidean spaces,
/// positive combinations and maxima) or wrapped around an arbitrary
/// evaluator. Immutable and cheap to copy.
class ConvexFunctional {
 public:
  using Evaluator = std::function<double(const Point&)>;
  using AnchorFn = std::function<std::vector<Point>(const Point&)>;
  enum class Kind { zero, constant, linear, dist, dist_sq, indicator, sum, max, custom };

  static ConvexFunctional zero(const Space& s) { return ConvexFunctional(make(Kind::zero, s)); }

  static ConvexFunctional constant(const Space& s, double c) {
    auto n = make(Kind::constant, s);
    if (!std::isfinite(c)) throw UsageError("constant functional needs a finite value");
    n->c = c;
    return ConvexFunctional(std::move(n));
  }

  /// x -> offset + <slope, x>, euclidean spaces only.
  static ConvexFunctional linear(const Space& s, std::vector<double> slope, double offset = 0.0) {
    if (s.kind() != SpaceKind::euclidean) throw UsageError("linear functionals need a euclidean space");
    if (slope.size() != s.coord_count()) throw UsageError("linear functional slope has wrong length");
    auto n = make(Kind::linear, s);
    n->slope = std::move(slope);
    n->c = offset;
    return ConvexFunctional(std::move(n));
  }

  /// weight * d(., anchor)
  static ConvexFunctional dist(Point anchor, double weight = 1.0) {
    if (!(weight > 0.0)) throw UsageError("dist weight must be > 0");
    auto n = make(Kind::dist, anchor.space());
    n->anchor = std::move(anchor);
    n->weight = weight;
    return ConvexFunctional(std::move(n));
  }

  /// weight * d(., anchor)^2 / 2
  static ConvexFunctional dist_sq(Point anchor, double weight = 1.0) {
    if (!(weight > 0.0)) throw UsageError("dist_sq weight must be > 0");
    auto n = make(Kind::dist_sq, anchor.space());
    n->anchor = std::move(anchor);
    n->weight = weight;
    return ConvexFunctional(std::move(n));
  }

  static ConvexFunctional indicator(Region region) {
    if (region.empty()) throw PropernessError("indicator of an empty region is not proper");
    auto n = make(Kind::indicator, region.space());
    n->region = std::move(region);
    return ConvexFunctional(std::move(n));
  }

  /// sum_i w_i f_i with w_i > 0.
  static ConvexFunctional sum(std::vector<std::pair<double, ConvexFunctional>> terms) {
    if (terms.empty()) throw UsageError("sum needs at least one term");
    auto n = make(Kind::sum, terms.front().second.space());
    for (const auto& [w, f] : terms) {
      if (!(w > 0.0)) throw UsageError("sum weights must be > 0");
      if (!(f.space() == n->space)) throw UsageError("sum terms live in different spaces");
    }
    n->terms = std::move(terms);
    return ConvexFunctional(std::move(n));
  }

  static ConvexFunctional max(std::vector<ConvexFunctional> terms) {
    if (terms.empty()) throw UsageError("max needs at least one term");
    auto n = make(Kind::max, terms.front().space());
    for (auto& f : terms) {
      if (!(f.space() == n->space)) throw UsageError("max terms live in different spaces");
      n->terms.emplace_back(1.0, std::move(f));
    }
    return ConvexFunctional(std::move(n));
  }

  /// Arbitrary evaluator; convexity is the caller's claim (audit it with
  /// convexity_check).
  static ConvexFunctional custom(const Space& s, Evaluator eval, DomainHint hint, std::string label,
                                 AnchorFn anchors = {}) {
    auto n = make(Kind::custom, s);
    n->eval = std::move(eval);
    n->hint = std::move(hint);
    n->label = std::move(label);
    n->anchor_fn = std::move(anchors);
    return ConvexFunctional(std::move(n));
  }

  Kind kind() const { return node_->kind; }
  const Space& space() const { return node_->space; }

  ExtendedReal operator()(const Point& x) const {
    if (!(x.space() == node_->space))
      throw UsageError("evaluate: point in " + x.space().tag() + " but functional on " + node_->space.tag());
    return ExtendedReal(raw(x));
  }

  /// Unchecked evaluation (+inf allowed); the point must live in space().
  double raw(const Point& x) const {
    const Node& n = *node_;
    switch (n.kind) {
      case Kind::zero: return 0.0;
      case Kind::constant: return n.c;
      case Kind::linear: {
        double acc = n.c;
        for (std::size_t i = 0; i < n.slope.size(); ++i) acc += n.slope[i] * x[i];
        return acc;
      }
      case Kind::dist: return n.weight * distance(x, *n.anchor);
      case Kind::dist_sq: {
        const double d = distance(x, *n.anchor);
        return 0.5 * n.weight * d * d;
      }
      case Kind::indicator: return n.region->contains(x) ? 0.0 : std::numeric_limits<double>::infinity();
      case Kind::sum: {
        double acc = 0.0;
        for (const auto& [w, f] : n.terms) {
          const double v = f.raw(x);
          if (v == std::numeric_limits<double>::infinity()) return v;
          acc += w * v;
        }
        return acc;
      }
      case Kind::max: {
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& [w, f] : n.terms) best = std::max(best, f.raw(x));
        return best;
      }
      case Kind::custom: {
        const double v = n.eval(x);
        if (std::isnan(v) || v == -std::numeric_limits<double>::infinity())
          throw UsageError("functional '" + n.label + "' returned a value outside (-inf, +inf]");
        return v;
      }
    }
    return 0.0;
  }

  DomainHint domain_hint() const {
    const Node& n = *node_;
    switch (n.kind) {
      case Kind::zero:
      case Kind::constant:
      case Kind::linear: return {reference_point(n.space), kDefaultHintRadius};
      case Kind::dist:
      case Kind::dist_sq: return {*n.anchor, kDefaultHintRadius};
      case Kind::indicator: return {n.region->center(), n.region->bounding_radius()};
      case Kind::custom: return *n.hint;
      case Kind::sum:
      case Kind::max: {
        // Prefer the tightest indicator: dom f lies inside it.
        std::optional<DomainHint> tight;
        for (const auto& [w, f] : n.terms) {
          if (f.kind() != Kind::indicator) continue;
          auto h = f.domain_hint();
          if (!tight || h.radius < tight->radius) tight = h;
        }
        if (tight) return *tight;
        DomainHint h = n.terms.front().second.domain_hint();
        double r = h.radius;
        for (const auto& [w, f] : n.terms) {
          const auto t = f.domain_hint();
          r = std::max(r, t.radius + distance(h.center, t.center));
        }
        return {h.center, r};
      }
    }
    return {reference_point(n.space), kDefaultHintRadius};
  }

  /// Points where the functional has structure relative to x: anchors of
  /// distance terms, projections onto and corners of indicator regions.
  std::vector<Point> anchors(const Point& x) const {
    std::vector<Point> out;
    collect_anchors(x, out);
    return out;
  }

  /// Nearest point of cl dom f when dom f is the whole space (returns x) or
  /// a single region; nullopt when it cannot be computed directly.
  std::optional<Point> domain_projection(const Point& x) const {
    std::vector<const Region*> regions;
    if (!collect_regions(regions)) return std::nullopt;
    if (regions.empty()) return x;
    for (const auto* r : regions)
      if (!(*r == *regions.front())) return std::nullopt;
    return regions.front()->project(x);
  }

  /// Structured-text descriptor ("f=dist,anchor=(0),weight=1", ...).
  std::string descriptor() const {
    const Node& n = *node_;
    switch (n.kind) {
      case Kind::zero: return "f=zero";
      case Kind::constant: return "f=const,value=" + format_real(n.c);
      case Kind::linear: {
        std::string s = "f=linear,slope=(";
        for (std::size_t i = 0; i < n.slope.size(); ++i) {
          if (i) s += ',';
          s += format_real(n.slope[i]);
        }
        return s + "),offset=" + format_real(n.c);
      }
      case Kind::dist: return "f=dist,anchor=" + format_coords(*n.anchor) + ",weight=" + format_real(n.weight);
      case Kind::dist_sq:
        return "f=dist_sq,anchor=" + format_coords(*n.anchor) + ",weight=" + format_real(n.weight);
      case Kind::indicator: return "f=indicator,region=[" + n.region->descriptor() + "]";
      case Kind::sum:
      case Kind::max: {
        std::string terms, weights;
        for (std::size_t i = 0; i < n.terms.size(); ++i) {
          if (i) terms += ';', weights += ',';
          terms += n.terms[i].second.descriptor();
          weights += format_real(n.terms[i].first);
        }
        if (n.kind == Kind::max) return "f=max,terms=[" + terms + "]";
        return "f=sum,terms=[" + terms + "],weights=(" + weights + ")";
      }
      case Kind::custom: return "f=custom,label=" + n.label;
    }
    return {};
  }

  std::string label() const { return node_->kind == Kind::custom ? node_->label : descriptor(); }

  const std::vector<std::pair<double, ConvexFunctional>>& terms() const { return node_->terms; }
  const std::optional<Region>& region() const { return node_->region; }
  const std::optional<Point>& anchor() const { return node_->anchor; }
  double weight() const { return node_->weight; }
  const std::vector<double>& linear_slope() const { return node_->slope; }

 private:
  struct Node {
    Node(Kind k, Space s) : kind(k), space(std::move(s)) {}
    Kind kind;
    Space space;
    double c = 0.0;
    double weight = 1.0;
    std::vector<double> slope;
    std::optional<Point> anchor;
    std::optional<Region> region;
    std::vector<std::pair<double, ConvexFunctional>> terms;
    Evaluator eval;
    AnchorFn anchor_fn;
    std::optional<DomainHint> hint;
    std::string label;
  };

  static std::shared_ptr<Node> make(Kind k, const Space& s) {
    return std::make_shared<Node>(k, s);
  }
  explicit ConvexFunctional(std::shared_ptr<Node> n) : node_(std::move(n)) {}

  void collect_anchors(const Point& x, std::vector<Point>& out) const {
    const Node& n = *node_;
    switch (n.kind) {
      case Kind::dist:
      case Kind::dist_sq: out.push_back(*n.anchor); break;
      case Kind::indicator: {
        out.push_back(n.region->project(x));
        for (auto& p : n.region->extreme_points()) out.push_back(std::move(p));
        break;
      }
      case Kind::sum:
      case Kind::max:
        for (const auto& [w, f] : n.terms) f.collect_anchors(x, out);
        break;
      case Kind::custom:
        if (n.anchor_fn)
          for (auto& p : n.anchor_fn(x)) out.push_back(std::move(p));
        break;
      default: break;
    }
  }

  bool collect_regions(std::vector<const Region*>& out) const {
    const Node& n = *node_;
    switch (n.kind) {
      case Kind::indicator: out.push_back(&*n.region); return true;
      case Kind::sum:
      case Kind::max:
        for (const auto& [w, f] : n.terms)
          if (!f.collect_regions(out)) return false;
        return true;
      case Kind::custom: return false;
      default: return true;
    }
  }

  std::shared_ptr<const Node> node_;
};

inline ExtendedReal evaluate(const ConvexFunctional& f, const Point& x) { return f(x); }

/// Indicator of a region: 0 inside, +inf outside.
inline ConvexFunctional indicator_of_set(const Region& region) { return ConvexFunctional::indicator(region); }

/// Sampled properness probe: some point near the domain hint has a finite
/// value.
inline std::optional<Point> find_finite_point(const ConvexFunctional& f, int samples = 256, std::uint64_t seed = 0) {
  const auto hint = f.domain_hint();
  if (std::isfinite(f.raw(hint.center))) return hint.center;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < samples; ++i) {
    Point y = sample_ball(hint.center, hint.radius, rng);
    if (std::isfinite(f.raw(y))) return y;
  }
  return std::nullopt;
}

/// An indexed family (f^n)_{n >= 1}.
class FunctionSequence {
 public:
  using Rule = std::function<ConvexFunctional(int)>;

  FunctionSequence(Space space, Rule rule, std::string label)
      : space_(std::move(space)), rule_(std::move(rule)), label_(std::move(label)) {}

  ConvexFunctional operator()(int n) const {
    if (n < 1) throw UsageError("sequence index must be >= 1");
    ConvexFunctional f = rule_(n);
    if (!(f.space() == space_)) throw UsageError("sequence member lives in the wrong space");
    return f;
  }
  ConvexFunctional at(int n) const { return (*this)(n); }

  const Space& space() const { return space_; }
  const std::string& label() const { return label_; }

  static FunctionSequence constant(const ConvexFunctional& f) {
    return FunctionSequence(f.space(), [f](int) { return f; }, "constant(" + f.label() + ")");
  }

  /// n -> alpha a^n + beta b^n.
  static FunctionSequence combination(const FunctionSequence& a, double alpha, const FunctionSequence& b,
                                      double beta) {
    if (!(a.space() == b.space())) throw UsageError("combined sequences live in different spaces");
    return FunctionSequence(
        a.space(), [a, b, alpha, beta](int n) { return ConvexFunctional::sum({{alpha, a(n)}, {beta, b(n)}}); },
        format_real(alpha) + "*" + a.label() + "+" + format_real(beta) + "*" + b.label());
  }

 private:
  Space space_;
  Rule rule_;
  std::string label_;
};

}  // namespace hadamard

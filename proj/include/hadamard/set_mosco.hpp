#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hadamard/convergence.hpp"
#include "hadamard/families.hpp"
#include "hadamard/region.hpp"

namespace hadamard {

struct RegionSequence {
  Space space;
  std::function<Region(int)> at;
  std::string label;

  Region operator()(int n) const {
    if (n < 1) throw UsageError("sequence index must be >= 1");
    Region r = at(n);
    if (!(r.space() == space)) throw UsageError("region sequence member lives in the wrong space");
    return r;
  }
};

enum class Monotonicity { constant, nonincreasing, nondecreasing, none };

inline std::string_view to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::constant: return "constant";
    case Monotonicity::nonincreasing: return "nonincreasing";
    case Monotonicity::nondecreasing: return "nondecreasing";
    case Monotonicity::none: return "none";
  }
  return "?";
}

namespace detail {

/// Boundary and interior sample points of a region.
inline std::vector<Point> region_samples(const Region& r, int count, std::uint64_t seed) {
  std::vector<Point> out = r.extreme_points();
  const Point c = r.center();
  out.push_back(c);
  std::mt19937_64 rng(seed);
  const double rad = std::max(r.bounding_radius(), 1e-3);
  for (int i = 0; i < count; ++i) out.push_back(r.project(sample_ball(c, 3.0 * rad, rng)));
  return out;
}

/// Sampled inclusion test A subset of B.
inline bool region_subset(const Region& a, const Region& b, std::uint64_t seed = 0) {
  for (const auto& p : region_samples(a, 16, seed))
    if (!b.contains(p)) return false;
  return true;
}

/// Distance-like comparison of two regions through their parameters.
inline double region_gap(const Region& a, const Region& b) {
  if (a.kind() != b.kind() || !(a.space() == b.space())) return kInf;
  switch (a.kind()) {
    case Region::Kind::interval: {
      const auto& s = a.segment();
      const auto& t = b.segment();
      const double same = std::max(distance(s.start(), t.start()), distance(s.end(), t.end()));
      const double flip = std::max(distance(s.start(), t.end()), distance(s.end(), t.start()));
      return std::min(same, flip);
    }
    case Region::Kind::ball:
      return distance(a.ball_center(), b.ball_center()) + std::abs(a.ball_radius() - b.ball_radius());
    case Region::Kind::star: {
      double g = 0.0;
      for (std::size_t l = 0; l < a.caps().size(); ++l)
        g = std::max(g, std::abs(std::max(a.caps()[l], 0.0) - std::max(b.caps()[l], 0.0)));
      return g;
    }
    case Region::Kind::product: {
      double g = 0.0;
      for (std::size_t i = 0; i < a.factors().size(); ++i) g = std::max(g, region_gap(a.factors()[i], b.factors()[i]));
      return g;
    }
  }
  return kInf;
}

/// 2 b - a for points: coordinate extrapolation on euclidean spaces, b
/// elsewhere.
inline Point extrapolate_point(const Point& a, const Point& b) {
  if (b.space().kind() != SpaceKind::euclidean) return b;
  std::vector<double> c(b.coords().size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 2.0 * b[i] - a[i];
  return Point(b.space(), std::move(c));
}

/// First-order extrapolation of region parameters from members a (index
/// n/2) and b (index n); nullopt when the kinds differ.
inline std::optional<Region> extrapolate_region(const Region& a, const Region& b) {
  if (a.kind() != b.kind()) return std::nullopt;
  switch (b.kind()) {
    case Region::Kind::interval:
      return Region::interval(GeodesicSegment(extrapolate_point(a.segment().start(), b.segment().start()),
                                              extrapolate_point(a.segment().end(), b.segment().end())));
    case Region::Kind::ball:
      return Region::ball(extrapolate_point(a.ball_center(), b.ball_center()),
                          2.0 * b.ball_radius() - a.ball_radius());
    case Region::Kind::star: {
      std::vector<std::pair<int, double>> caps;
      for (std::size_t l = 0; l < b.caps().size(); ++l)
        if (b.caps()[l] >= 0.0)
          caps.emplace_back(static_cast<int>(l) + 1,
                            std::max(0.0, a.caps()[l] >= 0.0 ? 2.0 * b.caps()[l] - a.caps()[l] : b.caps()[l]));
      return Region::star(b.space(), caps);
    }
    case Region::Kind::product: {
      std::vector<Region> parts;
      for (std::size_t i = 0; i < b.factors().size(); ++i) {
        auto p = extrapolate_region(a.factors()[i], b.factors()[i]);
        if (!p) return std::nullopt;
        parts.push_back(*p);
      }
      return Region::product(b.space(), parts);
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Monotonicity of C_1, ..., C_{n_max} under sampled inclusion.
inline Monotonicity detect_monotone(const RegionSequence& seq, int n_max) {
  bool dec = true, inc = true;
  Region prev = seq(1);
  for (int n = 2; n <= n_max && (dec || inc); ++n) {
    Region cur = seq(n);
    if (dec && !detail::region_subset(cur, prev, static_cast<std::uint64_t>(n))) dec = false;
    if (inc && !detail::region_subset(prev, cur, static_cast<std::uint64_t>(n))) inc = false;
    prev = std::move(cur);
  }
  if (dec && inc) return Monotonicity::constant;
  if (dec) return Monotonicity::nonincreasing;
  if (inc) return Monotonicity::nondecreasing;
  return Monotonicity::none;
}

/// Mosco convergence of indicators of C_n to the indicator of C. For
/// monotone inputs the predicted limit (intersection or closure of union,
/// extrapolated from the tail) is compared with `limit` or used in its
/// place.
inline Verdict set_mosco_check(const RegionSequence& regions, const std::optional<Region>& limit, ModeSpec spec) {
  spec.tail.validate();
  const auto mono = detect_monotone(regions, spec.tail.n_max);
  if (mono == Monotonicity::none && !limit)
    throw UsageError("set_mosco_check: sequence is not monotone and no limit region was given");

  std::optional<Region> predicted;
  if (mono != Monotonicity::none) {
    const int n = spec.tail.n_max;
    predicted = detail::extrapolate_region(regions(std::max(1, n / 2)), regions(n));
  }
  const Region target = limit ? *limit : *predicted;
  if (target.empty()) throw PropernessError("set_mosco_check: limit region is empty");

  FunctionSequence seq(regions.space, [regions](int n) { return ConvexFunctional::indicator(regions(n)); },
                       "indicators(" + regions.label + ")");
  const ConvexFunctional f = ConvexFunctional::indicator(target);
  if (spec.points.empty()) {
    spec.points = detail::region_samples(target, 2, 0);
    spec.points.push_back(step_toward(target.center(), spec.points.front(), target.bounding_radius() + 1.0));
  }
  ConvergenceLab lab(seq, f, spec);
  Verdict mosco = lab.mosco({}, Recovery::prox_path, false);
  Verdict envelope = lab.limit_check(Mode::envelope);

  Verdict v = mosco;
  double prediction_gap = 0.0;
  if (predicted && limit) {
    prediction_gap = detail::region_gap(*predicted, *limit);
    if (prediction_gap > spec.tail.tol) {
      Witness w{predicted->descriptor(), std::nan(""), spec.tail.n_max, prediction_gap,
                "predicted " + std::string(to_string(mono)) + " limit differs from the given limit"};
      v = Verdict::violated(w, "predicted limit region disagrees with the given limit");
    }
  }
  if (!v.is_violated() && envelope.is_violated()) v = envelope;
  if (v.ok() && !envelope.ok()) v = envelope;
  if (v.ok()) v.residual = std::max({mosco.residual, envelope.residual, prediction_gap});
  v.set_metric("envelope_residual", envelope.residual);
  v.set_metric("mosco_residual", mosco.residual);
  v.set_metric("prediction_gap", prediction_gap);
  v.reason += (v.reason.empty() ? "" : "; ") + std::string("monotonicity: ") + std::string(to_string(mono));
  if (predicted) v.reason += "; predicted limit " + predicted->descriptor();
  v.series = envelope.series;
  return v;
}

namespace families {

/// Region sequences of the corpus with their limits: [0, 1 + 1/n] and
/// [0, 1 - 1/n], both tending to [0, 1].
struct RegionFamily {
  std::string name;
  RegionSequence seq;
  Region limit;
};

inline std::vector<std::string> region_names() { return {"intervals_shrinking", "intervals_growing"}; }

inline RegionFamily region_family(std::string_view name) {
  const Space E = Space::euclidean(1);
  if (name == "intervals_shrinking")
    return {"intervals_shrinking", {E, [](int n) { return interval(0.0, 1.0 + 1.0 / n); }, "intervals_shrinking"},
            interval(0.0, 1.0)};
  if (name == "intervals_growing")
    return {"intervals_growing", {E, [](int n) { return interval(0.0, 1.0 - 1.0 / n); }, "intervals_growing"},
            interval(0.0, 1.0)};
  throw UsageError("unknown region family '" + std::string(name) + "' (known: intervals_shrinking, intervals_growing)");
}

}  // namespace families

}  // namespace hadamard

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hadamard/errors.hpp"
#include "hadamard/functional.hpp"
#include "hadamard/region.hpp"

namespace hadamard {

/// A named sequence together with its expected limit.
struct Family {
  std::string name;
  FunctionSequence seq;
  ConvexFunctional limit;
};

namespace families {

inline Point origin(const Space& s) { return reference_point(s); }

/// Euclidean(1) point, the usual home of the corpus families.
inline Point e1(double v) { return euclidean_point({v}); }

/// f^n = |. - 1/n| -> |.|
inline Family shifted_abs() {
  const auto E = Space::euclidean(1);
  return {"shifted_abs",
          FunctionSequence(E, [](int n) { return ConvexFunctional::dist(e1(1.0 / n)); }, "shifted_abs"),
          ConvexFunctional::dist(e1(0.0))};
}

/// f^n = (1 + 1/n) |.| -> |.|
inline Family scaled_abs() {
  const auto E = Space::euclidean(1);
  return {"scaled_abs",
          FunctionSequence(E, [](int n) { return ConvexFunctional::dist(e1(0.0), 1.0 + 1.0 / n); }, "scaled_abs"),
          ConvexFunctional::dist(e1(0.0))};
}

/// f^n = 1 for even n, 0 for odd n; the candidate limit is 0.
inline Family oscillating() {
  const auto E = Space::euclidean(1);
  return {"oscillating",
          FunctionSequence(E, [E](int n) { return ConvexFunctional::constant(E, n % 2 == 0 ? 1.0 : 0.0); },
                           "oscillating"),
          ConvexFunctional::zero(E)};
}

inline Family constant(const ConvexFunctional& f) {
  return {"constant", FunctionSequence::constant(f), f};
}

/// f^n(x) = n x^2; no finite limit away from 0, so the limit slot holds
/// the indicator of {0}.
inline Family quadratic_growth() {
  const auto E = Space::euclidean(1);
  return {"quadratic_growth",
          FunctionSequence(E, [](int n) { return ConvexFunctional::dist_sq(e1(0.0), 2.0 * n); }, "quadratic_growth"),
          ConvexFunctional::indicator(Region::ball(e1(0.0), 0.0))};
}

inline Region interval(double a, double b) { return Region::interval(GeodesicSegment(e1(a), e1(b))); }

/// indicators of [0, 1 + 1/n] -> indicator of [0, 1]
inline Family intervals_shrinking() {
  const auto E = Space::euclidean(1);
  return {"intervals_shrinking",
          FunctionSequence(E, [](int n) { return ConvexFunctional::indicator(interval(0.0, 1.0 + 1.0 / n)); },
                           "intervals_shrinking"),
          ConvexFunctional::indicator(interval(0.0, 1.0))};
}

/// indicators of [0, 1 - 1/n] -> indicator of [0, 1]
inline Family intervals_growing() {
  const auto E = Space::euclidean(1);
  return {"intervals_growing",
          FunctionSequence(E, [](int n) { return ConvexFunctional::indicator(interval(0.0, 1.0 - 1.0 / n)); },
                           "intervals_growing"),
          ConvexFunctional::indicator(interval(0.0, 1.0))};
}

inline std::vector<std::string> names() {
  return {"shifted_abs", "scaled_abs", "oscillating", "quadratic_growth", "intervals_shrinking", "intervals_growing"};
}

inline Family by_name(std::string_view name) {
  if (name == "shifted_abs") return shifted_abs();
  if (name == "scaled_abs") return scaled_abs();
  if (name == "oscillating") return oscillating();
  if (name == "quadratic_growth") return quadratic_growth();
  if (name == "intervals_shrinking") return intervals_shrinking();
  if (name == "intervals_growing") return intervals_growing();
  std::string all;
  for (const auto& n : names()) all += (all.empty() ? "" : ", ") + n;
  throw UsageError("unknown family '" + std::string(name) + "' (known: " + all + ")");
}

/// The grid used by the corpus checks on Euclidean(1).
inline std::vector<Point> default_grid() { return {e1(-2.0), e1(-1.0), e1(0.0), e1(0.5), e1(2.0)}; }

}  // namespace families
}  // namespace hadamard

#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hadamard/metric_checks.hpp"
#include "hadamard/space.hpp"

namespace hadamard {

inline std::string format_coords(const Point& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.coords().size(); ++i) {
    if (i) s += ',';
    s += format_real(p[i]);
  }
  return s + ")";
}

/// A closed convex subset of a model space, described structurally so that
/// membership and nearest-point projection are computable.
class Region {
 public:
  enum class Kind { interval, ball, star, product };

  /// The geodesic segment [from, to].
  static Region interval(GeodesicSegment seg) {
    Region r(Kind::interval, seg.space());
    r.segment_ = std::make_shared<GeodesicSegment>(std::move(seg));
    return r;
  }
  static Region ball(Point center, double radius) {
    Region r(Kind::ball, center.space());
    r.center_ = std::make_shared<Point>(std::move(center));
    r.radius_ = radius;
    return r;
  }
  /// Sub-star of a spider: the listed legs up to their radius caps, plus
  /// the origin.
  static Region star(const Space& spider, const std::vector<std::pair<int, double>>& caps) {
    if (spider.kind() != SpaceKind::spider) throw UsageError("star region needs a spider space");
    Region r(Kind::star, spider);
    r.caps_.assign(static_cast<std::size_t>(spider.legs()), -1.0);
    for (auto [leg, cap] : caps) {
      if (leg < 1 || leg > spider.legs()) throw UsageError("star region leg out of range");
      if (cap < 0) throw UsageError("star region caps must be >= 0");
      r.caps_[static_cast<std::size_t>(leg - 1)] = cap;
    }
    return r;
  }
  static Region product(const Space& space, std::vector<Region> factors) {
    if (space.kind() != SpaceKind::product || factors.size() != space.factors().size())
      throw UsageError("product region needs one region per factor");
    for (std::size_t i = 0; i < factors.size(); ++i)
      if (!(factors[i].space() == space.factors()[i])) throw UsageError("product region factor space mismatch");
    Region r(Kind::product, space);
    r.factors_ = std::move(factors);
    return r;
  }

  Kind kind() const { return kind_; }
  const Space& space() const { return space_; }
  const GeodesicSegment& segment() const { return *segment_; }
  const Point& ball_center() const { return *center_; }
  double ball_radius() const { return radius_; }
  /// Cap per leg (index leg-1); negative for legs outside the star.
  const std::vector<double>& caps() const { return caps_; }
  const std::vector<Region>& factors() const { return factors_; }

  bool empty() const {
    switch (kind_) {
      case Kind::ball: return radius_ < 0.0;
      case Kind::product:
        return std::any_of(factors_.begin(), factors_.end(), [](const Region& f) { return f.empty(); });
      default: return false;
    }
  }

  bool contains(const Point& x) const {
    if (!(x.space() == space_)) throw UsageError("Region::contains: point in a different space");
    switch (kind_) {
      case Kind::interval: {
        const double len = segment_->length();
        const double tol = space_.kind() == SpaceKind::euclidean ? 1e-12 * (1.0 + len) : 1e-9 * (1.0 + len);
        return distance(x, project_to_geodesic(x, *segment_).point) <= tol;
      }
      case Kind::ball: return radius_ >= 0.0 && distance(x, *center_) <= radius_ + 1e-12 * (1.0 + radius_);
      case Kind::star: {
        if (x[1] < kSpiderOriginTol) return true;
        const double cap = caps_[static_cast<std::size_t>(x[0]) - 1];
        return cap >= 0.0 && x[1] <= cap;
      }
      case Kind::product:
        for (std::size_t i = 0; i < factors_.size(); ++i)
          if (!factors_[i].contains(x.factor(i))) return false;
        return true;
    }
    return false;
  }

  /// Nearest point of the region.
  Point project(const Point& x) const {
    if (empty()) throw UsageError("projection onto an empty region");
    switch (kind_) {
      case Kind::interval: return project_to_geodesic(x, *segment_).point;
      case Kind::ball: {
        const double d = distance(x, *center_);
        if (d <= radius_) return x;
        return geodesic_point(GeodesicSegment(*center_, x), radius_ / d);
      }
      case Kind::star: {
        const double cap = caps_[static_cast<std::size_t>(x[0]) - 1];
        if (cap < 0.0) return spider_point(space_, 1, 0.0);
        return spider_point(space_, static_cast<int>(x[0]), std::min(x[1], cap));
      }
      case Kind::product: {
        std::vector<Point> parts;
        for (std::size_t i = 0; i < factors_.size(); ++i) parts.push_back(factors_[i].project(x.factor(i)));
        return Point::from_factors(space_, parts);
      }
    }
    return x;
  }

  /// A point of the region and a radius bounding it from there.
  Point center() const {
    switch (kind_) {
      case Kind::interval: return geodesic_point(*segment_, 0.5);
      case Kind::ball: return *center_;
      case Kind::star: return spider_point(space_, 1, 0.0);
      case Kind::product: {
        std::vector<Point> parts;
        for (const auto& f : factors_) parts.push_back(f.center());
        return Point::from_factors(space_, parts);
      }
    }
    return reference_point(space_);
  }
  double bounding_radius() const {
    switch (kind_) {
      case Kind::interval: return 0.5 * segment_->length();
      case Kind::ball: return std::max(0.0, radius_);
      case Kind::star: return std::max(0.0, *std::max_element(caps_.begin(), caps_.end()));
      case Kind::product: {
        double acc = 0.0;
        for (const auto& f : factors_) acc += f.bounding_radius() * f.bounding_radius();
        return std::sqrt(acc);
      }
    }
    return 0.0;
  }

  /// Corner points where indicator-based objectives tend to have kinks.
  std::vector<Point> extreme_points() const {
    switch (kind_) {
      case Kind::interval: return {segment_->start(), segment_->end()};
      case Kind::star: {
        std::vector<Point> out{spider_point(space_, 1, 0.0)};
        for (std::size_t l = 0; l < caps_.size(); ++l)
          if (caps_[l] > 0.0) out.push_back(spider_point(space_, static_cast<int>(l) + 1, caps_[l]));
        return out;
      }
      default: return {};
    }
  }

  /// Structured-text descriptor, parsed back by the descriptor layer.
  std::string descriptor() const {
    switch (kind_) {
      case Kind::interval:
        return "kind=interval,from=" + format_coords(segment_->start()) + ",to=" + format_coords(segment_->end());
      case Kind::ball: return "kind=ball,center=" + format_coords(*center_) + ",radius=" + format_real(radius_);
      case Kind::star: {
        std::string legs, caps;
        for (std::size_t l = 0; l < caps_.size(); ++l) {
          if (caps_[l] < 0.0) continue;
          if (!legs.empty()) legs += ',', caps += ',';
          legs += std::to_string(l + 1);
          caps += format_real(caps_[l]);
        }
        return "kind=star,legs=(" + legs + "),caps=(" + caps + ")";
      }
      case Kind::product: {
        std::string s = "kind=product,factors=[";
        for (std::size_t i = 0; i < factors_.size(); ++i) {
          if (i) s += ';';
          s += factors_[i].descriptor();
        }
        return s + "]";
      }
    }
    return {};
  }

  friend bool operator==(const Region& a, const Region& b) { return a.descriptor() == b.descriptor() && a.space_ == b.space_; }

 private:
  Region(Kind k, Space s) : kind_(k), space_(std::move(s)) {}

  Kind kind_;
  Space space_;
  std::shared_ptr<const GeodesicSegment> segment_;
  std::shared_ptr<const Point> center_;
  double radius_ = 0.0;
  std::vector<double> caps_;
  std::vector<Region> factors_;
};

}  // namespace hadamard

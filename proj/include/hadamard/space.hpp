#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hadamard/errors.hpp"

namespace hadamard {

enum class SpaceKind { euclidean, half_plane, spider, product };

/// Spider points with radius below this are the common origin.
inline constexpr double kSpiderOriginTol = 1e-12;

/// Print a double with enough digits to round-trip exactly.
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// A concrete Hadamard model space. Cheap to copy; immutable.
///
/// Points of every space are stored as a flat coordinate block:
///   euclidean(n) : n reals
///   halfplane    : (x, y) with y > 0
///   spider(k)    : (leg, r) with leg in {1..k}, r >= 0
///   product      : concatenation of the factor blocks
class Space {
 public:
  static Space euclidean(int dim) {
    if (dim < 1) throw UsageError("euclidean dimension must be >= 1");
    Rep r;
    r.kind = SpaceKind::euclidean;
    r.dim = dim;
    r.size = static_cast<std::size_t>(dim);
    return Space(std::move(r));
  }
  static Space half_plane() {
    Rep r;
    r.kind = SpaceKind::half_plane;
    r.size = 2;
    return Space(std::move(r));
  }
  static Space spider(int legs) {
    if (legs < 2) throw UsageError("legs must be ≥ 2");
    Rep r;
    r.kind = SpaceKind::spider;
    r.legs = legs;
    r.size = 2;
    return Space(std::move(r));
  }
  static Space product(std::vector<Space> factors) {
    if (factors.empty()) throw UsageError("product factor list must be nonempty");
    Rep r;
    r.kind = SpaceKind::product;
    r.size = 0;
    for (const auto& f : factors) {
      r.offsets.push_back(r.size);
      r.size += f.coord_count();
    }
    r.factors = std::move(factors);
    return Space(std::move(r));
  }

  SpaceKind kind() const { return rep_->kind; }
  int dim() const { return rep_->dim; }
  int legs() const { return rep_->legs; }
  const std::vector<Space>& factors() const { return rep_->factors; }
  std::size_t factor_offset(std::size_t i) const { return rep_->offsets.at(i); }
  std::size_t coord_count() const { return rep_->size; }

  /// Compact tag, e.g. "euclidean(2)", "product(halfplane,spider(3))".
  std::string tag() const {
    switch (kind()) {
      case SpaceKind::euclidean: return "euclidean(" + std::to_string(dim()) + ")";
      case SpaceKind::half_plane: return "halfplane";
      case SpaceKind::spider: return "spider(" + std::to_string(legs()) + ")";
      case SpaceKind::product: {
        std::string s = "product(";
        for (std::size_t i = 0; i < factors().size(); ++i) {
          if (i) s += ',';
          s += factors()[i].tag();
        }
        return s + ")";
      }
    }
    return {};
  }

  static Space from_tag(std::string_view text) {
    std::size_t pos = 0;
    Space s = parse_tag(text, pos);
    if (pos != text.size()) throw UsageError("trailing characters in space tag: " + std::string(text));
    return s;
  }

  friend bool operator==(const Space& a, const Space& b) {
    if (a.rep_ == b.rep_) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
      case SpaceKind::euclidean: return a.dim() == b.dim();
      case SpaceKind::half_plane: return true;
      case SpaceKind::spider: return a.legs() == b.legs();
      case SpaceKind::product: return a.factors() == b.factors();
    }
    return false;
  }

 private:
  struct Rep {
    SpaceKind kind = SpaceKind::euclidean;
    int dim = 0;
    int legs = 0;
    std::vector<Space> factors;
    std::vector<std::size_t> offsets;
    std::size_t size = 0;
  };
  explicit Space(Rep r) : rep_(std::make_shared<const Rep>(std::move(r))) {}

  static int parse_int_arg(std::string_view text, std::size_t& pos) {
    if (pos >= text.size() || text[pos] != '(') throw UsageError("expected '(' in space tag");
    const auto close = text.find(')', pos);
    if (close == std::string_view::npos) throw UsageError("unterminated space tag");
    const std::string num(text.substr(pos + 1, close - pos - 1));
    char* end = nullptr;
    const long v = std::strtol(num.c_str(), &end, 10);
    if (num.empty() || *end != '\0') throw UsageError("bad integer in space tag: " + num);
    pos = close + 1;
    return static_cast<int>(v);
  }

  static Space parse_tag(std::string_view text, std::size_t& pos) {
    auto starts = [&](std::string_view w) { return text.substr(pos, w.size()) == w; };
    if (starts("euclidean")) {
      pos += 9;
      return euclidean(parse_int_arg(text, pos));
    }
    if (starts("halfplane")) {
      pos += 9;
      return half_plane();
    }
    if (starts("spider")) {
      pos += 6;
      return spider(parse_int_arg(text, pos));
    }
    if (starts("product(")) {
      pos += 8;
      std::vector<Space> fs;
      while (true) {
        fs.push_back(parse_tag(text, pos));
        if (pos >= text.size()) throw UsageError("unterminated product tag");
        if (text[pos] == ',') {
          ++pos;
          continue;
        }
        if (text[pos] == ')') {
          ++pos;
          break;
        }
        throw UsageError("unexpected character in product tag");
      }
      return product(std::move(fs));
    }
    throw UsageError("unknown space kind in tag: " + std::string(text.substr(pos)));
  }

  std::shared_ptr<const Rep> rep_;
};

namespace detail {

inline void validate_chart(const Space& s, std::span<const double> c) {
  switch (s.kind()) {
    case SpaceKind::euclidean:
      for (double v : c)
        if (!std::isfinite(v)) throw UsageError("non-finite euclidean coordinate");
      break;
    case SpaceKind::half_plane:
      if (!std::isfinite(c[0]) || !std::isfinite(c[1]) || !(c[1] > 0.0))
        throw UsageError("half-plane point needs finite x and y > 0");
      break;
    case SpaceKind::spider: {
      const double leg = c[0];
      if (leg != std::floor(leg) || leg < 1 || leg > s.legs())
        throw UsageError("spider leg index out of range");
      if (!std::isfinite(c[1]) || c[1] < 0.0) throw UsageError("spider radius must be >= 0");
      break;
    }
    case SpaceKind::product:
      for (std::size_t i = 0; i < s.factors().size(); ++i) {
        const auto& f = s.factors()[i];
        validate_chart(f, c.subspan(s.factor_offset(i), f.coord_count()));
      }
      break;
  }
}

}  // namespace detail

/// An element of a model space, tagged with the space it lives in.
class Point {
 public:
  Point(Space space, std::vector<double> coords) : space_(std::move(space)), coords_(std::move(coords)) {
    if (coords_.size() != space_.coord_count())
      throw UsageError("coordinate count " + std::to_string(coords_.size()) + " does not match " + space_.tag());
    detail::validate_chart(space_, coords_);
  }

  const Space& space() const { return space_; }
  std::span<const double> coords() const { return coords_; }
  double operator[](std::size_t i) const { return coords_[i]; }

  Point factor(std::size_t i) const {
    if (space_.kind() != SpaceKind::product) throw UsageError("factor() on a non-product point");
    const auto& f = space_.factors().at(i);
    const auto off = space_.factor_offset(i);
    return Point(f, std::vector<double>(coords_.begin() + off, coords_.begin() + off + f.coord_count()));
  }

  static Point from_factors(const Space& product, std::span<const Point> parts) {
    if (product.kind() != SpaceKind::product || parts.size() != product.factors().size())
      throw UsageError("from_factors: factor count mismatch");
    std::vector<double> c;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (!(parts[i].space() == product.factors()[i])) throw UsageError("from_factors: factor space mismatch");
      c.insert(c.end(), parts[i].coords_.begin(), parts[i].coords_.end());
    }
    return Point(product, std::move(c));
  }

  /// "tag@(c1,c2,...)" with 17 significant digits.
  std::string to_string() const {
    std::string s = space_.tag() + "@(";
    for (std::size_t i = 0; i < coords_.size(); ++i) {
      if (i) s += ',';
      s += format_real(coords_[i]);
    }
    return s + ")";
  }

  static Point parse(std::string_view text) {
    const auto at = text.find('@');
    if (at == std::string_view::npos) throw UsageError("point text lacks '@': " + std::string(text));
    Space s = Space::from_tag(text.substr(0, at));
    return Point(s, parse_coordinates(text.substr(at + 1)));
  }

  /// Parses "(c1,c2,...)" or a bare "c1,c2,..." list.
  static std::vector<double> parse_coordinates(std::string_view body) {
    if (!body.empty() && body.front() == '(') {
      if (body.back() != ')') throw UsageError("unbalanced parentheses in coordinates");
      body = body.substr(1, body.size() - 2);
    }
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= body.size()) {
      auto comma = body.find(',', start);
      if (comma == std::string_view::npos) comma = body.size();
      std::string tok(body.substr(start, comma - start));
      tok.erase(0, tok.find_first_not_of(" \t"));
      tok.erase(tok.find_last_not_of(" \t") + 1);
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (tok.empty() || *end != '\0') throw UsageError("bad number in coordinates: '" + tok + "'");
      out.push_back(v);
      start = comma + 1;
    }
    return out;
  }

  friend bool operator==(const Point& a, const Point& b) {
    if (!(a.space_ == b.space_)) return false;
    return equal_coords(a.space_, a.coords_, b.coords_);
  }

 private:
  static bool equal_coords(const Space& s, std::span<const double> a, std::span<const double> b) {
    switch (s.kind()) {
      case SpaceKind::spider:
        if (a[1] < kSpiderOriginTol && b[1] < kSpiderOriginTol) return true;
        return a[0] == b[0] && a[1] == b[1];
      case SpaceKind::product:
        for (std::size_t i = 0; i < s.factors().size(); ++i) {
          const auto& f = s.factors()[i];
          const auto off = s.factor_offset(i);
          if (!equal_coords(f, a.subspan(off, f.coord_count()), b.subspan(off, f.coord_count()))) return false;
        }
        return true;
      default:
        return std::equal(a.begin(), a.end(), b.begin());
    }
  }

  Space space_;
  std::vector<double> coords_;
};

inline Point euclidean_point(std::vector<double> coords) {
  const int n = static_cast<int>(coords.size());
  return Point(Space::euclidean(n), std::move(coords));
}
inline Point half_plane_point(double x, double y) { return Point(Space::half_plane(), {x, y}); }
inline Point spider_point(const Space& spider, int leg, double r) {
  return Point(spider, {static_cast<double>(leg), r});
}

/// Euclidean origin, (0,1) in the half-plane, the spider origin; products
/// take the reference point of each factor.
inline Point reference_point(const Space& s) {
  switch (s.kind()) {
    case SpaceKind::euclidean: return Point(s, std::vector<double>(s.coord_count(), 0.0));
    case SpaceKind::half_plane: return Point(s, {0.0, 1.0});
    case SpaceKind::spider: return Point(s, {1.0, 0.0});
    case SpaceKind::product: {
      std::vector<Point> parts;
      for (const auto& f : s.factors()) parts.push_back(reference_point(f));
      return Point::from_factors(s, parts);
    }
  }
  throw UsageError("unknown space kind");
}

namespace detail {

inline double distance_raw(const Space& s, std::span<const double> a, std::span<const double> b) {
  switch (s.kind()) {
    case SpaceKind::euclidean: {
      double acc = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
      }
      return std::sqrt(acc);
    }
    case SpaceKind::half_plane: {
      // 2 asinh(|z-w| / (2 sqrt(y1 y2))) is well conditioned for short segments.
      const double dx = a[0] - b[0], dy = a[1] - b[1];
      const double chord = std::sqrt(dx * dx + dy * dy);
      return 2.0 * std::asinh(chord / (2.0 * std::sqrt(a[1] * b[1])));
    }
    case SpaceKind::spider: {
      const bool same_ray = a[0] == b[0] || a[1] < kSpiderOriginTol || b[1] < kSpiderOriginTol;
      return same_ray ? std::abs(a[1] - b[1]) : a[1] + b[1];
    }
    case SpaceKind::product: {
      double acc = 0.0;
      for (std::size_t i = 0; i < s.factors().size(); ++i) {
        const auto& f = s.factors()[i];
        const auto off = s.factor_offset(i), n = f.coord_count();
        const double d = distance_raw(f, a.subspan(off, n), b.subspan(off, n));
        acc += d * d;
      }
      return std::sqrt(acc);
    }
  }
  return 0.0;
}

// Half-plane <-> hyperboloid sheet X0^2 - X1^2 - X2^2 = 1.
struct Hyperboloid {
  double x0, x1, x2;
};
inline Hyperboloid to_hyperboloid(double x, double y) {
  const double r2 = x * x + y * y;
  return {(r2 + 1.0) / (2.0 * y), x / y, (r2 - 1.0) / (2.0 * y)};
}

inline void geodesic_raw(const Space& s, std::span<const double> a, std::span<const double> b, double t,
                         std::span<double> out) {
  switch (s.kind()) {
    case SpaceKind::euclidean:
      for (std::size_t i = 0; i < a.size(); ++i) out[i] = (1.0 - t) * a[i] + t * b[i];
      return;
    case SpaceKind::half_plane: {
      const double d = distance_raw(s, a, b);
      if (d < 1e-9) {
        out[0] = (1.0 - t) * a[0] + t * b[0];
        out[1] = (1.0 - t) * a[1] + t * b[1];
        return;
      }
      const auto p = to_hyperboloid(a[0], a[1]);
      const auto q = to_hyperboloid(b[0], b[1]);
      const double sd = std::sinh(d);
      const double wa = std::sinh((1.0 - t) * d) / sd, wb = std::sinh(t * d) / sd;
      const double x0 = wa * p.x0 + wb * q.x0, x1 = wa * p.x1 + wb * q.x1, x2 = wa * p.x2 + wb * q.x2;
      const double y = 1.0 / (x0 - x2);
      out[0] = x1 * y;
      out[1] = y;
      return;
    }
    case SpaceKind::spider: {
      const double la = a[0], ra = a[1], lb = b[0], rb = b[1];
      if (la == lb) {
        out[0] = la;
        out[1] = (1.0 - t) * ra + t * rb;
      } else {
        // Path runs down leg la to the origin, then up leg lb.
        const double s_travel = t * (ra + rb);
        if (s_travel <= ra) {
          out[0] = la;
          out[1] = ra - s_travel;
        } else {
          out[0] = lb;
          out[1] = s_travel - ra;
        }
      }
      if (out[1] < kSpiderOriginTol && out[1] <= 0.0) {
        out[0] = 1.0;
        out[1] = 0.0;
      }
      return;
    }
    case SpaceKind::product:
      for (std::size_t i = 0; i < s.factors().size(); ++i) {
        const auto& f = s.factors()[i];
        const auto off = s.factor_offset(i), n = f.coord_count();
        geodesic_raw(f, a.subspan(off, n), b.subspan(off, n), t, out.subspan(off, n));
      }
      return;
  }
}

inline void require_same_space(const Point& a, const Point& b, const char* op) {
  if (!(a.space() == b.space()))
    throw UsageError(std::string(op) + ": points live in different spaces (" + a.space().tag() + " vs " +
                     b.space().tag() + ")");
}

}  // namespace detail

inline double distance(const Point& a, const Point& b) {
  detail::require_same_space(a, b, "distance");
  return detail::distance_raw(a.space(), a.coords(), b.coords());
}

/// The segment [start, end]; both endpoints in one space.
class GeodesicSegment {
 public:
  GeodesicSegment(Point start, Point end) : start_(std::move(start)), end_(std::move(end)) {
    detail::require_same_space(start_, end_, "GeodesicSegment");
  }
  const Point& start() const { return start_; }
  const Point& end() const { return end_; }
  const Space& space() const { return start_.space(); }
  double length() const { return distance(start_, end_); }

 private:
  Point start_;
  Point end_;
};

/// x_t = (1-t) start (+) t end.
inline Point geodesic_point(const GeodesicSegment& g, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw UsageError("geodesic parameter must lie in [0,1], got " + format_real(t));
  if (t == 0.0) return g.start();
  if (t == 1.0) return g.end();
  std::vector<double> out(g.space().coord_count());
  detail::geodesic_raw(g.space(), g.start().coords(), g.end().coords(), t, out);
  return Point(g.space(), std::move(out));
}

/// Point at distance `len` from `from` along the geodesic toward `to`
/// (clamped to the segment).
inline Point step_toward(const Point& from, const Point& to, double len) {
  const double d = distance(from, to);
  if (d <= 0.0) return from;
  return geodesic_point(GeodesicSegment(from, to), std::min(1.0, len / d));
}

namespace detail {

inline std::vector<std::vector<double>> neighbor_coords(const Space& s, std::span<const double> y, double h) {
  std::vector<std::vector<double>> out;
  switch (s.kind()) {
    case SpaceKind::euclidean:
      for (std::size_t i = 0; i < y.size(); ++i)
        for (double sign : {1.0, -1.0}) {
          std::vector<double> c(y.begin(), y.end());
          c[i] += sign * h;
          out.push_back(std::move(c));
        }
      break;
    case SpaceKind::half_plane:
      // Chart moves of hyperbolic length about h.
      out.push_back({y[0] + h * y[1], y[1]});
      out.push_back({y[0] - h * y[1], y[1]});
      out.push_back({y[0], y[1] * std::exp(h)});
      out.push_back({y[0], y[1] * std::exp(-h)});
      break;
    case SpaceKind::spider: {
      const double leg = y[0], r = y[1];
      const bool at_origin = r < kSpiderOriginTol;
      if (!at_origin) out.push_back({leg, r + h});
      if (!at_origin && h <= r) {
        out.push_back({leg, r - h});
      } else {
        for (int j = 1; j <= s.legs(); ++j)
          if (at_origin || j != static_cast<int>(leg)) out.push_back({static_cast<double>(j), h - r});
      }
      break;
    }
    case SpaceKind::product:
      for (std::size_t i = 0; i < s.factors().size(); ++i) {
        const auto& f = s.factors()[i];
        const auto off = s.factor_offset(i), n = f.coord_count();
        for (auto& part : neighbor_coords(f, y.subspan(off, n), h)) {
          std::vector<double> c(y.begin(), y.end());
          for (std::size_t k = 0; k < part.size(); ++k) c[off + k] = part[k];
          out.push_back(std::move(c));
        }
      }
      break;
  }
  return out;
}

template <class Rng>
std::vector<double> random_neighbor_coords(const Space& s, std::span<const double> y, double h, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  switch (s.kind()) {
    case SpaceKind::euclidean: {
      std::vector<double> dir(y.size());
      double norm = 0.0;
      for (auto& v : dir) {
        v = gauss(rng);
        norm += v * v;
      }
      norm = std::sqrt(norm);
      if (norm == 0.0) norm = 1.0, dir[0] = 1.0;
      std::vector<double> c(y.begin(), y.end());
      for (std::size_t i = 0; i < c.size(); ++i) c[i] += h * dir[i] / norm;
      return c;
    }
    case SpaceKind::half_plane: {
      const double th = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
      return {y[0] + h * y[1] * std::cos(th), y[1] * std::exp(h * std::sin(th))};
    }
    case SpaceKind::spider: {
      auto all = neighbor_coords(s, y, h);
      std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
      return all[pick(rng)];
    }
    case SpaceKind::product: {
      const std::size_t m = s.factors().size();
      std::vector<double> w(m);
      double norm = 0.0;
      for (auto& v : w) {
        v = std::abs(gauss(rng));
        norm += v * v;
      }
      norm = std::sqrt(norm);
      std::vector<double> c(y.begin(), y.end());
      for (std::size_t i = 0; i < m; ++i) {
        const auto& f = s.factors()[i];
        const auto off = s.factor_offset(i), n = f.coord_count();
        const double hi = norm > 0 ? h * w[i] / norm : h / std::sqrt(double(m));
        if (hi <= 0.0) continue;
        auto part = random_neighbor_coords(f, y.subspan(off, n), hi, rng);
        std::copy(part.begin(), part.end(), c.begin() + static_cast<std::ptrdiff_t>(off));
      }
      return c;
    }
  }
  return {y.begin(), y.end()};
}

}  // namespace detail

/// Points at distance about h around y covering the local directions:
/// coordinate moves in charts, every leg at a spider branch point, and
/// per-factor moves in products.
inline std::vector<Point> neighbors(const Point& y, double h) {
  std::vector<Point> out;
  for (auto& c : detail::neighbor_coords(y.space(), y.coords(), h)) out.emplace_back(y.space(), std::move(c));
  return out;
}

template <class Rng>
Point random_neighbor(const Point& y, double h, Rng& rng) {
  return Point(y.space(), detail::random_neighbor_coords(y.space(), y.coords(), h, rng));
}

/// Random point within distance `radius` of `center`.
template <class Rng>
Point sample_ball(const Point& center, double radius, Rng& rng) {
  if (radius <= 0.0) return center;
  const Point far = random_neighbor(center, radius, rng);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  const double d = distance(center, far);
  if (d <= 0.0) return center;
  return geodesic_point(GeodesicSegment(center, far), std::min(1.0, u * radius / d));
}

/// True when the space has a single local direction up to sign, i.e. the
/// fixed neighbor set already spans every geodesic direction.
inline bool neighbors_exhaustive(const Space& s) {
  return (s.kind() == SpaceKind::euclidean && s.dim() == 1) || s.kind() == SpaceKind::spider;
}

}  // namespace hadamard

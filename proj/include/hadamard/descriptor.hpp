#pragma once

#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hadamard/families.hpp"
#include "hadamard/functional.hpp"
#include "hadamard/region.hpp"
#include "hadamard/space.hpp"

// Structured-text descriptors: comma-separated key=value pairs, with ( )
// around coordinate lists and [ ] around nested descriptors (items inside
// [ ] separated by ';').
//   space      kind=euclidean,dim=2 | kind=halfplane | kind=spider,legs=3
//              | kind=product,factors=[kind=euclidean,dim=1;kind=spider,legs=3]
//   point      (c1,c2,...) | c1 (one coordinate) | tag@(c1,...)
//   region     kind=interval,from=(0),to=(1) | kind=ball,center=(0,2),radius=1
//              | kind=star,legs=(1,2),caps=(1,0.5) | kind=product,factors=[..;..]
//   functional f=zero | f=abs | f=const,value=v | f=linear,slope=(..),offset=c
//              | f=dist,anchor=(..),weight=w | f=dist_sq,anchor=(..),weight=w
//              | f=indicator,region=[..] | f=sum,terms=[..;..],weights=(..)
//              | f=max,terms=[..;..]
//   sequence   family=NAME | constant=[functional]

namespace hadamard {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

/// Splits at `sep` outside ( ) and [ ].
inline std::vector<std::string> split_top(std::string_view text, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') {
      if (--depth < 0) throw UsageError("unbalanced brackets in '" + std::string(text) + "'");
    }
    if (c == sep && depth == 0) {
      out.push_back(trim(text.substr(start, i - start)));
      start = i + 1;
    }
  }
  if (depth != 0) throw UsageError("unbalanced brackets in '" + std::string(text) + "'");
  out.push_back(trim(text.substr(start)));
  return out;
}

inline std::string unwrap(std::string_view v, char open, char close) {
  const std::string t = trim(v);
  if (t.size() >= 2 && t.front() == open && t.back() == close) return trim(std::string_view(t).substr(1, t.size() - 2));
  return t;
}

inline double parse_number(std::string_view text, std::string_view what) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || *end != '\0') throw UsageError("bad number for " + std::string(what) + ": '" + t + "'");
  return v;
}

inline long parse_integer(std::string_view text, std::string_view what) {
  const std::string t = trim(text);
  char* end = nullptr;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (t.empty() || *end != '\0') throw UsageError("bad integer for " + std::string(what) + ": '" + t + "'");
  return v;
}

inline std::vector<double> parse_numbers(std::string_view text, std::string_view what) {
  std::vector<double> out;
  const std::string body = unwrap(text, '(', ')');
  if (body.empty()) return out;
  for (const auto& item : split_top(body, ',')) out.push_back(parse_number(item, what));
  return out;
}

/// Checks that every key is among `allowed`.
inline void expect_keys(const KeyValues& kv, std::initializer_list<std::string_view> allowed, std::string_view what) {
  for (const auto& [k, v] : kv) {
    bool ok = false;
    for (auto a : allowed) ok |= (k == a);
    if (!ok) {
      std::string list;
      for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
      throw UsageError("unknown key '" + k + "' in " + std::string(what) + " (expected " + list + ")");
    }
  }
}

}  // namespace detail

/// "k1=v1,k2=v2,..." with nested values kept verbatim.
inline KeyValues parse_key_values(std::string_view text) {
  KeyValues out;
  if (detail::trim(text).empty()) return out;
  for (const auto& item : detail::split_top(text, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("expected key=value, got '" + item + "'");
    out.emplace_back(detail::trim(std::string_view(item).substr(0, eq)), detail::trim(std::string_view(item).substr(eq + 1)));
  }
  return out;
}

inline std::optional<std::string> lookup(const KeyValues& kv, std::string_view key) {
  for (const auto& [k, v] : kv)
    if (k == key) return v;
  return std::nullopt;
}

inline std::string require(const KeyValues& kv, std::string_view key, std::string_view what) {
  auto v = lookup(kv, key);
  if (!v) throw UsageError("missing required key '" + std::string(key) + "' in " + std::string(what));
  return *v;
}

// ---------------------------------------------------------------- spaces

inline Space parse_space(std::string_view text) {
  const std::string t = detail::trim(text);
  if (t.find('=') == std::string::npos) return Space::from_tag(t);
  const auto kv = parse_key_values(t);
  const std::string kind = require(kv, "kind", "space descriptor");
  if (kind == "euclidean") {
    detail::expect_keys(kv, {"kind", "dim"}, "euclidean space");
    return Space::euclidean(static_cast<int>(detail::parse_integer(require(kv, "dim", "euclidean space"), "dim")));
  }
  if (kind == "halfplane" || kind == "half_plane" || kind == "hyperbolic") {
    detail::expect_keys(kv, {"kind"}, "half-plane space");
    return Space::half_plane();
  }
  if (kind == "spider") {
    detail::expect_keys(kv, {"kind", "legs"}, "spider space");
    return Space::spider(static_cast<int>(detail::parse_integer(require(kv, "legs", "spider space"), "legs")));
  }
  if (kind == "product") {
    detail::expect_keys(kv, {"kind", "factors"}, "product space");
    std::vector<Space> fs;
    for (const auto& item : detail::split_top(detail::unwrap(require(kv, "factors", "product space"), '[', ']'), ';'))
      fs.push_back(parse_space(item));
    return Space::product(std::move(fs));
  }
  throw UsageError("unknown space kind '" + kind + "' (euclidean, halfplane, spider, product)");
}

inline std::string space_descriptor(const Space& s) {
  switch (s.kind()) {
    case SpaceKind::euclidean: return "kind=euclidean,dim=" + std::to_string(s.dim());
    case SpaceKind::half_plane: return "kind=halfplane";
    case SpaceKind::spider: return "kind=spider,legs=" + std::to_string(s.legs());
    case SpaceKind::product: {
      std::string out = "kind=product,factors=[";
      for (std::size_t i = 0; i < s.factors().size(); ++i) out += (i ? ";" : "") + space_descriptor(s.factors()[i]);
      return out + "]";
    }
  }
  return {};
}

// ---------------------------------------------------------------- points

inline Point parse_point(const Space& s, std::string_view text) {
  const std::string t = detail::trim(text);
  if (t.find('@') != std::string::npos) {
    Point p = Point::parse(t);
    if (!(p.space() == s)) throw UsageError("point " + t + " is not in " + s.tag());
    return p;
  }
  return Point(s, detail::parse_numbers(t, "point coordinate"));
}

// ---------------------------------------------------------------- regions

inline Region parse_region(const Space& s, std::string_view text) {
  const auto kv = parse_key_values(detail::unwrap(text, '[', ']'));
  const std::string kind = require(kv, "kind", "region descriptor");
  if (kind == "interval") {
    detail::expect_keys(kv, {"kind", "from", "to"}, "interval region");
    return Region::interval(GeodesicSegment(parse_point(s, require(kv, "from", "interval region")),
                                            parse_point(s, require(kv, "to", "interval region"))));
  }
  if (kind == "ball") {
    detail::expect_keys(kv, {"kind", "center", "radius"}, "ball region");
    return Region::ball(parse_point(s, require(kv, "center", "ball region")),
                        detail::parse_number(require(kv, "radius", "ball region"), "radius"));
  }
  if (kind == "star") {
    detail::expect_keys(kv, {"kind", "legs", "caps"}, "star region");
    const auto legs = detail::parse_numbers(require(kv, "legs", "star region"), "leg");
    const auto caps = detail::parse_numbers(require(kv, "caps", "star region"), "cap");
    if (legs.size() != caps.size()) throw UsageError("star region needs one cap per leg");
    std::vector<std::pair<int, double>> lc;
    for (std::size_t i = 0; i < legs.size(); ++i) lc.emplace_back(static_cast<int>(legs[i]), caps[i]);
    return Region::star(s, lc);
  }
  if (kind == "product") {
    detail::expect_keys(kv, {"kind", "factors"}, "product region");
    if (s.kind() != SpaceKind::product) throw UsageError("product region needs a product space");
    const auto items = detail::split_top(detail::unwrap(require(kv, "factors", "product region"), '[', ']'), ';');
    if (items.size() != s.factors().size()) throw UsageError("product region needs one factor per space factor");
    std::vector<Region> parts;
    for (std::size_t i = 0; i < items.size(); ++i) parts.push_back(parse_region(s.factors()[i], items[i]));
    return Region::product(s, std::move(parts));
  }
  throw UsageError("unknown region kind '" + kind + "' (interval, ball, star, product)");
}

// ---------------------------------------------------------------- functionals

inline ConvexFunctional parse_functional(const Space& s, std::string_view text) {
  const auto kv = parse_key_values(detail::unwrap(text, '[', ']'));
  const std::string kind = require(kv, "f", "functional descriptor");
  auto weight = [&] {
    auto w = lookup(kv, "weight");
    return w ? detail::parse_number(*w, "weight") : 1.0;
  };
  auto anchor = [&] {
    auto a = lookup(kv, "anchor");
    return a ? parse_point(s, *a) : reference_point(s);
  };
  if (kind == "zero") {
    detail::expect_keys(kv, {"f"}, "zero functional");
    return ConvexFunctional::zero(s);
  }
  if (kind == "const") {
    detail::expect_keys(kv, {"f", "value"}, "constant functional");
    return ConvexFunctional::constant(s, detail::parse_number(require(kv, "value", "constant functional"), "value"));
  }
  if (kind == "linear") {
    detail::expect_keys(kv, {"f", "slope", "offset"}, "linear functional");
    auto off = lookup(kv, "offset");
    return ConvexFunctional::linear(s, detail::parse_numbers(require(kv, "slope", "linear functional"), "slope"),
                                    off ? detail::parse_number(*off, "offset") : 0.0);
  }
  if (kind == "abs") {
    detail::expect_keys(kv, {"f"}, "abs functional");
    return ConvexFunctional::dist(reference_point(s));
  }
  if (kind == "dist") {
    detail::expect_keys(kv, {"f", "anchor", "weight"}, "dist functional");
    return ConvexFunctional::dist(anchor(), weight());
  }
  if (kind == "dist_sq") {
    detail::expect_keys(kv, {"f", "anchor", "weight"}, "dist_sq functional");
    return ConvexFunctional::dist_sq(anchor(), weight());
  }
  if (kind == "indicator") {
    detail::expect_keys(kv, {"f", "region"}, "indicator functional");
    return ConvexFunctional::indicator(parse_region(s, require(kv, "region", "indicator functional")));
  }
  if (kind == "sum" || kind == "max") {
    detail::expect_keys(kv, kind == "sum" ? std::initializer_list<std::string_view>{"f", "terms", "weights"}
                                          : std::initializer_list<std::string_view>{"f", "terms"},
                        kind + " functional");
    std::vector<ConvexFunctional> fs;
    for (const auto& item : detail::split_top(detail::unwrap(require(kv, "terms", "functional"), '[', ']'), ';'))
      fs.push_back(parse_functional(s, item));
    if (kind == "max") return ConvexFunctional::max(fs);
    std::vector<double> ws(fs.size(), 1.0);
    if (auto w = lookup(kv, "weights")) ws = detail::parse_numbers(*w, "weights");
    if (ws.size() != fs.size()) throw UsageError("sum functional needs one weight per term");
    std::vector<std::pair<double, ConvexFunctional>> terms;
    for (std::size_t i = 0; i < fs.size(); ++i) terms.emplace_back(ws[i], fs[i]);
    return ConvexFunctional::sum(terms);
  }
  throw UsageError("unknown functional kind '" + kind +
                   "' (zero, abs, const, linear, dist, dist_sq, indicator, sum, max)");
}

// ---------------------------------------------------------------- sequences

struct SequenceSpec {
  FunctionSequence seq;
  std::optional<ConvexFunctional> limit;  // known limit, when the source provides one
  std::string descriptor;
};

inline SequenceSpec parse_sequence(const Space& s, std::string_view text) {
  const std::string body = detail::unwrap(text, '[', ']');
  const auto kv = parse_key_values(body);
  if (auto name = lookup(kv, "family")) {
    detail::expect_keys(kv, {"family"}, "sequence descriptor");
    auto fam = families::by_name(*name);
    if (!(fam.seq.space() == s))
      throw UsageError("family " + *name + " lives in " + fam.seq.space().tag() + ", not " + s.tag());
    return {fam.seq, fam.limit, "family=" + *name};
  }
  if (auto f = lookup(kv, "constant")) {
    detail::expect_keys(kv, {"constant"}, "sequence descriptor");
    auto g = parse_functional(s, *f);
    return {FunctionSequence::constant(g), g, "constant=[" + g.descriptor() + "]"};
  }
  throw UsageError("sequence descriptor needs family=NAME or constant=[functional]");
}

}  // namespace hadamard

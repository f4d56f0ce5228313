#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <string>

#include "hadamard/errors.hpp"
#include "hadamard/space.hpp"

namespace hadamard {

/// A value in (-inf, +inf]. Backed by an IEEE double, whose +inf already
/// obeys x + inf = inf and inf > every real; -inf and NaN are rejected.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  ExtendedReal(double v) : v_(v) {  // NOLINT(google-explicit-constructor)
    if (std::isnan(v) || v == -std::numeric_limits<double>::infinity())
      throw UsageError("extended real must lie in (-inf, +inf]");
  }
  static ExtendedReal infinity() { return ExtendedReal(std::numeric_limits<double>::infinity()); }

  bool is_finite() const { return std::isfinite(v_); }
  double value() const { return v_; }

  friend ExtendedReal operator+(ExtendedReal a, ExtendedReal b) { return ExtendedReal(a.v_ + b.v_); }
  friend ExtendedReal operator*(double s, ExtendedReal a) {
    if (s < 0) throw UsageError("extended reals may only be scaled by nonnegative factors");
    if (s == 0) return ExtendedReal(a.is_finite() ? 0.0 : a.v_);
    return ExtendedReal(s * a.v_);
  }
  friend auto operator<=>(ExtendedReal a, ExtendedReal b) { return a.v_ <=> b.v_; }
  friend bool operator==(ExtendedReal a, ExtendedReal b) { return a.v_ == b.v_; }

  std::string to_string() const { return is_finite() ? format_real(v_) : "+inf"; }

 private:
  double v_ = 0.0;
};

}  // namespace hadamard

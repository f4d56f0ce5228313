#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "hadamard/errors.hpp"

namespace hadamard {

/// The index window [n_min, n_max] over which limits are estimated, and the
/// tolerance a limit residual must fall below.
struct TailWindow {
  int n_min = 64;
  int n_max = 256;
  double tol = 1e-2;
  int stride = 1;

  void validate() const {
    if (n_min < 1 || !(n_min < n_max)) throw UsageError("tail window needs 1 <= n_min < n_max");
    if (!(tol > 0.0)) throw UsageError("tail tolerance must be > 0");
    if (stride < 1) throw UsageError("tail stride must be >= 1");
  }

  /// Indices visited, n_max always included.
  std::vector<int> indices() const {
    validate();
    std::vector<int> out;
    for (int n = n_min; n <= n_max; n += stride) out.push_back(n);
    if (out.back() != n_max) out.push_back(n_max);
    return out;
  }

  /// Start of the late sub-window used for extrapolation.
  int split() const { return 2 * n_min <= n_max - 1 ? 2 * n_min : (n_min + n_max) / 2; }
};

namespace detail {

template <class Reduce>
void window_extremes(std::span<const int> ns, std::span<const double> v, int split, Reduce better, double& all,
                     double& late) {
  if (ns.size() != v.size() || v.empty()) throw UsageError("tail estimate: empty or mismatched window");
  all = v[0];
  bool have_late = false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (better(v[i], all)) all = v[i];
    if (ns[i] >= split) {
      if (!have_late || better(v[i], late)) late = v[i];
      have_late = true;
    }
  }
  if (!have_late) late = v.back();
}

}  // namespace detail

/// limsup estimate of a sequence sampled on a tail window.
///
/// Takes the maxima M over the whole window and M' over its late part
/// [split, n_max] and returns 2M' - M when the maxima are still decaying
/// (first-order extrapolation, exact for c/n tails over a doubling window),
/// and M' otherwise. Infinite values propagate.
inline double tail_limsup(std::span<const int> ns, std::span<const double> v, int split) {
  double all = 0, late = 0;
  detail::window_extremes(ns, v, split, [](double a, double b) { return a > b; }, all, late);
  if (!std::isfinite(late) || !std::isfinite(all)) return late;
  return late < all ? 2.0 * late - all : late;
}

/// liminf estimate; mirror image of tail_limsup.
inline double tail_liminf(std::span<const int> ns, std::span<const double> v, int split) {
  double all = 0, late = 0;
  detail::window_extremes(ns, v, split, [](double a, double b) { return a < b; }, all, late);
  if (!std::isfinite(late) || !std::isfinite(all)) return late;
  return late > all ? 2.0 * late - all : late;
}

/// Residual-style limit: limsup estimate of a nonnegative sequence,
/// clamped at zero.
inline double tail_residual(std::span<const int> ns, std::span<const double> v, int split) {
  return std::max(0.0, tail_limsup(ns, v, split));
}

/// max - min over the window.
inline double tail_oscillation(std::span<const double> v) {
  if (v.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi - *lo;
}

}  // namespace hadamard

#pragma once

#include <cmath>
#include <utility>

namespace hadamard::detail {

struct LineMinimum {
  double t;
  double value;
};

/// Golden-section search for a unimodal (possibly +inf-valued) function on
/// [lo, hi]. Returns the best evaluated abscissa, endpoints included. When
/// both interior probes are +inf the left part is kept, which is correct
/// whenever the left endpoint lies in the domain.
template <class Fn>
LineMinimum golden_minimize(Fn&& phi, double lo, double hi, double tol, double phi_lo,
                            int max_iter = 200) {
  constexpr double kInvPhi = 0.6180339887498948482;
  LineMinimum best{lo, phi_lo};
  auto consider = [&best](double t, double v) {
    if (v < best.value) best = {t, v};
  };
  const double phi_hi = phi(hi);
  consider(hi, phi_hi);

  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = phi(c), fd = phi(d);
  consider(c, fc);
  consider(d, fd);
  for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = phi(c);
      consider(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = phi(d);
      consider(d, fd);
    }
  }
  return best;
}

}  // namespace hadamard::detail

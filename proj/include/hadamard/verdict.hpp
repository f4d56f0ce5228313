#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hadamard {

enum class Outcome { consistent_with, violated, inconclusive };

inline std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::consistent_with: return "ConsistentWith";
    case Outcome::violated: return "Violated";
    case Outcome::inconclusive: return "Inconclusive";
  }
  return "?";
}

/// Conjunction of two outcomes: any violation dominates, then any
/// inconclusive result.
inline Outcome conjoin(Outcome a, Outcome b) {
  if (a == Outcome::violated || b == Outcome::violated) return Outcome::violated;
  if (a == Outcome::inconclusive || b == Outcome::inconclusive) return Outcome::inconclusive;
  return Outcome::consistent_with;
}

/// Where a check was worst. Fields that do not apply stay at their defaults.
struct Witness {
  std::string point;
  double lambda = std::numeric_limits<double>::quiet_NaN();
  long n = -1;
  double residual = std::numeric_limits<double>::quiet_NaN();
  std::string detail;
};

/// A two-column data series for external plotting.
struct Series {
  std::string name;
  std::string x_label;
  std::string y_label;
  std::vector<std::pair<double, double>> data;
};

struct Verdict {
  Outcome outcome = Outcome::inconclusive;
  std::string reason;
  std::optional<Witness> witness;
  // Worst residual observed (0 when nothing was measured).
  double residual = 0.0;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<Series> series;

  static Verdict consistent(double residual = 0.0, std::string note = {}) {
    Verdict v;
    v.outcome = Outcome::consistent_with;
    v.residual = residual;
    v.reason = std::move(note);
    return v;
  }
  static Verdict violated(Witness w, std::string reason) {
    Verdict v;
    v.outcome = Outcome::violated;
    v.residual = w.residual;
    v.witness = std::move(w);
    v.reason = std::move(reason);
    return v;
  }
  static Verdict inconclusive(std::string reason) {
    Verdict v;
    v.outcome = Outcome::inconclusive;
    v.reason = std::move(reason);
    return v;
  }

  bool ok() const { return outcome == Outcome::consistent_with; }
  bool is_violated() const { return outcome == Outcome::violated; }

  std::optional<double> metric(std::string_view name) const {
    for (const auto& [k, v] : metrics)
      if (k == name) return v;
    return std::nullopt;
  }
  void set_metric(std::string name, double value) {
    for (auto& [k, v] : metrics)
      if (k == name) {
        v = value;
        return;
      }
    metrics.emplace_back(std::move(name), value);
  }
};

}  // namespace hadamard

#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "hadamard/verdict.hpp"

namespace hadamard {

enum class Role { hypothesis, conclusion, identity };

inline std::string_view to_string(Role r) {
  switch (r) {
    case Role::hypothesis: return "hypothesis";
    case Role::conclusion: return "conclusion";
    case Role::identity: return "identity";
  }
  return "?";
}

struct SubCheck {
  std::string name;
  Role role = Role::hypothesis;
  Verdict verdict;
};

/// premises => conclusions, by sub-check name. No premises means the
/// conclusions are claimed unconditionally (lemmas, identities).
struct Implication {
  std::string label;
  std::vector<std::string> premises;
  std::vector<std::string> conclusions;
  Outcome outcome = Outcome::inconclusive;
};

/// Outcome of verifying a theorem on one instance. The theorem itself is
/// never reported as violated: only its sub-checks are. Premises that pass
/// together with a conclusion that fails set falsification_flag.
struct TheoremReport {
  std::string theorem_id;
  std::vector<SubCheck> checks;
  std::vector<Implication> implications;
  Verdict conclusion_verdict = Verdict::inconclusive("not settled");
  bool falsification_flag = false;
  std::vector<Witness> witnesses;
  std::string notes;

  SubCheck& add(std::string name, Role role, Verdict v) {
    checks.push_back({std::move(name), role, std::move(v)});
    return checks.back();
  }
  const SubCheck* find(std::string_view name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
  std::vector<std::pair<std::string, Verdict>> hypothesis_verdicts() const {
    std::vector<std::pair<std::string, Verdict>> out;
    for (const auto& c : checks)
      if (c.role == Role::hypothesis) out.emplace_back(c.name, c.verdict);
    return out;
  }
  bool hypotheses_pass() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const SubCheck& c) { return c.role != Role::hypothesis || c.verdict.ok(); });
  }
  void note(const std::string& text) {
    if (!notes.empty()) notes += "; ";
    notes += text;
  }
};

/// Evaluates every implication and derives conclusion_verdict.
inline void settle(TheoremReport& r) {
  auto outcome_of = [&r](const std::string& name) {
    const auto* c = r.find(name);
    return c ? c->verdict.outcome : Outcome::inconclusive;
  };
  Outcome overall = Outcome::consistent_with;
  std::string reason;
  double residual = 0.0;
  r.falsification_flag = false;
  for (auto& imp : r.implications) {
    bool premises_ok = true;
    for (const auto& p : imp.premises) premises_ok &= outcome_of(p) == Outcome::consistent_with;
    Outcome concl = Outcome::consistent_with;
    for (const auto& c : imp.conclusions) {
      concl = conjoin(concl, outcome_of(c));
      if (const auto* sc = r.find(c)) residual = std::max(residual, sc->verdict.residual);
    }
    if (!premises_ok) {
      imp.outcome = Outcome::inconclusive;
      if (!reason.empty()) reason += "; ";
      reason += imp.label + ": premises not established";
    } else if (concl == Outcome::violated) {
      imp.outcome = Outcome::inconclusive;
      r.falsification_flag = true;
      if (!reason.empty()) reason += "; ";
      reason += imp.label + ": FALSIFICATION PATTERN (premises pass, conclusion fails)";
    } else {
      imp.outcome = concl;
      if (concl == Outcome::inconclusive) {
        if (!reason.empty()) reason += "; ";
        reason += imp.label + ": conclusion inconclusive";
      }
    }
    overall = conjoin(overall, imp.outcome);
  }
  if (r.implications.empty()) overall = Outcome::inconclusive, reason = "no implications";
  if (overall == Outcome::consistent_with) {
    r.conclusion_verdict = Verdict::consistent(residual);
  } else {
    r.conclusion_verdict = Verdict::inconclusive(reason);
    r.conclusion_verdict.residual = residual;
  }
  r.witnesses.clear();
  for (const auto& c : r.checks)
    if (c.verdict.witness) r.witnesses.push_back(*c.verdict.witness);
}

}  // namespace hadamard

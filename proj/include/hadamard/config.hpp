#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hadamard/convergence.hpp"
#include "hadamard/descriptor.hpp"

// Experiment configs: line-oriented sections with key=value pairs.
//
//   [experiment]
//   seed=7
//   output=out
//   tol_seq=0.01
//   [space]
//   kind=euclidean,dim=1
//   [functional abs]
//   f=dist,anchor=(0)
//   [sequence shifted]
//   family=shifted_abs
//   [suite]
//   prox f=abs x=2 lambda=1
//   theorem_verify mainthm sequence=shifted candidate=abs
//
// Indented lines continue the previous line. '#' starts a comment.

namespace hadamard {

struct ConfigIssue {
  int line = 0;
  std::string message;
};

class ConfigError : public UsageError {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues) : UsageError(render(issues)), issues_(std::move(issues)) {}
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  static std::string render(const std::vector<ConfigIssue>& issues) {
    std::string s;
    for (const auto& i : issues) s += (s.empty() ? "" : "\n") + ("line " + std::to_string(i.line) + ": " + i.message);
    return s;
  }
  std::vector<ConfigIssue> issues_;
};

struct SuiteEntry {
  std::string op;
  KeyValues params;
  int line = 0;

  std::optional<std::string> get(std::string_view key) const { return lookup(params, key); }
  friend bool operator==(const SuiteEntry& a, const SuiteEntry& b) { return a.op == b.op && a.params == b.params; }
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string output = "out";
  std::map<std::string, double> tolerances;  // overrides: tol_seq, n_min, n_max, stride, tol_min, tol_point
  Space space = Space::euclidean(1);
  std::vector<std::pair<std::string, ConvexFunctional>> functionals;
  std::vector<std::pair<std::string, SequenceSpec>> sequences;
  std::vector<SuiteEntry> suite;
  std::string source;  // bytes the config was parsed from (not part of equality)

  const ConvexFunctional* functional(std::string_view name) const {
    for (const auto& [n, f] : functionals)
      if (n == name) return &f;
    return nullptr;
  }
  const SequenceSpec* sequence(std::string_view name) const {
    for (const auto& [n, s] : sequences)
      if (n == name) return &s;
    return nullptr;
  }

  friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    if (a.seed != b.seed || a.output != b.output || a.tolerances != b.tolerances || !(a.space == b.space) ||
        a.suite != b.suite || a.functionals.size() != b.functionals.size() || a.sequences.size() != b.sequences.size())
      return false;
    for (std::size_t i = 0; i < a.functionals.size(); ++i)
      if (a.functionals[i].first != b.functionals[i].first ||
          a.functionals[i].second.descriptor() != b.functionals[i].second.descriptor())
        return false;
    for (std::size_t i = 0; i < a.sequences.size(); ++i)
      if (a.sequences[i].first != b.sequences[i].first ||
          a.sequences[i].second.descriptor != b.sequences[i].second.descriptor)
        return false;
    return true;
  }
};

// ---------------------------------------------------------------- operations

struct OpInfo {
  std::string_view name;
  std::string_view positional;  // key filled by a bare first argument, if any
  std::vector<std::string_view> required;
  std::vector<std::string_view> optional;
};

inline const std::vector<OpInfo>& known_ops() {
  static const std::vector<std::string_view> seq_keys{"family", "sequence", "candidate", "points", "lambdas"};
  auto with = [](std::vector<std::string_view> a, const std::vector<std::string_view>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  static const std::vector<OpInfo> ops{
      {"prox", "", {"f", "x"}, {"lambda", "tol_min", "tol_point"}},
      {"envelope", "", {"f", "x"}, {"lambda", "tol_min", "tol_point"}},
      {"slope", "", {"f", "x"}, {}},
      {"convexity_check", "", {"f"}, {"mu", "samples"}},
      {"directional_derivative", "", {"f", "x", "toward"}, {"side"}},
      {"comparison_check", "", {"p", "q", "r"}, {"samples"}},
      {"verify_prox_lemmas", "", {"f", "x"}, {"lambdas"}},
      {"limit_mode_check", "mode", {"mode"}, seq_keys},
      {"mosco_check", "", {}, seq_keys},
      {"gamma_check", "", {}, seq_keys},
      {"theorem_verify", "id", {"id"}, with(seq_keys, {"x0", "lambda"})},
      {"set_mosco_check", "", {"family"}, {"limit", "points", "lambdas"}},
      {"asymptotic_slope_check", "", {}, seq_keys},
      {"sufficient_condition_check", "", {}, seq_keys},
      {"normalization_check", "", {"x0"}, with(seq_keys, {"lambda"})},
      {"equi_lipschitz_check", "", {"x0", "region"}, with(seq_keys, {"lambda", "samples"})},
  };
  return ops;
}

inline const OpInfo* find_op(std::string_view name) {
  for (const auto& op : known_ops())
    if (op.name == name) return &op;
  return nullptr;
}

inline std::string op_list() {
  std::string s;
  for (const auto& op : known_ops()) s += (s.empty() ? "" : ", ") + std::string(op.name);
  return s;
}

// ---------------------------------------------------------------- resolution

/// f=NAME refers to a [functional NAME] section; f=[descriptor] is inline;
/// any other bare word is a parameterless kind (f=abs, f=zero).
inline ConvexFunctional resolve_functional(const ExperimentConfig& cfg, std::string_view value) {
  const std::string v = detail::trim(value);
  if (!v.empty() && v.front() == '[') return parse_functional(cfg.space, v);
  if (const auto* f = cfg.functional(v)) return *f;
  return parse_functional(cfg.space, "f=" + v);
}

inline SequenceSpec resolve_sequence(const ExperimentConfig& cfg, const SuiteEntry& e) {
  if (auto name = e.get("sequence")) {
    const auto* s = cfg.sequence(*name);
    if (!s) throw UsageError("unknown sequence '" + *name + "'");
    return *s;
  }
  if (auto fam = e.get("family")) return parse_sequence(cfg.space, "family=" + *fam);
  throw UsageError(e.op + " needs sequence=NAME or family=NAME");
}

/// Candidate limit: candidate= (or the sequence's known limit).
inline ConvexFunctional resolve_limit(const ExperimentConfig& cfg, const SuiteEntry& e, const SequenceSpec& s) {
  if (auto c = e.get("candidate")) return resolve_functional(cfg, *c);
  if (s.limit) return *s.limit;
  throw UsageError(e.op + " needs candidate= for a sequence without a known limit");
}

inline std::vector<Point> resolve_points(const Space& s, std::string_view value) {
  std::vector<Point> out;
  for (const auto& item : detail::split_top(detail::unwrap(value, '[', ']'), ';')) out.push_back(parse_point(s, item));
  return out;
}

inline double resolve_number(const SuiteEntry& e, std::string_view key, double fallback) {
  auto v = e.get(key);
  return v ? detail::parse_number(*v, key) : fallback;
}

/// ModeSpec from the experiment overrides and the entry's points/lambdas.
inline ModeSpec resolve_mode_spec(const ExperimentConfig& cfg, const SuiteEntry& e, std::uint64_t seed) {
  ModeSpec spec;
  auto tol = [&](const char* k, auto& field) {
    auto it = cfg.tolerances.find(k);
    if (it != cfg.tolerances.end()) field = static_cast<std::decay_t<decltype(field)>>(it->second);
  };
  tol("tol_seq", spec.tail.tol);
  tol("n_min", spec.tail.n_min);
  tol("n_max", spec.tail.n_max);
  tol("stride", spec.tail.stride);
  tol("tol_min", spec.prox.tol_min);
  tol("tol_point", spec.prox.tol_point);
  spec.prox.seed = seed;
  spec.slope.seed = seed;
  if (auto p = e.get("points")) spec.points = resolve_points(cfg.space, *p);
  else if (cfg.space == Space::euclidean(1)) spec.points = families::default_grid();
  else spec.points = {reference_point(cfg.space)};
  if (auto l = e.get("lambdas")) spec.lambdas = detail::parse_numbers(*l, "lambdas");
  spec.tail.validate();
  spec.prox.validate();
  return spec;
}

namespace detail {

/// Resolves every reference of an entry so errors surface at parse time.
inline void check_entry(const ExperimentConfig& cfg, const SuiteEntry& e) {
  const OpInfo* op = find_op(e.op);
  if (!op) throw UsageError("unknown suite op '" + e.op + "' (valid ops: " + op_list() + ")");
  for (const auto& [k, v] : e.params) {
    bool ok = false;
    for (auto r : op->required) ok |= (k == r);
    for (auto r : op->optional) ok |= (k == r);
    if (!ok) throw UsageError("op " + e.op + " does not take '" + k + "'");
  }
  for (auto r : op->required)
    if (!e.get(r)) throw UsageError("op " + e.op + " is missing required key '" + std::string(r) + "'");
  for (const char* k : {"f"})
    if (auto v = e.get(k)) resolve_functional(cfg, *v);
  for (const char* k : {"x", "x0", "toward", "p", "q", "r"})
    if (auto v = e.get(k)) parse_point(cfg.space, *v);
  if (auto v = e.get("points")) resolve_points(cfg.space, *v);
  if (auto v = e.get("lambdas")) parse_numbers(*v, "lambdas");
  for (const char* k : {"lambda", "mu", "samples", "tol_min", "tol_point"})
    if (auto v = e.get(k)) parse_number(*v, k);
  if (auto v = e.get("region")) parse_region(cfg.space, *v);
  if (e.op == "theorem_verify") {
    const auto id = *e.get("id");
    static const std::set<std::string> ids{"thm1", "thm2", "mainthm", "bacak_fwd", "bacak2_bwd", "attouch_hadamard"};
    if (!ids.count(id))
      throw UsageError("unknown theorem id '" + id + "' (thm1, thm2, mainthm, bacak_fwd, bacak2_bwd, attouch_hadamard)");
  }
  if (e.op == "limit_mode_check") parse_mode(*e.get("mode"));
  if (e.op == "set_mosco_check") {
    auto rf = families::region_family(*e.get("family"));
    if (auto v = e.get("limit")) parse_region(rf.seq.space, *v);
    return;
  }
  const bool seq_op = std::find(op->optional.begin(), op->optional.end(), std::string_view("family")) != op->optional.end();
  if (seq_op) {
    const auto s = resolve_sequence(cfg, e);
    resolve_limit(cfg, e, s);
  }
}

/// Whitespace-separated tokens, keeping bracketed groups whole.
inline std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : line) {
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') --depth;
    if ((c == ' ' || c == '\t') && depth <= 0) {
      if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
      continue;
    }
    cur += c;
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace detail

inline SuiteEntry parse_suite_line(std::string_view text, int line) {
  const auto tokens = detail::tokenize(text);
  SuiteEntry e;
  e.line = line;
  e.op = tokens.at(0);
  const OpInfo* op = find_op(e.op);
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const auto eq = tokens[i].find('=');
    if (eq == std::string::npos) {
      if (i == 1 && op && !op->positional.empty()) {
        e.params.emplace_back(std::string(op->positional), tokens[i]);
        continue;
      }
      throw UsageError("expected key=value, got '" + tokens[i] + "'");
    }
    e.params.emplace_back(tokens[i].substr(0, eq), tokens[i].substr(eq + 1));
  }
  return e;
}

// ---------------------------------------------------------------- parse / print

inline ExperimentConfig parse_config(std::string_view text) {
  struct Line {
    int number;
    std::string text;
    bool header;
  };
  std::vector<ConfigIssue> issues;
  std::vector<Line> lines;
  {
    std::istringstream in{std::string(text)};
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
      ++number;
      if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
      if (detail::trim(raw).empty()) continue;
      const bool indented = raw[0] == ' ' || raw[0] == '\t';
      const std::string t = detail::trim(raw);
      if (indented && !lines.empty() && !lines.back().header) {
        lines.back().text += " " + t;
        continue;
      }
      lines.push_back({number, t, t.front() == '['});
    }
  }

  ExperimentConfig cfg;
  std::string section;
  std::string name;
  bool have_space = false;
  std::set<std::string> seen_sections;
  std::vector<std::tuple<int, std::string, std::string, std::string>> named;  // line, section, name, body
  std::vector<std::pair<int, std::string>> suite_lines;

  for (const auto& ln : lines) {
    if (ln.header) {
      if (ln.text.back() != ']') {
        issues.push_back({ln.number, "unterminated section header"});
        continue;
      }
      const std::string inner = detail::trim(std::string_view(ln.text).substr(1, ln.text.size() - 2));
      const auto sp = inner.find(' ');
      section = inner.substr(0, sp);
      name = sp == std::string::npos ? "" : detail::trim(std::string_view(inner).substr(sp));
      if (section != "experiment" && section != "space" && section != "functional" && section != "sequence" &&
          section != "suite") {
        issues.push_back({ln.number, "unknown section [" + section + "] (experiment, space, functional, sequence, suite)"});
        section = "?";
      } else if ((section == "functional" || section == "sequence") && name.empty()) {
        issues.push_back({ln.number, "[" + section + "] needs a name"});
        section = "?";
      } else if (!seen_sections.insert(section + " " + name).second) {
        issues.push_back({ln.number, "duplicate section [" + inner + "]"});
        section = "?";
      } else if (section == "functional" || section == "sequence") {
        named.emplace_back(ln.number, section, name, "");
      }
      continue;
    }
    try {
      if (section == "experiment") {
        const auto eq = ln.text.find('=');
        if (eq == std::string::npos) throw UsageError("expected key=value");
        const std::string k = detail::trim(std::string_view(ln.text).substr(0, eq));
        const std::string v = detail::trim(std::string_view(ln.text).substr(eq + 1));
        if (k == "seed") {
          const long s = detail::parse_integer(v, "seed");
          if (s < 0) throw UsageError("seed must be >= 0");
          cfg.seed = static_cast<std::uint64_t>(s);
        } else if (k == "output") {
          if (v.empty()) throw UsageError("output must be nonempty");
          cfg.output = v;
        } else if (k == "tol_seq" || k == "tol_min" || k == "tol_point") {
          const double d = detail::parse_number(v, k);
          if (!(d > 0.0)) throw UsageError(k + " must be > 0");
          cfg.tolerances[k] = d;
        } else if (k == "n_min" || k == "n_max" || k == "stride") {
          const long n = detail::parse_integer(v, k);
          if (n < 1) throw UsageError(k + " must be >= 1");
          cfg.tolerances[k] = static_cast<double>(n);
        } else {
          throw UsageError("unknown experiment key '" + k + "' (seed, output, tol_seq, n_min, n_max, stride, tol_min, tol_point)");
        }
      } else if (section == "space") {
        if (have_space) throw UsageError("[space] takes a single descriptor");
        cfg.space = parse_space(ln.text);
        have_space = true;
      } else if (section == "functional" || section == "sequence") {
        auto& body = std::get<3>(named.back());
        if (!body.empty()) throw UsageError("[" + section + " " + name + "] takes a single descriptor");
        body = ln.text;
      } else if (section == "suite") {
        suite_lines.emplace_back(ln.number, ln.text);
      } else if (section.empty()) {
        throw UsageError("content outside any section");
      }
    } catch (const std::exception& ex) {
      issues.push_back({ln.number, ex.what()});
    }
  }
  if (!have_space && issues.empty()) issues.push_back({1, "missing required section [space]"});
  if (cfg.tolerances.count("n_min") || cfg.tolerances.count("n_max")) {
    TailWindow w;
    if (cfg.tolerances.count("n_min")) w.n_min = static_cast<int>(cfg.tolerances["n_min"]);
    if (cfg.tolerances.count("n_max")) w.n_max = static_cast<int>(cfg.tolerances["n_max"]);
    if (!(w.n_min < w.n_max)) issues.push_back({1, "n_min must be < n_max"});
  }

  for (const auto& [line, sec, nm, body] : named) {
    try {
      if (body.empty()) throw UsageError("[" + sec + " " + nm + "] is empty");
      if (sec == "functional") cfg.functionals.emplace_back(nm, parse_functional(cfg.space, body));
      else cfg.sequences.emplace_back(nm, parse_sequence(cfg.space, body));
    } catch (const std::exception& ex) {
      issues.push_back({line, ex.what()});
    }
  }
  for (const auto& [line, body] : suite_lines) {
    try {
      auto e = parse_suite_line(body, line);
      detail::check_entry(cfg, e);
      cfg.suite.push_back(std::move(e));
    } catch (const std::exception& ex) {
      issues.push_back({line, ex.what()});
    }
  }
  if (!issues.empty()) throw ConfigError(std::move(issues));
  cfg.source = std::string(text);
  return cfg;
}

inline std::string print_config(const ExperimentConfig& cfg) {
  std::string s = "[experiment]\nseed=" + std::to_string(cfg.seed) + "\noutput=" + cfg.output + "\n";
  for (const auto& [k, v] : cfg.tolerances) {
    const bool integral = k == "n_min" || k == "n_max" || k == "stride";
    s += k + "=" + (integral ? std::to_string(static_cast<long>(v)) : format_real(v)) + "\n";
  }
  s += "\n[space]\n" + space_descriptor(cfg.space) + "\n";
  for (const auto& [n, f] : cfg.functionals) s += "\n[functional " + n + "]\n" + f.descriptor() + "\n";
  for (const auto& [n, q] : cfg.sequences) s += "\n[sequence " + n + "]\n" + q.descriptor + "\n";
  s += "\n[suite]\n";
  for (const auto& e : cfg.suite) {
    s += e.op;
    for (const auto& [k, v] : e.params) s += " " + k + "=" + v;
    s += "\n";
  }
  return s;
}

}  // namespace hadamard

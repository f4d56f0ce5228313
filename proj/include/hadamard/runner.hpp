#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "hadamard/config.hpp"
#include "hadamard/convergence_lemmas.hpp"
#include "hadamard/convexity.hpp"
#include "hadamard/metric_checks.hpp"
#include "hadamard/prox_lemmas.hpp"
#include "hadamard/set_mosco.hpp"
#include "hadamard/slope_profile.hpp"
#include "hadamard/theorems.hpp"

namespace hadamard {

inline constexpr const char* kVersion = "hadamard 0.1.0";

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

struct EntryResult {
  int index = 0;
  std::string op;
  std::string label;  // op with its parameters, for the markdown summary
  std::optional<Verdict> verdict;
  std::optional<TheoremReport> report;
  std::string sub_check;  // row name for plain verdicts
  std::string error;
  double runtime_ms = 0.0;

  bool failed() const { return !error.empty(); }
};

struct RunReport {
  std::vector<EntryResult> entries;
  std::string version = kVersion;
  std::string digest;
  std::uint64_t seed = 0;
  double total_ms = 0.0;

  /// 0 all ConsistentWith; 1 any Violated (or falsification flag);
  /// 2 any Inconclusive or entry error.
  int exit_code() const {
    bool violated = false, unsure = false;
    auto see = [&](const Verdict& v) {
      violated |= v.outcome == Outcome::violated;
      unsure |= v.outcome == Outcome::inconclusive;
    };
    for (const auto& e : entries) {
      if (e.failed()) unsure = true;
      if (e.verdict) see(*e.verdict);
      if (e.report) {
        for (const auto& c : e.report->checks) see(c.verdict);
        violated |= e.report->falsification_flag;
      }
    }
    return violated ? 1 : unsure ? 2 : 0;
  }
};

namespace detail {

inline std::string entry_label(const SuiteEntry& e) {
  std::string s = e.op;
  for (const auto& [k, v] : e.params) s += " " + k + "=" + v;
  return s;
}

inline ProxParams entry_prox(const ExperimentConfig& cfg, const SuiteEntry& e, std::uint64_t seed) {
  ProxParams p;
  if (auto it = cfg.tolerances.find("tol_min"); it != cfg.tolerances.end()) p.tol_min = it->second;
  if (auto it = cfg.tolerances.find("tol_point"); it != cfg.tolerances.end()) p.tol_point = it->second;
  p.lambda = resolve_number(e, "lambda", 1.0);
  p.tol_min = resolve_number(e, "tol_min", p.tol_min);
  p.tol_point = resolve_number(e, "tol_point", p.tol_point);
  p.seed = seed;
  p.validate();
  return p;
}

/// (lambda, f_lambda(x)) over a small grid that includes lambda itself.
inline Series envelope_series(const ConvexFunctional& f, const Point& x, ProxParams p) {
  std::set<double> grid{0.01, 0.1, 0.5, 1.0, 2.0, p.lambda};
  Series s{"envelope at " + x.to_string(), "lambda", "f_lambda", {}};
  for (double l : grid) {
    p.lambda = l;
    s.data.emplace_back(l, moreau_envelope(f, x, p).value());
  }
  return s;
}

inline void execute(const ExperimentConfig& cfg, const SuiteEntry& e, std::uint64_t seed, EntryResult& out) {
  const Space& S = cfg.space;
  auto point = [&](const char* k) { return parse_point(S, *e.get(k)); };
  auto func = [&] { return resolve_functional(cfg, *e.get("f")); };
  out.sub_check = e.op;

  if (e.op == "prox" || e.op == "envelope") {
    const auto f = func();
    const Point x = point("x");
    const auto p = entry_prox(cfg, e, seed);
    const auto r = prox(f, x, p);
    Verdict v = r.converged ? Verdict::consistent(r.objective_residual)
                            : Verdict::inconclusive("prox solver did not certify the minimizer");
    v.residual = r.objective_residual;
    v.witness = Witness{r.minimizer.to_string(), p.lambda, -1, r.objective_residual, "minimizer"};
    v.set_metric("envelope", r.envelope.value());
    v.set_metric("iterations", r.iterations);
    v.series.push_back(envelope_series(f, x, p));
    out.verdict = std::move(v);
  } else if (e.op == "slope") {
    SlopeBudget b;
    b.seed = seed;
    const auto s = slope(func(), point("x"), b);
    Verdict v = s.inconclusive ? Verdict::inconclusive("slope estimate did not settle") : Verdict::consistent(0.0);
    v.set_metric("slope", s.value);
    if (s.witness) v.witness = Witness{s.witness->to_string(), std::nan(""), -1, 0.0, "steepest descent sample"};
    out.verdict = std::move(v);
  } else if (e.op == "convexity_check") {
    out.verdict = convexity_check(func(), resolve_number(e, "mu", 0.0),
                                  static_cast<int>(resolve_number(e, "samples", 200)), seed);
  } else if (e.op == "directional_derivative") {
    const auto f = func();
    const Point x = point("x");
    const GeodesicSegment g(x, point("toward"));
    const double lo = directional_derivative(f, x, g, Side::lower);
    const double hi = directional_derivative(f, x, g, Side::upper);
    Verdict v = Verdict::consistent(std::isfinite(lo) && std::isfinite(hi) ? std::abs(hi - lo) : 0.0);
    const auto side = e.get("side").value_or("lower");
    if (side != "lower" && side != "upper") throw UsageError("side must be lower or upper");
    v.set_metric("derivative", side == "upper" ? hi : lo);
    out.verdict = std::move(v);
  } else if (e.op == "comparison_check") {
    out.verdict = cat0_comparison_check(point("p"), point("q"), point("r"),
                                        static_cast<int>(resolve_number(e, "samples", 64)), seed);
  } else if (e.op == "verify_prox_lemmas") {
    std::vector<double> lams{1.0, 0.5, 0.1, 0.01, 1e-4};
    if (auto l = e.get("lambdas")) lams = parse_numbers(*l, "lambdas");
    ProxParams p = entry_prox(cfg, e, seed);
    SlopeBudget b;
    b.seed = seed;
    out.report = verify_prox_lemmas(func(), point("x"), lams, p, b);
  } else if (e.op == "set_mosco_check") {
    const auto rf = families::region_family(*e.get("family"));
    std::optional<Region> limit;
    if (auto l = e.get("limit")) limit = parse_region(rf.seq.space, *l);
    ExperimentConfig c1 = cfg;
    c1.space = rf.seq.space;
    ModeSpec spec = resolve_mode_spec(c1, e, seed);
    if (!e.get("points")) spec.points.clear();
    out.verdict = set_mosco_check(rf.seq, limit, spec);
  } else {
    const auto s = resolve_sequence(cfg, e);
    const auto f = resolve_limit(cfg, e, s);
    ModeSpec spec = resolve_mode_spec(cfg, e, seed);
    if (e.op == "limit_mode_check") {
      spec.mode = parse_mode(*e.get("mode"));
      out.sub_check = std::string(to_string(spec.mode));
      out.verdict = limit_mode_check(s.seq, f, spec);
    } else if (e.op == "mosco_check") {
      out.sub_check = "mosco";
      out.verdict = mosco_check(s.seq, f, spec);
    } else if (e.op == "gamma_check") {
      out.sub_check = "gamma";
      out.verdict = gamma_check(s.seq, f, spec);
    } else if (e.op == "theorem_verify") {
      TheoremExtras ex;
      if (e.get("x0")) ex.x0 = point("x0");
      if (e.get("lambda")) ex.lambda = resolve_number(e, "lambda", 1.0);
      out.report = theorem_verify(*e.get("id"), s.seq, f, spec, ex);
    } else if (e.op == "asymptotic_slope_check") {
      out.sub_check = "A_H";
      out.verdict = asymptotic_slope_check(s.seq, spec.points, spec).verdict();
    } else if (e.op == "sufficient_condition_check") {
      RatioBudget b;
      b.seed = seed;
      out.report = sufficient_condition_check(s.seq, f, spec.points, spec, b);
    } else if (e.op == "normalization_check") {
      out.verdict = normalization_check(s.seq, f, point("x0"), resolve_number(e, "lambda", 1.0), spec);
    } else if (e.op == "equi_lipschitz_check") {
      out.verdict = equi_lipschitz_check(s.seq, resolve_number(e, "lambda", 1.0), point("x0"),
                                         parse_region(S, *e.get("region")),
                                         static_cast<int>(resolve_number(e, "samples", 16)), spec);
    } else {
      throw UsageError("unknown suite op '" + e.op + "' (valid ops: " + op_list() + ")");
    }
  }
}

}  // namespace detail

inline std::string config_digest(const ExperimentConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(cfg.source.empty() ? print_config(cfg) : cfg.source)));
  return buf;
}

/// Runs the suite in order. Entry i draws its randomness from seed + i;
/// entry failures are recorded and the run continues.
inline RunReport run_suite(const ExperimentConfig& cfg) {
  RunReport r;
  r.digest = config_digest(cfg);
  r.seed = cfg.seed;
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < cfg.suite.size(); ++i) {
    const auto& e = cfg.suite[i];
    EntryResult out;
    out.index = static_cast<int>(i) + 1;
    out.op = e.op;
    out.label = detail::entry_label(e);
    const auto s0 = std::chrono::steady_clock::now();
    try {
      detail::execute(cfg, e, cfg.seed + i, out);
    } catch (const std::exception& ex) {
      out.error = ex.what();
    }
    out.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - s0).count();
    r.entries.push_back(std::move(out));
  }
  r.total_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// ---------------------------------------------------------------- output

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

inline std::string csv_real(double v) { return std::isnan(v) ? std::string() : format_real(v); }

inline std::string csv_row(const EntryResult& e, const std::string& theorem, const std::string& sub, const Verdict& v) {
  std::string w_x, w_l, w_n;
  if (v.witness) {
    w_x = v.witness->point;
    w_l = csv_real(v.witness->lambda);
    if (v.witness->n >= 0) w_n = std::to_string(v.witness->n);
  }
  return std::to_string(e.index) + "," + csv_field(e.op) + "," + csv_field(theorem) + "," + csv_field(sub) + "," +
         std::string(to_string(v.outcome)) + "," + csv_field(w_x) + "," + w_l + "," + w_n + "," + csv_real(v.residual) +
         ",\n";
}

}  // namespace detail

inline constexpr const char* kCsvHeader =
    "suite_entry,operation,theorem_id,sub_check,verdict,witness_x,witness_lambda,witness_n,residual,runtime_ms\n";

/// One row per sub-check. runtime_ms stays empty so the file is a pure
/// function of the config; timings go to metadata.json.
inline std::string render_csv(const RunReport& r) {
  std::string s = kCsvHeader;
  for (const auto& e : r.entries) {
    if (e.failed()) {
      s += std::to_string(e.index) + "," + detail::csv_field(e.op) + ",," + detail::csv_field(e.sub_check) +
           ",Error," + detail::csv_field(e.error) + ",,,,\n";
      continue;
    }
    if (e.verdict) s += detail::csv_row(e, "", e.sub_check, *e.verdict);
    if (e.report) {
      for (const auto& c : e.report->checks) s += detail::csv_row(e, e.report->theorem_id, c.name, c.verdict);
      if (e.report->falsification_flag) {
        Verdict v;
        v.outcome = Outcome::violated;
        s += detail::csv_row(e, e.report->theorem_id, "falsification_flag", v);
      }
    }
  }
  return s;
}

inline std::string render_markdown(const RunReport& r) {
  std::string s = "# Run report\n\n";
  for (const auto& e : r.entries) {
    s += "## " + std::to_string(e.index) + ". `" + e.label + "`\n\n";
    if (e.failed()) {
      s += "Error: " + e.error + "\n\n";
      continue;
    }
    auto line = [](const std::string& name, const Verdict& v) {
      std::string t = "| " + name + " | " + std::string(to_string(v.outcome)) + " | " + format_real(v.residual) + " | ";
      std::string note = v.reason;
      for (const auto& [k, m] : v.metrics) note += (note.empty() ? "" : "; ") + k + "=" + format_real(m);
      if (v.witness) note += (note.empty() ? "" : "; ") + ("witness " + v.witness->point);
      return t + note + " |\n";
    };
    const std::string head = "| check | verdict | residual | notes |\n|---|---|---|---|\n";
    if (e.verdict) s += head + line(e.sub_check, *e.verdict) + "\n";
    if (e.report) {
      const auto& rep = *e.report;
      s += "Theorem `" + rep.theorem_id + "`: conclusion " + std::string(to_string(rep.conclusion_verdict.outcome)) +
           (rep.falsification_flag ? " **FALSIFICATION FLAG**" : "") + "\n\n" + head;
      for (const auto& c : rep.checks) s += line(c.name + " (" + std::string(to_string(c.role)) + ")", c.verdict);
      s += "\n";
      for (const auto& imp : rep.implications)
        s += "- " + imp.label + ": " + std::string(to_string(imp.outcome)) + "\n";
      if (!rep.notes.empty()) s += "\nNotes: " + rep.notes + "\n";
      s += "\n";
    }
  }
  return s;
}

/// Blocks of two-column data separated by two blank lines (gnuplot
/// `index` layout), each headed by comment lines naming the series.
inline std::string render_plotdata(const RunReport& r) {
  std::string s;
  auto emit = [&](const EntryResult& e, const std::string& check, const Series& ser) {
    s += "# entry " + std::to_string(e.index) + " " + e.op + " " + check + ": " + ser.name + "\n";
    s += "# " + ser.x_label + " " + ser.y_label + "\n";
    for (const auto& [x, y] : ser.data) s += format_real(x) + " " + format_real(y) + "\n";
    s += "\n\n";
  };
  for (const auto& e : r.entries) {
    if (e.verdict)
      for (const auto& ser : e.verdict->series) emit(e, e.sub_check, ser);
    if (e.report)
      for (const auto& c : e.report->checks)
        for (const auto& ser : c.verdict.series) emit(e, c.name, ser);
  }
  return s;
}

inline std::string render_metadata(const RunReport& r) {
  nlohmann::ordered_json j;
  j["version"] = r.version;
  j["config_digest"] = r.digest;
  j["seed"] = r.seed;
  j["total_ms"] = r.total_ms;
  j["exit_code"] = r.exit_code();
  j["entries"] = nlohmann::json::array();
  for (const auto& e : r.entries)
    j["entries"].push_back({{"suite_entry", e.index}, {"operation", e.op}, {"runtime_ms", e.runtime_ms}});
  return j.dump(2) + "\n";
}

inline std::set<std::string> parse_formats(std::string_view list) {
  std::set<std::string> out;
  for (const auto& f : detail::split_top(list, ',')) {
    if (f.empty()) continue;
    if (f != "csv" && f != "markdown" && f != "plotdata")
      throw UsageError("unknown format '" + f + "' (csv, markdown, plotdata)");
    out.insert(f);
  }
  return out;
}

/// Writes report.csv / report.md / plotdata.dat (as requested) and
/// metadata.json into `dir`.
inline void emit_report(const RunReport& r, const std::set<std::string>& formats, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  auto write = [&](const char* name, const std::string& body) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << body;
    if (!out) throw std::runtime_error("write failed for " + (dir / name).string());
  };
  if (formats.count("csv")) write("report.csv", render_csv(r));
  if (formats.count("markdown")) write("report.md", render_markdown(r));
  if (formats.count("plotdata")) write("plotdata.dat", render_plotdata(r));
  write("metadata.json", render_metadata(r));
}

/// The counterexample suite: f^n alternating between 1 and 0 against the
/// zero limit.
inline constexpr const char* kCounterexampleConfig = R"([experiment]
seed=0
output=out

[space]
kind=euclidean,dim=1

[sequence oscillating]
family=oscillating

[suite]
limit_mode_check prox sequence=oscillating candidate=zero
limit_mode_check envelope sequence=oscillating candidate=zero
mosco_check sequence=oscillating candidate=zero
)";

}  // namespace hadamard

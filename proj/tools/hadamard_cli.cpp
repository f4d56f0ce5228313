#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hadamard/hadamard.hpp"

using namespace hadamard;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol_seq;
  std::string format = "csv,markdown,plotdata";
  std::string space = "kind=euclidean,dim=1";
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig base_config(const Options& o) {
  if (!o.config.empty()) return parse_config(read_file(o.config));
  return parse_config("[space]\n" + o.space + "\n");
}

/// Applies overrides, runs, prints the markdown summary and writes the
/// report files when an output directory is known.
int execute(ExperimentConfig cfg, const Options& o, bool write_default) {
  if (o.seed) cfg.seed = *o.seed;
  if (o.tol_seq) {
    if (!(*o.tol_seq > 0.0)) throw UsageError("--tol-seq must be > 0");
    cfg.tolerances["tol_seq"] = *o.tol_seq;
  }
  const auto formats = parse_formats(o.format);
  const RunReport r = run_suite(cfg);
  std::cout << render_markdown(r);
  const std::string dir = !o.out.empty() ? o.out : write_default ? cfg.output : "";
  if (!dir.empty()) emit_report(r, formats, dir);
  return r.exit_code();
}

/// Replaces the suite of the base config by one entry given as a suite line.
int single(const Options& o, const std::string& line) {
  ExperimentConfig cfg = base_config(o);
  auto e = parse_suite_line(line, 0);
  detail::check_entry(cfg, e);
  cfg.suite = {e};
  cfg.source = print_config(cfg);
  return execute(cfg, o, false);
}

std::string bracket(const std::string& v) {
  if (v.find('=') != std::string::npos && (v.empty() || v.front() != '[')) return "[" + v + "]";
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geodesic convex analysis on Hadamard model spaces"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config, "experiment config (named functionals and sequences)");
  app.add_option("--out", o.out, "output directory for report files");
  app.add_option("--seed", o.seed, "random seed");
  app.add_option("--tol-seq", o.tol_seq, "tail tolerance for sequence checks");
  app.add_option("--format", o.format, "comma-separated subset of csv,markdown,plotdata");
  app.add_option("--space", o.space, "space descriptor when no config is given");

  std::string f = "abs", x = "2", toward, family = "shifted_abs", candidate, sequence, theorem, config_path, demo;
  double lambda = 1.0;

  auto add_fx = [&](CLI::App* c) {
    c->add_option("-f,--functional", f, "functional name or descriptor");
    c->add_option("-x,--point", x, "point coordinates, e.g. 2 or (1,0.5)");
  };
  auto* c_prox = app.add_subcommand("prox", "proximal point J_lambda x");
  add_fx(c_prox);
  c_prox->add_option("-l,--lambda", lambda, "step lambda > 0");
  auto* c_env = app.add_subcommand("envelope", "Moreau envelope f_lambda(x)");
  add_fx(c_env);
  c_env->add_option("-l,--lambda", lambda, "step lambda > 0");
  auto* c_slope = app.add_subcommand("slope", "metric slope |df|(x)");
  add_fx(c_slope);

  auto* c_verify = app.add_subcommand("verify", "check one theorem on a sequence");
  c_verify->add_option("theorem_id", theorem, "thm1, thm2, mainthm, bacak_fwd, bacak2_bwd, attouch_hadamard")->required();
  c_verify->add_option("--family", family, "built-in family name");
  c_verify->add_option("--sequence", sequence, "named sequence from --config");
  c_verify->add_option("--candidate", candidate, "limit functional (default: the family's limit)");

  auto* c_run = app.add_subcommand("run", "run an experiment config");
  c_run->add_option("config", config_path, "config path (or --config)");

  auto* c_demo = app.add_subcommand("demo", "built-in demonstrations");
  c_demo->add_option("name", demo, "counterexample")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    auto point_arg = [&] { return x.find('(') == std::string::npos && x.find('@') == std::string::npos ? "(" + x + ")" : x; };
    if (c_prox->parsed() || c_env->parsed())
      return single(o, std::string(c_prox->parsed() ? "prox" : "envelope") + " f=" + bracket(f) + " x=" + point_arg() +
                           " lambda=" + format_real(lambda));
    if (c_slope->parsed()) return single(o, "slope f=" + bracket(f) + " x=" + point_arg());
    if (c_verify->parsed()) {
      std::string line = "theorem_verify id=" + theorem;
      line += sequence.empty() ? " family=" + family : " sequence=" + sequence;
      if (!candidate.empty()) line += " candidate=" + bracket(candidate);
      return single(o, line);
    }
    if (c_run->parsed()) {
      const std::string path = !config_path.empty() ? config_path : o.config;
      if (path.empty()) throw UsageError("run needs a config path");
      return execute(parse_config(read_file(path)), o, true);
    }
    if (c_demo->parsed()) {
      if (demo != "counterexample") throw UsageError("unknown demo '" + demo + "' (counterexample)");
      return execute(parse_config(kCounterexampleConfig), o, false);
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  }
  return 2;
}

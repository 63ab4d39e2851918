// airymix: command-line front end for the airyline library.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "airyline/cli/commands.hpp"
#include "airyline/cli/config.hpp"
#include "airyline/cli/emit.hpp"
#include "airyline/cli/golden.hpp"
#include "airyline/errors.hpp"

namespace {

using airyline::cli::RunConfig;

struct Flags {
  std::string config_path;
  std::string out;
  std::string format;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  double tol = 0.0;

  double x = 0, s = 0, t = 0, y = 0;
  double from = 0, to = 0, step = 0;
  bool log_scale = false;
  std::size_t k_max = 0, time_index = 0, interval_index = 0;
  std::vector<double> shifts, ys, points;
  double a = 0, length = 0;
  std::string side;
  std::size_t nodes = 0, k = 0, grid = 0, samples = 0, n = 0;
  std::vector<std::size_t> window_curves, window_range;
  std::vector<std::string> files;
  bool record = false;
};

struct Sub {
  CLI::App* app = nullptr;
  std::map<std::string, CLI::Option*> opts;
  bool given(const std::string& name) const {
    const auto it = opts.find(name);
    return it != opts.end() && it->second->count() > 0;
  }
};

void add_common(Sub& sub, Flags& f, bool random) {
  sub.opts["config"] = sub.app->add_option("--config", f.config_path, "JSON run configuration file");
  sub.opts["out"] = sub.app->add_option("--out", f.out, "Output path (default: stdout)");
  sub.opts["format"] =
      sub.app->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"csv", "json", "svg"}));
  sub.opts["threads"] = sub.app->add_option("--threads", f.threads, "Worker thread cap (default: AIRYLINE_THREADS or hardware)")
                            ->check(CLI::PositiveNumber);
  sub.opts["tol"] = sub.app->add_option("--tol", f.tol, "Determinant convergence tolerance (>= 1e-12)");
  if (random) sub.opts["seed"] = sub.app->add_option("--seed", f.seed, "Random seed (default 20140101)");
}

RunConfig resolve(const std::string& command, const Sub& sub, const Flags& f) {
  RunConfig cfg;
  if (sub.given("config")) {
    cfg = airyline::cli::load_config(f.config_path, command);
  } else {
    cfg.command = command;
  }
  if (sub.given("out")) cfg.out = f.out;
  if (sub.given("format")) cfg.format = f.format;
  if (sub.given("threads")) cfg.threads = f.threads;
  if (sub.given("seed")) cfg.seed = f.seed;
  if (sub.given("tol")) {
    cfg.fredholm.tol = f.tol;
    airyline::detail::check_options(cfg.fredholm);
  }
  if (sub.given("x")) cfg.x = f.x;
  if (sub.given("s")) cfg.s = f.s;
  if (sub.given("t")) cfg.t = f.t;
  if (sub.given("y")) cfg.y = f.y;
  if (sub.given("from")) cfg.from = f.from;
  if (sub.given("to")) cfg.to = f.to;
  if (sub.given("step")) cfg.step = f.step;
  if (sub.given("log")) cfg.log_scale = f.log_scale;
  if (sub.given("k-max")) cfg.k_max = f.k_max;
  if (sub.given("time-index")) cfg.target.time_index = f.time_index;
  if (sub.given("interval-index")) cfg.target.interval_index = f.interval_index;
  if (sub.given("shifts")) cfg.shifts = f.shifts;
  if (sub.given("a")) cfg.a = f.a;
  if (sub.given("side")) cfg.side = f.side == "neg" ? airyline::ProjectionSide::negative : airyline::ProjectionSide::positive;
  if (sub.given("ys")) cfg.ys = f.ys;
  if (sub.given("length")) cfg.length = f.length;
  if (sub.given("nodes")) cfg.nodes = f.nodes;
  if (sub.given("k")) cfg.curves = f.k;
  if (sub.given("grid")) cfg.grid = f.grid;
  if (sub.given("samples")) cfg.samples = cfg.gue_samples = f.samples;
  if (sub.given("window-curves")) cfg.window_curves = std::make_pair(f.window_curves.at(0), f.window_curves.at(1));
  if (sub.given("window-range")) cfg.window_range = std::make_pair(f.window_range.at(0), f.window_range.at(1));
  if (sub.given("n")) cfg.matrix_size = f.n;
  if (sub.given("points")) cfg.points = f.points;
  if (sub.given("files")) cfg.files = f.files;
  return cfg;
}

int fail(const airyline::Error& e) {
  std::cerr << "error[" << airyline::category_name(e.category()) << "]: " << e.what() << "\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"airymix: determinantal statistics of the Airy line ensemble"};
  app.require_subcommand(1);
  app.footer("Environment: AIRYLINE_THREADS sets the default worker thread cap.\n"
             "Exit status: 0 on success, 1 on usage errors, 2 on failures reported as error[<category>],\n"
             "3 when the golden runner detects drift.");
  Flags f;
  std::map<std::string, Sub> subs;
  auto make = [&](const std::string& name, const std::string& help, bool random = false) -> Sub& {
    Sub& s = subs[name];
    s.app = app.add_subcommand(name, help);
    add_common(s, f, random);
    return s;
  };

  {
    Sub& s = make("airy", "Evaluate Ai(x) and Ai'(x)");
    s.opts["x"] = s.app->add_option("--x", f.x, "Argument");
  }
  {
    Sub& s = make("kernel", "Evaluate the extended Airy2 kernel K(s,x; t,y)");
    s.opts["s"] = s.app->add_option("--s", f.s, "First time");
    s.opts["x"] = s.app->add_option("--x", f.x, "First position");
    s.opts["t"] = s.app->add_option("--t", f.t, "Second time");
    s.opts["y"] = s.app->add_option("--y", f.y, "Second position");
  }
  {
    Sub& s = make("genfun", "Generating function of a counting configuration (--config required)");
    s.opts["config"]->required();
  }
  {
    Sub& s = make("tw2", "Tracy-Widom GUE distribution F2 on a grid");
    s.opts["from"] = s.app->add_option("--from", f.from, "First s (default -6)");
    s.opts["to"] = s.app->add_option("--to", f.to, "Last s (default 3)");
    s.opts["step"] = s.app->add_option("--step", f.step, "Grid step (default 0.1)");
    s.opts["log"] = s.app->add_flag("--log", f.log_scale, "Log-scale y axis in SVG output");
  }
  {
    Sub& s = make("counts", "Count distribution of one interval (--config required)");
    s.opts["config"]->required();
    s.opts["k-max"] = s.app->add_option("--k-max", f.k_max, "Largest count reported (<= 64, default 20)");
    s.opts["time-index"] = s.app->add_option("--time-index", f.time_index, "Target time index");
    s.opts["interval-index"] = s.app->add_option("--interval-index", f.interval_index, "Target interval index");
  }
  {
    Sub& s = make("mixing", "Mixing remainder R(z,T) over time shifts (--config required)");
    s.opts["config"]->required();
    s.opts["shifts"] = s.app->add_option("--shifts", f.shifts, "Comma-separated shifts T")->delimiter(',');
    s.opts["log"] = s.app->add_flag("--log", f.log_scale, "Log-log axes in SVG output");
  }
  {
    Sub& s = make("trace-decay", "Trace norm of the semigroup-weighted projection");
    s.opts["a"] = s.app->add_option("--a", f.a, "Lower end of the compression window (default -4)");
    s.opts["side"] = s.app->add_option("--side", f.side, "Projection side")->check(CLI::IsMember({"pos", "neg"}));
    s.opts["ys"] = s.app->add_option("--ys", f.ys, "Comma-separated y values")->delimiter(',');
    s.opts["length"] = s.app->add_option("--length", f.length, "Compression window length (default 12)");
    s.opts["nodes"] = s.app->add_option("--nodes", f.nodes, "Quadrature nodes (default 96)");
    s.opts["log"] = s.app->add_flag("--log", f.log_scale, "Log-log axes in SVG output");
  }
  {
    Sub& s = make("gibbs-check", "Gibbs resampling invariance check on avoiding bridges", true);
    s.opts["k"] = s.app->add_option("--k", f.k, "Number of curves (default 2)");
    s.opts["grid"] = s.app->add_option("--grid", f.grid, "Grid intervals on [0,1] (default 64)");
    s.opts["samples"] = s.app->add_option("--samples", f.samples, "Ensembles drawn (default 10000)");
    s.opts["window-curves"] =
        s.app->add_option("--window-curves", f.window_curves, "k1,k2 (1-based, default all)")->delimiter(',')->expected(2);
    s.opts["window-range"] = s.app->add_option("--window-range", f.window_range, "Grid index range l,r (default G/4,3G/4)")
                                 ->delimiter(',')
                                 ->expected(2);
  }
  {
    Sub& s = make("gue-edge", "Edge-rescaled GUE largest eigenvalues", true);
    s.opts["n"] = s.app->add_option("--n", f.n, "Matrix size in [50, 2000] (default 400)");
    s.opts["samples"] = s.app->add_option("--samples", f.samples, "Number of samples (default 200000)");
    s.opts["points"] = s.app->add_option("--points", f.points, "s values for the F2 comparison in JSON output")
                           ->delimiter(',');
  }
  {
    Sub& s = make("golden", "Run golden regression files and report drift");
    s.opts["files"] = s.app->add_option("files", f.files, "Golden JSON files");
    s.app->add_flag("--record", f.record, "Rewrite the files with freshly computed values");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (auto& [name, sub] : subs) {
      if (!sub.app->parsed()) continue;
      const RunConfig cfg = resolve(name, sub, f);
      namespace c = airyline::cli;
      if (name == "golden") {
        std::vector<c::GoldenDiff> diffs;
        for (const std::string& file : cfg.files) {
          auto d = c::run_golden_file(file, f.record);
          diffs.insert(diffs.end(), d.begin(), d.end());
        }
        c::emit(c::golden_report(diffs), cfg.output_format(), cfg.out);
        for (const auto& d : diffs) {
          if (!d.pass()) {
            std::cerr << "error[accuracy]: golden drift detected\n";
            return 3;
          }
        }
        return 0;
      }
      c::Result result;
      if (name == "airy") result = c::run_airy(cfg);
      else if (name == "kernel") result = c::run_kernel(cfg);
      else if (name == "genfun") result = c::run_genfun(cfg);
      else if (name == "tw2") result = c::run_tw2(cfg);
      else if (name == "counts") result = c::run_counts(cfg);
      else if (name == "mixing") result = c::run_mixing(cfg);
      else if (name == "trace-decay") result = c::run_trace_decay(cfg);
      else if (name == "gibbs-check") result = c::run_gibbs_check(cfg);
      else if (name == "gue-edge") result = c::run_gue_edge(cfg);
      c::emit(result, cfg.output_format(), cfg.out);
      return 0;
    }
  } catch (const airyline::Error& e) {
    return fail(e);
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

#include "cdid/cli.hpp"

#include "cdid/bootstrap.hpp"
#include "cdid/serialize.hpp"
#include "cdid/simulation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

namespace cdid::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

struct Options {
  std::string data, data_t, data_T;
  std::string kernel = "biweight";
  std::string bandwidth = "auto";
  double trim_lo = kDefaultTrimLower;
  double trim_hi = kDefaultTrimUpper;
  int grid = 0;
  double x = kNaN, xprime = kNaN, p = 0.5, c = kNaN, tol = kNaN;
  std::string interval;
  int bootstrap = 0;
  double level = 0.90;
  std::uint64_t seed = 0;
  std::string out;
  std::string format;
  int t = 1;
  std::string trend = "point";
  bool freeze_crossing = false;
  bool test = false;
  std::string dgp;
  long long n = 1000;
  std::string estimand = "att";
  std::string knots;
  double step = 0.0;
};

struct Flags {
  CLI::Option* x = nullptr;
  CLI::Option* xprime = nullptr;
  CLI::Option* c = nullptr;
  CLI::Option* tol = nullptr;
  CLI::Option* grid = nullptr;
  CLI::Option* trend = nullptr;
  CLI::Option* interval = nullptr;
  CLI::Option* format = nullptr;
  CLI::Option* bootstrap = nullptr;
};

class Output {
public:
  Output(const Options& o, std::ostream& out) : o_(o), out_(out) {}

  void emit(const std::string& content, const std::string& path_override = {}) {
    const std::string path = path_override.empty() ? o_.out : path_override;
    if (path.empty()) {
      out_ << content;
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::io, "cannot write '" + path + "'");
    f << content;
    if (!f) throw Error(ErrorKind::io, "write failed for '" + path + "'");
    written_.push_back(path);
  }

  const std::vector<std::string>& written() const { return written_; }

private:
  const Options& o_;
  std::ostream& out_;
  std::vector<std::string> written_;
};

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Dataset load_data(const Options& o) {
  if (!o.data.empty()) {
    if (!o.data_t.empty() || !o.data_T.empty()) {
      throw Error(ErrorKind::invalid_input, "use either --data or --data-t/--data-T, not both");
    }
    return load_csv(o.data);
  }
  if (!o.data_t.empty() && !o.data_T.empty()) return load_csv_pair(o.data_t, o.data_T);
  throw Error(ErrorKind::invalid_input, "input required: --data <csv> or --data-t <csv> --data-T <csv>");
}

KernelSpec kernel_spec(const Options& o) {
  KernelSpec spec;
  spec.family = parse_kernel_family(o.kernel);
  if (o.bandwidth != "auto") {
    double h = 0.0;
    try {
      std::size_t used = 0;
      h = std::stod(o.bandwidth, &used);
      if (used != o.bandwidth.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorKind::invalid_input, "--bandwidth must be 'auto' or a positive number");
    }
    if (!(h > 0.0)) throw Error(ErrorKind::invalid_input, "--bandwidth must be positive");
    spec.bandwidth = h;
  }
  return spec;
}

PipelineConfig pipeline_config(const Options& o, const Flags& f, const Dataset& data) {
  PipelineConfig cfg;
  cfg.kernel = kernel_spec(o);
  cfg.trim_lower = o.trim_lo;
  cfg.trim_upper = o.trim_hi;
  cfg.trend = parse_trend_mode(o.trend);
  if (f.interval && f.interval->count() > 0) {
    cfg.control = parse_interval_set(o.interval);
    if (!f.trend || f.trend->count() == 0) cfg.trend = TrendMode::interval;
  }
  if (cfg.trend == TrendMode::interval && cfg.control.empty()) {
    throw Error(ErrorKind::invalid_input, "interval trend needs --interval \"a,b;c,d\"");
  }
  if (o.t < 1 || o.t >= data.reference_period()) {
    throw Error(ErrorKind::invalid_input, "--t must lie in 1.." + std::to_string(data.reference_period() - 1));
  }
  if (o.freeze_crossing && cfg.trend != TrendMode::interval) {
    for (int t = 1; t < data.reference_period(); ++t) {
      cfg.frozen_crossings.push_back(
          estimate_crossing(data.period(t), data.reference(), cfg.trim_lower, cfg.trim_upper).location);
    }
  }
  return cfg;
}

std::string format_or(const Options& o, const char* fallback) {
  std::string f = o.format.empty() ? fallback : o.format;
  if (o.format.empty()) {
    const auto ext = std::filesystem::path(o.out).extension().string();
    if (ext == ".csv") f = "csv";
    if (ext == ".json") f = "json";
  }
  if (f != "json" && f != "csv") throw Error(ErrorKind::invalid_input, "--format must be json or csv");
  return f;
}

void check_bootstrap_flags(const Options& o) {
  if (o.bootstrap < 0) throw Error(ErrorKind::invalid_input, "--bootstrap must be >= 0");
}

// Evaluation points: --x, or `grid` points between the 5% and 95% quantiles of X_T.
std::vector<double> evaluation_points(const Options& o, const Flags& f, const Dataset& data,
                                      int default_grid) {
  if (f.x->count() > 0) return {o.x};
  const int n = f.grid->count() > 0 ? o.grid : default_grid;
  if (n < 1) throw Error(ErrorKind::invalid_input, "--grid must be >= 1");
  EmpiricalCdf fx(data.reference().treatments);
  const double lo = fx.quantile(0.05), hi = fx.quantile(0.95);
  std::vector<double> xs;
  for (int i = 0; i < n; ++i) {
    xs.push_back(n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (n - 1));
  }
  return xs;
}

// Effect curve over xs with optional percentile-bootstrap CIs.
std::vector<EffectEstimate> effect_curve(const Dataset& data, const PipelineConfig& cfg,
                                         const Options& o, const Flags& f, EffectKind kind,
                                         const std::vector<double>& xs) {
  const std::optional<double> tol = f.tol->count() > 0 ? std::optional<double>(o.tol) : std::nullopt;
  auto estimate = [&](const EffectEngine& e, double x) {
    switch (kind) {
      case EffectKind::att: return e.att(x);
      case EffectKind::qtt: return e.qtt(o.p, x);
      case EffectKind::ame_app: return e.ame_app(x, tol);
      case EffectKind::ame_avg: return e.ame_avg(o.c);
      case EffectKind::ame_rc:
        return std::isnan(x) ? e.rc_ame_overall(std::isnan(o.c) ? e.default_tolerance() : o.c)
                             : e.rc_ame(x, tol);
      default: break;
    }
    throw Error(ErrorKind::invalid_input, "unsupported effect kind");
  };
  const auto fit = fit_pipeline(data, cfg, {o.t});
  std::vector<EffectEstimate> out;
  for (double x : xs) out.push_back(estimate(fit.engines.front(), x));
  check_bootstrap_flags(o);
  if (o.bootstrap > 0) {
    Statistic stat = [&](const Dataset& d) {
      const auto fd = fit_pipeline(d, cfg, {o.t});
      Vector v(static_cast<Index>(xs.size()));
      for (std::size_t i = 0; i < xs.size(); ++i) v[static_cast<Index>(i)] = estimate(fd.engines.front(), xs[i]).value;
      return v;
    };
    const auto boot = bootstrap_many(data, stat, o.bootstrap, o.level, o.seed);
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i].ci = Interval{boot[i].ci_lo, boot[i].ci_hi};
      if (boot[i].unreliable) out[i].flags.emplace_back("more than 20% of bootstrap replicates failed");
    }
  }
  return out;
}

void emit_effects(Output& output, const Options& o, const std::vector<EffectEstimate>& effects,
                  bool single) {
  const auto fmt = format_or(o, single ? "json" : "csv");
  if (fmt == "csv") {
    std::ostringstream s;
    write_effects_csv(s, effects);
    output.emit(s.str());
    return;
  }
  if (single) {
    output.emit(dump(to_json(effects.front())));
    return;
  }
  Json arr = Json::array();
  for (const auto& e : effects) arr.push_back(to_json(e));
  output.emit(dump(arr));
}

Json manifest(const std::string& command, const std::vector<std::string>& args, const Options& o,
              const std::vector<std::string>& outputs) {
  Json cfg;
  cfg["data"] = o.data;
  cfg["data_t"] = o.data_t;
  cfg["data_T"] = o.data_T;
  cfg["kernel"] = o.kernel;
  cfg["bandwidth"] = o.bandwidth;
  cfg["trim_lo"] = o.trim_lo;
  cfg["trim_hi"] = o.trim_hi;
  cfg["grid"] = o.grid;
  cfg["t"] = o.t;
  cfg["x"] = number(o.x);
  cfg["xprime"] = number(o.xprime);
  cfg["p"] = o.p;
  cfg["c"] = number(o.c);
  cfg["tol"] = number(o.tol);
  cfg["interval"] = o.interval;
  cfg["trend"] = o.trend;
  cfg["freeze_crossing"] = o.freeze_crossing;
  cfg["bootstrap"] = o.bootstrap;
  cfg["level"] = o.level;
  cfg["seed"] = o.seed;
  cfg["format"] = o.format;
  cfg["out"] = o.out;
  cfg["dgp"] = o.dgp;
  cfg["n"] = o.n;
  cfg["estimand"] = o.estimand;
  cfg["knots"] = o.knots;
  cfg["step"] = o.step;
  cfg["test"] = o.test;
  Json j;
  j["tool"] = "cdid";
  j["version"] = kVersion;
  j["command"] = command;
  j["argv"] = args;
  j["config"] = cfg;
  j["outputs"] = outputs;
  return j;
}

// ---- subcommands ----

void cmd_summarize(const Options& o, Output& output) {
  const auto data = load_data(o);
  const auto summary = summarize(data);
  if (format_or(o, "json") == "csv") {
    std::ostringstream s;
    write_summary_csv(s, summary);
    output.emit(s.str());
  } else {
    output.emit(dump(to_json(summary)));
  }
}

void cmd_crossing(const Options& o, const Flags& f, Output& output) {
  const auto data = load_data(o);
  pipeline_config(o, f, data);
  const auto c = estimate_crossing(data.period(o.t), data.reference(), o.trim_lo, o.trim_hi);
  if (format_or(o, "json") == "csv") {
    std::ostringstream s;
    s << "location,objective,trim_lower,trim_upper,flat_set_width\n"
      << format_double(c.location) << ',' << format_double(c.objective) << ','
      << format_double(c.trim_lower) << ',' << format_double(c.trim_upper) << ','
      << format_double(c.flat_set_width) << '\n';
    output.emit(s.str());
  } else {
    output.emit(dump(to_json(c)));
  }
}

void cmd_trend(const Options& o, const Flags& f, Output& output) {
  const auto data = load_data(o);
  auto cfg = pipeline_config(o, f, data);
  cfg.grid = f.grid->count() > 0 ? o.grid : kDefaultTrendGrid;
  const auto fit = fit_pipeline(data, cfg, {o.t});
  auto trend = fit.engines.front().trend();
  if (trend.source() == TrendSource::shift) {
    const auto& y = data.reference().outcomes;
    trend.build_grid(y.minCoeff(), y.maxCoeff(), cfg.grid);
  }
  Json meta = trend_metadata(trend);
  if (!fit.crossings.empty()) meta["crossing"] = to_json(fit.crossings.front());
  if (format_or(o, "json") == "csv") {
    std::ostringstream s;
    write_trend_csv(s, trend);
    output.emit(s.str());
    if (!o.out.empty()) output.emit(dump(meta), o.out + ".meta.json");
    return;
  }
  Json j;
  j["meta"] = meta;
  j["y_grid"] = std::vector<double>(trend.grid().begin(), trend.grid().end());
  j["g_value"] = std::vector<double>(trend.g_values().begin(), trend.g_values().end());
  output.emit(dump(j));
}

void cmd_effect(const Options& o, const Flags& f, Output& output, EffectKind kind) {
  const auto data = load_data(o);
  const auto cfg = pipeline_config(o, f, data);
  if (kind == EffectKind::qtt && !(o.p > 0.0 && o.p < 1.0)) {
    throw Error(ErrorKind::invalid_input, "--p must lie in (0, 1)");
  }
  if (kind == EffectKind::ame_app && f.x->count() == 0 && f.c->count() > 0) kind = EffectKind::ame_avg;
  std::vector<double> xs;
  bool single = true;
  if (kind == EffectKind::ame_avg) {
    xs = {kNaN};
  } else if (kind == EffectKind::ame_rc && f.x->count() == 0) {
    xs = {kNaN};
  } else {
    if (f.x->count() == 0 && f.grid->count() == 0) {
      throw Error(ErrorKind::invalid_input, "--x or --grid required");
    }
    xs = evaluation_points(o, f, data, 50);
    single = f.x->count() > 0;
  }
  emit_effects(output, o, effect_curve(data, cfg, o, f, kind, xs), single);
}

void cmd_rc(const Options& o, const Flags& f, Output& output) {
  if (!o.test) {
    cmd_effect(o, f, output, EffectKind::ame_rc);
    return;
  }
  const auto data = load_data(o);
  const auto cfg = pipeline_config(o, f, data);
  if (f.x->count() == 0) throw Error(ErrorKind::invalid_input, "--test needs --x");
  const int B = f.bootstrap->count() > 0 ? o.bootstrap : 199;
  output.emit(dump(to_json(rc_linearity_test(data, cfg, o.x, B, o.seed))));
}

void cmd_bounds(const Options& o, const Flags& f, Output& output) {
  const auto data = load_data(o);
  const auto cfg = pipeline_config(o, f, data);
  const auto fit = fit_pipeline(data, cfg);
  if (f.x->count() > 0) {
    const auto b = f.xprime->count() > 0 ? att_bounds(fit.engines, o.x, o.xprime)
                                         : ame_bounds(fit.engines, o.x);
    if (format_or(o, "json") == "csv") {
      std::ostringstream s;
      write_bounds_csv(s, {b});
      output.emit(s.str());
    } else {
      output.emit(dump(to_json(b)));
    }
    return;
  }
  std::vector<BoundsResult> rows;
  for (double x : evaluation_points(o, f, data, 50)) rows.push_back(ame_bounds(fit.engines, x));
  if (format_or(o, "csv") == "csv") {
    std::ostringstream s;
    write_bounds_csv(s, rows);
    output.emit(s.str());
  } else {
    Json arr = Json::array();
    for (const auto& b : rows) arr.push_back(to_json(b));
    output.emit(dump(arr));
  }
}

void cmd_fit_q(const Options& o, const Flags& f, Output& output) {
  const auto data = load_data(o);
  pipeline_config(o, f, data);
  std::array<double, 4> knots = kDefaultKnots;
  if (!o.knots.empty()) {
    std::stringstream ss(o.knots);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ss, cell, ',')) {
      try {
        v.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorKind::invalid_input, "--knots must be four comma-separated numbers");
      }
    }
    if (v.size() != 4) throw Error(ErrorKind::invalid_input, "--knots must be four comma-separated numbers");
    std::copy(v.begin(), v.end(), knots.begin());
  }
  output.emit(dump(to_json(fit_piecewise_q(data.period(o.t), data.reference(), knots, o.step))));
}

void cmd_dominance(const Options& o, const Flags& f, Output& output) {
  const auto data = load_data(o);
  if (o.t < 1 || o.t >= data.reference_period()) throw Error(ErrorKind::invalid_input, "--t out of range");
  if (f.interval->count() == 0) throw Error(ErrorKind::invalid_input, "dominance needs --interval \"a,b\"");
  const auto set = parse_interval_set(o.interval);
  if (set.size() != 1) throw Error(ErrorKind::invalid_input, "dominance takes a single interval \"a,b\"");
  const int B = f.bootstrap->count() > 0 ? o.bootstrap : 499;
  output.emit(dump(to_json(dominance_test(data.period(o.t), data.reference(), set.front(), B, o.seed))));
}

void cmd_simulate(const Options& o, Output& output) {
  if (o.dgp.empty()) throw Error(ErrorKind::invalid_input, "simulate needs --dgp <config>");
  if (o.n < 1) throw Error(ErrorKind::invalid_input, "--n must be >= 1");
  const auto dgp = load_dgp(o.dgp);
  const auto data = simulate(dgp, static_cast<Index>(o.n), o.seed);
  std::ostringstream s;
  write_csv(s, data);
  output.emit(s.str());
}

void cmd_bootstrap(const Options& o, const Flags& f, Output& output) {
  const auto data = load_data(o);
  const auto cfg = pipeline_config(o, f, data);
  Estimand e;
  e.kind = parse_estimand(o.estimand);
  e.period = o.t;
  e.x = o.x;
  e.p = o.p;
  e.c = std::isnan(o.c) ? 0.0 : o.c;
  if (f.tol->count() > 0) e.tol_q = o.tol;
  const bool needs_x = e.kind == EstimandKind::att || e.kind == EstimandKind::qtt ||
                       e.kind == EstimandKind::ame || e.kind == EstimandKind::rc;
  if (needs_x && f.x->count() == 0) throw Error(ErrorKind::invalid_input, "estimand needs --x");
  const int B = f.bootstrap->count() > 0 ? o.bootstrap : 499;
  output.emit(dump(to_json(bootstrap(data, cfg, e, B, o.level, o.seed))));
}

void add_common(CLI::App* sub, Options& o, Flags& f) {
  sub->add_option("--data", o.data, "long-format CSV with period,y,x columns");
  sub->add_option("--data-t", o.data_t, "CSV for the comparison period (y,x)");
  sub->add_option("--data-T", o.data_T, "CSV for the reference period (y,x)");
  sub->add_option("--kernel", o.kernel, "biweight|epanechnikov|triangular")->capture_default_str();
  sub->add_option("--bandwidth", o.bandwidth, "auto or a positive number")->capture_default_str();
  sub->add_option("--trim-lo", o.trim_lo, "lower trimming probability")->capture_default_str();
  sub->add_option("--trim-hi", o.trim_hi, "upper trimming probability")->capture_default_str();
  f.grid = sub->add_option("--grid", o.grid, "grid size");
  sub->add_option("--t", o.t, "comparison period (1..T-1)")->capture_default_str();
  f.interval = sub->add_option("--interval", o.interval, "interval set \"a,b;c,d\"");
  f.trend = sub->add_option("--trend", o.trend, "point|interval|shift")->capture_default_str();
  sub->add_flag("--freeze-crossing", o.freeze_crossing, "hold crossings fixed in the bootstrap");
  sub->add_option("--out", o.out, "output path (default stdout)");
  f.format = sub->add_option("--format", o.format, "json|csv");
}

void add_effect_flags(CLI::App* sub, Options& o, Flags& f) {
  f.x = sub->add_option("--x", o.x, "evaluation point");
  f.c = sub->add_option("--c", o.c, "averaging threshold on |q(x) - x|");
  f.tol = sub->add_option("--tol", o.tol, "degeneracy tolerance for |q(x) - x|");
  sub->add_option("--p", o.p, "quantile level")->capture_default_str();
  f.bootstrap = sub->add_option("--bootstrap,--B", o.bootstrap, "bootstrap replicates");
  sub->add_option("--level", o.level, "confidence level")->capture_default_str();
  sub->add_option("--seed", o.seed, "random seed")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Difference-in-differences with continuous treatments", "cdid"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Options o;
  Flags f;
  // Detached sinks for options a subcommand does not register.
  std::vector<std::unique_ptr<CLI::App>> scratch;
  auto ensure = [&](Flags& flags) {
    auto fill = [&](CLI::Option*& opt, const char* name) {
      if (opt) return;
      scratch.push_back(std::make_unique<CLI::App>());
      opt = scratch.back()->add_option(name);
    };
    fill(flags.x, "--x");
    fill(flags.xprime, "--xprime");
    fill(flags.c, "--c");
    fill(flags.tol, "--tol");
    fill(flags.bootstrap, "--bootstrap");
  };

  struct Sub {
    CLI::App* app;
    Flags flags;
  };
  std::vector<std::pair<std::string, Sub>> subs;
  auto make = [&](const std::string& name, const std::string& help, bool data, bool effects) {
    CLI::App* sub = app.add_subcommand(name, help);
    Sub s{sub, {}};
    if (data) add_common(sub, o, s.flags);
    if (effects) add_effect_flags(sub, o, s.flags);
    subs.emplace_back(name, s);
    return sub;
  };
  make("summarize", "per-period summary statistics", true, false);
  make("crossing", "estimate the crossing point of the treatment CDFs", true, false);
  make("trend", "estimate the time trend g_t", true, false);
  make("att", "average treatment effect on the treated", true, true);
  make("qtt", "quantile treatment effect on the treated", true, true);
  make("ame", "average marginal effect (--x) or its average over |q(x) - x| > c (--c)", true, true);
  auto* bounds = make("bounds", "curvature bounds on the AME (or the ATT with --xprime)", true, true);
  auto* rc = make("rc", "random-coefficient AME, overall AME, or linearity test (--test)", true, true);
  auto* fitq = make("fit-q", "piecewise-linear fit of the inverse rank map", true, false);
  auto* dom = make("dominance", "one-sided test of F_t <= F_T on an interval", true, false);
  auto* sim = make("simulate", "draw a dataset from a DGP config", false, false);
  make("bootstrap", "percentile bootstrap for a named estimand", true, true);

  for (auto& [name, s] : subs) {
    if (name == "bounds") s.flags.xprime = bounds->add_option("--xprime", o.xprime, "counterfactual treatment");
  }
  rc->add_flag("--test", o.test, "linearity test at --x");
  fitq->add_option("--knots", o.knots, "four ascending knots \"k0,k1,k2,k3\"");
  fitq->add_option("--step", o.step, "grid step (default span/400)");
  for (auto& [name, s] : subs) {
    if (name == "dominance") {
      s.flags.bootstrap = dom->add_option("--bootstrap,--B", o.bootstrap, "replicates (default 499)");
      dom->add_option("--seed", o.seed, "random seed")->capture_default_str();
    }
    if (name == "bootstrap") {
      subs.back().second.app->add_option("--estimand", o.estimand,
                                         "att|qtt|ame|ame_avg|rc|rc_overall|crossing")
          ->capture_default_str();
    }
  }
  sim->add_option("--dgp", o.dgp, "DGP config (.json or .toml)");
  sim->add_option("--n", o.n, "observations per period")->capture_default_str();
  sim->add_option("--seed", o.seed, "random seed")->capture_default_str();
  sim->add_option("--out", o.out, "output CSV (default stdout)");

  if (!args.empty() && !args.front().empty() && args.front()[0] != '-' &&
      std::none_of(subs.begin(), subs.end(), [&](const auto& s) { return s.first == args.front(); })) {
    err << "error: unknown subcommand '" << args.front() << "' (see --help)\n";
    return 2;
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  std::string command;
  Flags flags;
  for (auto& [name, s] : subs) {
    if (s.app->parsed()) {
      command = name;
      flags = s.flags;
    }
  }
  ensure(flags);
  if (!flags.grid) {
    scratch.push_back(std::make_unique<CLI::App>());
    flags.grid = scratch.back()->add_option("--grid");
    flags.interval = scratch.back()->add_option("--interval");
    flags.trend = scratch.back()->add_option("--trend");
  }

  Output output(o, out);
  try {
    if (command == "summarize") cmd_summarize(o, output);
    else if (command == "crossing") cmd_crossing(o, flags, output);
    else if (command == "trend") cmd_trend(o, flags, output);
    else if (command == "att") cmd_effect(o, flags, output, EffectKind::att);
    else if (command == "qtt") cmd_effect(o, flags, output, EffectKind::qtt);
    else if (command == "ame") cmd_effect(o, flags, output, EffectKind::ame_app);
    else if (command == "bounds") cmd_bounds(o, flags, output);
    else if (command == "rc") cmd_rc(o, flags, output);
    else if (command == "fit-q") cmd_fit_q(o, flags, output);
    else if (command == "dominance") cmd_dominance(o, flags, output);
    else if (command == "simulate") cmd_simulate(o, output);
    else if (command == "bootstrap") cmd_bootstrap(o, flags, output);
    if (!o.out.empty()) {
      std::ofstream m(o.out + ".manifest.json", std::ios::binary);
      if (!m) throw Error(ErrorKind::io, "cannot write manifest for '" + o.out + "'");
      m << dump(manifest(command, args, o, output.written()));
    }
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace cdid::cli

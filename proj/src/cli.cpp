#include "predreg/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "predreg/config.hpp"
#include "predreg/dgp.hpp"
#include "predreg/error.hpp"
#include "predreg/estimate.hpp"
#include "predreg/limits.hpp"
#include "predreg/montecarlo.hpp"
#include "predreg/predictability.hpp"
#include "predreg/sample_io.hpp"

namespace predreg::cli {

namespace {

using nlohmann::json;

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& field : split_csv_line(text)) {
    if (field.empty()) continue;
    const double v = parse_double(field);
    if (!std::isfinite(v)) throw Error(Errc::BadInput, what + ": invalid number '" + field + "'");
    out.push_back(v);
  }
  if (out.empty()) throw Error(Errc::BadInput, what + " must not be empty");
  return out;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::optional<std::uint64_t> config,
                           std::uint64_t fallback) {
  if (flag) return *flag;
  if (config) return *config;
  if (const char* env = std::getenv("PREDREG_SEED"); env && *env) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw Error(Errc::BadInput, "PREDREG_SEED must be an unsigned integer");
    }
  }
  return fallback;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::BadInput, "cannot open '" + path + "' for writing");
  return f;
}

Sample load_sample(const std::string& path) {
  if (path == "-") return read_regression_csv(std::cin);
  std::ifstream f(path);
  if (!f) throw Error(Errc::BadInput, "cannot open input '" + path + "'");
  return read_regression_csv(f);
}

//! Writes `<output>.manifest.json` next to a command's primary output.
struct Manifest {
  std::string command;
  std::vector<std::string> args;
  json params = json::object();
  std::uint64_t master_seed = 0;
  std::string started = timestamp();
  std::vector<std::string> outputs;

  void write(const std::string& primary, double wall_seconds = -1.0) const {
    json j = {{"command", command},
              {"args", args},
              {"params", params},
              {"master_seed", master_seed},
              {"tool_version", PREDREG_VERSION},
              {"started", started},
              {"finished", timestamp()},
              {"outputs", outputs}};
    if (wall_seconds >= 0.0) j["wall_seconds"] = wall_seconds;
    auto f = open_output(primary + ".manifest.json");
    f << j.dump(2) << '\n';
  }
};

// Bandwidth options shared by estimate and test.
struct BandwidthOptions {
  std::optional<double> h;
  std::string rule = "deterministic";
  double c_h = 1.0;
  double gamma = 0.4;

  void attach(CLI::App& app) {
    auto* fixed = app.add_option("--h", h, "Fixed bandwidth");
    app.add_option("--h-rule", rule, "Bandwidth rule")
        ->check(CLI::IsMember({"deterministic", "data_driven"}))
        ->excludes(fixed);
    app.add_option("--c-h", c_h, "Bandwidth constant c_h");
    app.add_option("--gamma", gamma, "Bandwidth exponent gamma");
  }

  double resolve(std::span<const double> x) const {
    if (h) {
      if (!(*h > 0.0)) throw Error(Errc::BadBandwidth, "--h must be positive");
      return *h;
    }
    BandwidthRule r = rule == "data_driven" ? BandwidthRule::data_driven(c_h, gamma)
                                            : BandwidthRule::deterministic(c_h, gamma);
    return r.bandwidth(x);
  }

  json to_json() const {
    if (h) return {{"h", *h}};
    return {{"h_rule", rule}, {"c_h", c_h}, {"gamma", gamma}};
  }
};

struct Context {
  std::vector<std::string> args;
  std::ostream& out;
  std::ostream& err;
};

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  std::optional<double> rho;
  std::string rho_rule;
  double c = 0.0;
  double a = 0.5;
  std::int64_t n = 100;
  std::optional<std::uint64_t> seed;
  std::string m = "zero";
  double m_param = 0.0;
  double m_cap = 1e300;
  std::string filter = "1";
  std::string eps = "gaussian";
  std::string u_law = "gaussian";
  int df = 5;
  double sigma_u = 1.0;
  double delta = 0.05;
  double cbar = 0.0;
  std::string out;
};

InnovationLaw law_by_name(const std::string& name, int df) {
  if (name == "gaussian") return InnovationLaw::gaussian();
  if (name == "laplace") return InnovationLaw::laplace();
  if (name == "student_t") return InnovationLaw::student_t(df);
  throw Error(Errc::BadInput, "unknown innovation law '" + name + "'");
}

DgpSpec spec_from(const SimulateOptions& o) {
  DgpSpec s;
  const std::string rule = o.rho_rule.empty() ? (o.rho && *o.rho == 1.0 ? "unit" : "stat") : o.rho_rule;
  if (rule == "stat") {
    if (!o.rho) throw Error(Errc::BadInput, "--rho is required for the stationary rule");
    s.persistence = PersistenceRule::stationary(*o.rho);
  } else if (rule == "mi") {
    s.persistence = PersistenceRule::mildly_integrated(o.c, o.a);
  } else if (rule == "lur") {
    s.persistence = PersistenceRule::local_to_unity(o.c);
  } else {
    s.persistence = PersistenceRule::unit_root();
  }
  s.persistence.delta = o.delta;
  s.persistence.cbar = o.cbar;
  if (o.m == "zero") s.m = RegressionFunction::zero();
  else if (o.m == "constant") s.m = RegressionFunction::constant(o.m_param);
  else if (o.m == "linear") s.m = RegressionFunction::linear(o.m_param, o.m_cap);
  else if (o.m == "logistic") s.m = RegressionFunction::logistic(o.m_param);
  else s.m = RegressionFunction::sine(o.m_param);
  s.filter = LinearFilter(parse_list(o.filter, "--filter"));
  s.eps_law = law_by_name(o.eps, o.df);
  s.u_law = law_by_name(o.u_law, o.df);
  s.sigma_u = o.sigma_u;
  s.n = o.n;
  s.validate();
  return s;
}

int cmd_simulate(const SimulateOptions& o, Context& ctx) {
  Manifest manifest;
  manifest.command = "simulate";
  manifest.args = ctx.args;
  const DgpSpec spec = spec_from(o);
  const std::uint64_t seed = resolve_seed(o.seed, std::nullopt, 0);
  const Sample s = simulate(spec, seed);
  if (o.out.empty()) {
    write_sample_csv(ctx.out, s);
    return kOk;
  }
  {
    auto f = open_output(o.out);
    write_sample_csv(f, s);
  }
  manifest.master_seed = seed;
  manifest.params = to_json(spec);
  manifest.params["seed"] = seed;
  manifest.params["spec_digest"] = std::to_string(s.spec_digest);
  manifest.outputs = {o.out};
  if (!o.seed) manifest.args.insert(manifest.args.end(), {"--seed", std::to_string(seed)});
  manifest.write(o.out);
  return kOk;
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateOptions {
  std::string in;
  std::string points;
  std::string kernel = "epanechnikov";
  BandwidthOptions bw;
  double alpha = 0.05;
  std::optional<double> theta;
  std::string out;
};

int cmd_estimate(const EstimateOptions& o, Context& ctx) {
  const Sample sample = load_sample(o.in);
  const RegressionData data = sample.data();
  const Kernel k = Kernel::from_name(o.kernel);
  const std::vector<double> points = parse_list(o.points, "--points");
  const double h = o.bw.resolve(data.x);
  if (!(o.alpha > 0.0 && o.alpha < 1.0)) throw Error(Errc::BadProbability, "--alpha must lie in (0,1)");

  std::ostringstream csv;
  csv << "x,m_hat,s_n,ci_lo,ci_hi,signal,h,n";
  if (o.theta) csv << ",t_stat";
  csv << ",status\n";
  std::size_t ok = 0, degenerate = 0;
  for (double x : points) {
    try {
      const PointInference p = infer_point(data, k, x, h, o.alpha, o.theta);
      csv << format_double(x) << ',' << format_double(p.m_hat) << ',' << format_double(p.s_n) << ','
          << format_double(p.ci_lo) << ',' << format_double(p.ci_hi) << ',' << format_double(p.signal)
          << ',' << format_double(h) << ',' << data.n();
      if (o.theta) csv << ',' << format_double(*p.t_stat);
      csv << ",ok\n";
      ++ok;
    } catch (const Error& e) {
      if (e.code() == Errc::DegenerateVariance) {
        // The point estimate exists even though its standard error does not.
        ++degenerate;
        csv << format_double(x) << ',' << format_double(nw_estimate(data, k, x, h)) << ",,,,"
            << format_double(local_signal(data, k, x, h)) << ',' << format_double(h) << ',' << data.n();
        if (o.theta) csv << ',';
        csv << ",degenerate_variance\n";
      } else if (e.code() == Errc::NoLocalMass) {
        csv << format_double(x) << ",,,,,0," << format_double(h) << ',' << data.n();
        if (o.theta) csv << ',';
        csv << ",no_local_mass\n";
      } else {
        throw;
      }
    }
  }
  if (o.out.empty()) {
    ctx.out << csv.str();
  } else {
    {
      auto f = open_output(o.out);
      f << csv.str();
    }
    Manifest m;
    m.command = "estimate";
    m.args = ctx.args;
    m.params = {{"in", o.in}, {"points", points}, {"kernel", k.name()}, {"alpha", o.alpha},
                {"bandwidth", o.bw.to_json()}, {"h", h}};
    if (o.theta) m.params["theta"] = *o.theta;
    m.outputs = {o.out};
    m.write(o.out);
  }
  if (ok > 0) return kOk;
  if (degenerate > 0) {
    ctx.err << "error: local variance is degenerate at every point\n";
    return kDegenerate;
  }
  ctx.err << "error: no point has local mass\n";
  return kDataError;
}

// ---------------------------------------------------------------------------
// test

struct TestOptions {
  std::string in;
  std::string points;
  std::string kernel = "epanechnikov";
  BandwidthOptions bw;
  double alpha = 0.05;
  std::string out;
};

int cmd_test(const TestOptions& o, Context& ctx) {
  const Sample sample = load_sample(o.in);
  const RegressionData data = sample.data();
  const Kernel k = Kernel::from_name(o.kernel);
  const std::vector<double> points = parse_list(o.points, "--points");
  const double h = o.bw.resolve(data.x);
  const PredTestResult r = predictability_test(data, k, points, h, o.alpha);

  std::ostringstream summary;
  summary << "n=" << r.n << " points=" << r.points.size() << " h=" << format_double(r.h)
          << " F_sum=" << format_double(r.f_sum) << " (crit " << format_double(r.crit_sum) << ", "
          << (r.reject_sum ? "reject" : "accept") << ") F_max=" << format_double(r.f_max) << " (crit "
          << format_double(r.crit_max) << ", " << (r.reject_max ? "reject" : "accept") << ")";
  if (o.out.empty()) {
    ctx.out << r.to_json().dump(2) << '\n';
    ctx.err << summary.str() << '\n';
    return kOk;
  }
  {
    auto f = open_output(o.out);
    f << r.to_json().dump(2) << '\n';
  }
  ctx.out << summary.str() << '\n';
  Manifest m;
  m.command = "test";
  m.args = ctx.args;
  m.params = {{"in", o.in}, {"points", points}, {"kernel", k.name()}, {"alpha", o.alpha},
              {"bandwidth", o.bw.to_json()}};
  m.outputs = {o.out};
  m.write(o.out);
  return kOk;
}

// ---------------------------------------------------------------------------
// mc

struct McOptions {
  std::string study;
  std::string config;
  std::optional<unsigned> workers;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool plot_data = false;
  bool quiet = false;
};

void write_plot_data(const McReport& report, const std::string& path) {
  auto f = open_output(path);
  f << "study,metric,rule,rho_n,n,point,estimate,lo,hi,reference,valid\n";
  for (const auto& c : report.cells) {
    const double se = c.mc_se.value_or(0.0);
    f << report.study << ',' << c.metric << ',' << csv_quote(c.rule) << ',' << format_double(c.rho_n) << ',' << c.n
      << ',' << (c.point ? format_double(*c.point) : "") << ',' << format_double(c.estimate) << ','
      << format_double(c.estimate - 1.959963984540054 * se) << ','
      << format_double(c.estimate + 1.959963984540054 * se) << ','
      << (c.reference ? format_double(*c.reference) : "") << ',' << (c.valid ? "true" : "false") << '\n';
  }
}

int cmd_mc(const McOptions& o, Context& ctx) {
  std::ifstream in(o.config);
  if (!in) throw Error(Errc::Config, "cannot open config '" + o.config + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::Config, std::string("$: invalid JSON: ") + e.what());
  }
  ExperimentConfig config = experiment_from_json(j);
  for (const char* ext : {".csv", ".json", ".manifest.json", ".plot.csv"}) {
    if (std::filesystem::exists(o.out + ext) && std::filesystem::equivalent(o.out + ext, o.config)) {
      throw Error(Errc::BadInput, "--out " + o.out + " would overwrite the config file");
    }
  }
  std::optional<std::uint64_t> from_config;
  if (j.contains("master_seed")) from_config = config.master_seed;
  config.master_seed = resolve_seed(o.seed, from_config, 1);
  if (o.workers) config.workers = *o.workers;

  ProgressFn progress;
  if (!o.quiet) {
    progress = [&](const Progress& p) {
      ctx.err << "cell=" << p.cell << " done=" << p.done << "/" << p.total << " eta="
              << std::fixed << std::setprecision(1) << p.eta_seconds << "s" << std::defaultfloat << '\n';
    };
  }
  McReport report;
  if (o.study == "coverage") report = run_coverage(config, progress);
  else if (o.study == "size") report = run_size(config, progress);
  else if (o.study == "tstat") report = run_tstat_distribution(config, progress);
  else report = run_density_convergence(config, progress);

  Manifest m;
  m.command = "mc " + o.study;
  m.args = ctx.args;
  if (!o.seed) m.args.insert(m.args.end(), {"--seed", std::to_string(config.master_seed)});
  m.params = to_json(config);
  m.params["config_digest"] = std::to_string(report.config_digest);
  m.master_seed = config.master_seed;
  {
    auto f = open_output(o.out + ".csv");
    report.write_csv(f);
  }
  {
    auto f = open_output(o.out + ".json");
    f << report.to_json().dump(2) << '\n';
  }
  m.outputs = {o.out + ".csv", o.out + ".json"};
  if (o.plot_data) {
    write_plot_data(report, o.out + ".plot.csv");
    m.outputs.push_back(o.out + ".plot.csv");
  }
  m.write(o.out, report.wall_seconds);
  return kOk;
}

// ---------------------------------------------------------------------------
// oracle

struct OracleOptions {
  double c = 0.0;
  double a = 0.0;
  std::int64_t steps = 100000;
  std::int64_t paths = 2000;
  double bandwidth = 0.02;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int cmd_oracle(const OracleOptions& o, Context& ctx) {
  const std::uint64_t seed = resolve_seed(o.seed, std::nullopt, 1);
  const OuPathSpec spec{o.c, o.steps, o.paths, seed};
  const std::vector<double> draws = ou_local_time(spec, o.a, o.bandwidth);
  std::ostringstream csv;
  csv << "local_time\n";
  for (double d : draws) csv << format_double(d) << '\n';
  if (o.out.empty()) {
    ctx.out << csv.str();
    return kOk;
  }
  {
    auto f = open_output(o.out);
    f << csv.str();
  }
  Manifest m;
  m.command = "oracle";
  m.args = ctx.args;
  if (!o.seed) m.args.insert(m.args.end(), {"--seed", std::to_string(seed)});
  m.master_seed = seed;
  m.params = {{"c", o.c}, {"a", o.a}, {"steps", o.steps}, {"paths", o.paths}, {"bandwidth", o.bandwidth}};
  m.outputs = {o.out};
  m.write(o.out);
  return kOk;
}

// ---------------------------------------------------------------------------
// replay

int cmd_replay(const std::string& path, Context& ctx) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::BadInput, "cannot open manifest '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::BadInput, std::string("invalid manifest: ") + e.what());
  }
  if (!j.contains("args") || !j["args"].is_array()) throw Error(Errc::BadInput, "manifest has no args");
  return run(j["args"].get<std::vector<std::string>>(), ctx.out, ctx.err);
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::DegenerateVariance: return kDegenerate;
    default: return kDataError;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx{args, out, err};
  CLI::App app{"Nonparametric predictive regression: simulation, estimation, testing and Monte Carlo"};
  // `--h` names the bandwidth, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.set_version_flag("--version", PREDREG_VERSION);

  SimulateOptions sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate a regressor/response path to CSV");
  simulate_cmd->add_option("--rho", sim.rho, "Fixed autoregressive root");
  simulate_cmd->add_option("--rho-rule", sim.rho_rule, "Persistence rule")
      ->check(CLI::IsMember({"stat", "mi", "lur", "unit"}));
  simulate_cmd->add_option("--c", sim.c, "Rule parameter c (mi, lur)");
  simulate_cmd->add_option("--a", sim.a, "Rule exponent a (mi)");
  simulate_cmd->add_option("--n", sim.n, "Sample size");
  simulate_cmd->add_option("--seed", sim.seed, "Seed (falls back to PREDREG_SEED)");
  simulate_cmd->add_option("--m", sim.m, "Regression function")
      ->check(CLI::IsMember({"zero", "constant", "linear", "logistic", "sine"}));
  simulate_cmd->add_option("--m-param", sim.m_param, "theta / slope / scale / freq");
  simulate_cmd->add_option("--m-cap", sim.m_cap, "Cap on |m| for the linear family");
  simulate_cmd->add_option("--filter", sim.filter, "MA coefficients, comma separated");
  simulate_cmd->add_option("--eps", sim.eps, "Regressor innovation law")
      ->check(CLI::IsMember({"gaussian", "laplace", "student_t"}));
  simulate_cmd->add_option("--u-law", sim.u_law, "Regression error law")
      ->check(CLI::IsMember({"gaussian", "laplace", "student_t"}));
  simulate_cmd->add_option("--df", sim.df, "Student-t degrees of freedom");
  simulate_cmd->add_option("--sigma-u", sim.sigma_u, "Regression error scale");
  simulate_cmd->add_option("--delta", sim.delta, "Lower margin for rho");
  simulate_cmd->add_option("--cbar", sim.cbar, "Allowed explosive overshoot");
  simulate_cmd->add_option("--out", sim.out, "Output CSV (stdout if omitted)");

  EstimateOptions est;
  auto* estimate_cmd = app.add_subcommand("estimate", "Pointwise estimates and confidence intervals");
  estimate_cmd->add_option("--in", est.in, "Input CSV (t,x,y or y,x; '-' for stdin)")->required();
  estimate_cmd->add_option("--points", est.points, "Spatial points, comma separated")->required();
  estimate_cmd->add_option("--kernel", est.kernel, "Kernel name");
  est.bw.attach(*estimate_cmd);
  estimate_cmd->add_option("--alpha", est.alpha, "Confidence level 1 - alpha");
  estimate_cmd->add_option("--theta", est.theta, "Null value for an added t-statistic column");
  estimate_cmd->add_option("--out", est.out, "Output CSV (stdout if omitted)");

  TestOptions tst;
  auto* test_cmd = app.add_subcommand("test", "Non-predictability tests F_sum and F_max");
  test_cmd->add_option("--in", tst.in, "Input CSV (t,x,y or y,x; '-' for stdin)")->required();
  test_cmd->add_option("--points", tst.points, "Spatial points, comma separated")->required();
  test_cmd->add_option("--kernel", tst.kernel, "Kernel name");
  tst.bw.attach(*test_cmd);
  test_cmd->add_option("--alpha", tst.alpha, "Test level");
  test_cmd->add_option("--out", tst.out, "Output JSON (stdout if omitted)");

  McOptions mc;
  auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo studies");
  mc_cmd->add_option("study", mc.study, "coverage | size | tstat | density")
      ->required()
      ->check(CLI::IsMember({"coverage", "size", "tstat", "density"}));
  mc_cmd->add_option("--config", mc.config, "JSON experiment config")->required();
  mc_cmd->add_option("--workers", mc.workers, "Worker threads (0 = all cores)");
  mc_cmd->add_option("--seed", mc.seed, "Master seed override");
  mc_cmd->add_option("--out", mc.out, "Output prefix")->required();
  mc_cmd->add_flag("--plot-data", mc.plot_data, "Also write tidy plot CSV");
  mc_cmd->add_flag("--quiet", mc.quiet, "Suppress progress lines");

  OracleOptions orc;
  auto* oracle_cmd = app.add_subcommand("oracle", "Local-time draws L_c(1,a) of the normalised OU process");
  oracle_cmd->add_option("--c", orc.c, "OU mean-reversion parameter c");
  oracle_cmd->add_option("--a", orc.a, "Spatial level a");
  oracle_cmd->add_option("--steps", orc.steps, "Grid steps per unit time");
  oracle_cmd->add_option("--paths", orc.paths, "Number of paths (draws)");
  oracle_cmd->add_option("--bandwidth", orc.bandwidth, "Occupation-density bandwidth");
  oracle_cmd->add_option("--seed", orc.seed, "Seed (falls back to PREDREG_SEED)");
  oracle_cmd->add_option("--out", orc.out, "Single-column CSV (stdout if omitted)");

  std::string manifest_path;
  auto* replay_cmd = app.add_subcommand("replay", "Rerun a command from its manifest");
  replay_cmd->add_option("--manifest", manifest_path, "Manifest JSON")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << PREDREG_VERSION << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }

  try {
    if (*simulate_cmd) return cmd_simulate(sim, ctx);
    if (*estimate_cmd) return cmd_estimate(est, ctx);
    if (*test_cmd) return cmd_test(tst, ctx);
    if (*mc_cmd) return cmd_mc(mc, ctx);
    if (*oracle_cmd) return cmd_oracle(orc, ctx);
    if (*replay_cmd) return cmd_replay(manifest_path, ctx);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace predreg::cli

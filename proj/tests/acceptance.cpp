// Acceptance run: one PASS/FAIL line per criterion, details indented below.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "predreg/distributions.hpp"
#include "predreg/dgp.hpp"
#include "predreg/error.hpp"
#include "predreg/estimate.hpp"
#include "predreg/limits.hpp"
#include "predreg/montecarlo.hpp"
#include "predreg/predictability.hpp"

using namespace predreg;

namespace {

constexpr std::uint64_t kSeed = 20240601;

struct Criterion {
  int id;
  std::string title;
  bool pass = true;
  std::vector<std::string> details;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "ok   " : "MISS ") + what);
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<PersistenceRule> grid_rules() {
  return {PersistenceRule::stationary(0.0),         PersistenceRule::stationary(0.5),
          PersistenceRule::stationary(0.9),         PersistenceRule::mildly_integrated(-1.0, 0.5),
          PersistenceRule::local_to_unity(-5.0),    PersistenceRule::unit_root()};
}

ExperimentConfig grid_config(std::vector<double> points) {
  ExperimentConfig c;
  c.base.m = RegressionFunction::zero();
  c.base.sigma_u = 1.0;
  c.rho_grid = grid_rules();
  c.n_grid = {2000};
  c.reps = 2000;
  c.alpha = 0.05;
  c.bandwidth = BandwidthRule::deterministic(1.0, 0.4);
  c.points = std::move(points);
  c.master_seed = kSeed;
  c.workers = 0;
  return c;
}

std::string cell_tag(const CellRecord& c) {
  std::string s = c.rule + " n=" + std::to_string(c.n);
  if (c.point) s += fmt(" x=%g", *c.point);
  if (c.point2) s += fmt(",%g", *c.point2);
  if (c.failures > 0) s += fmt(" failures=%lld/%lld", static_cast<long long>(c.failures), static_cast<long long>(c.reps));
  if (!c.valid) s += " [invalid: failure rate above 1%]";
  return s;
}

bool in_band(const CellRecord& c, double lo, double hi) { return c.valid && c.estimate >= lo && c.estimate <= hi; }

Criterion coverage() {
  Criterion k{1, "coverage probability in [0.92, 0.98] at x=0, n=2000, reps=2000, h=n^-0.4"};
  const McReport r = run_coverage(grid_config({0.0}));
  for (const auto& c : r.cells) {
    k.check(in_band(c, 0.92, 0.98), fmt("CP=%.4f (se %.4f) ", c.estimate, *c.mc_se) + cell_tag(c));
  }
  return k;
}

Criterion size() {
  Criterion k{2, "F_sum / F_max rejection rate in [0.03, 0.07], points {-1,0,1}"};
  ExperimentConfig cfg = grid_config({-1.0, 0.0, 1.0});
  cfg.base.m = RegressionFunction::constant(0.0);
  const McReport r = run_size(cfg);
  for (const auto& c : r.cells) {
    k.check(in_band(c, 0.03, 0.07), fmt("%s=%.4f (se %.4f) ", c.metric.c_str(), c.estimate, *c.mc_se) + cell_tag(c));
  }
  return k;
}

Criterion tstat() {
  Criterion k{3, "t-statistic KS to N(0,1) <= 0.05 per point; |corr(t(-1), t(1))| <= 0.1"};
  const McReport r = run_tstat_distribution(grid_config({-1.0, 0.0, 1.0}));
  for (const auto& c : r.cells) {
    if (c.metric == "ks_normal") {
      k.check(c.valid && c.estimate <= 0.05, fmt("KS=%.4f (p=%.3g) ", c.estimate, *c.p_value) + cell_tag(c));
    } else if (c.metric == "cross_corr" && *c.point == -1.0 && *c.point2 == 1.0) {
      k.check(c.valid && std::abs(c.estimate) <= 0.1, fmt("corr=%+.4f ", c.estimate) + cell_tag(c));
    }
  }
  return k;
}

Criterion density() {
  Criterion k{4, "spatial density: MI and stationary sup-error <= 0.05; LUR two-sample KS <= 0.1"};
  ExperimentConfig cfg;
  cfg.base.m = RegressionFunction::zero();
  cfg.rho_grid = {PersistenceRule::mildly_integrated(-1.0, 0.5), PersistenceRule::stationary(0.5),
                  PersistenceRule::local_to_unity(0.0), PersistenceRule::local_to_unity(-5.0)};
  cfg.n_grid = {5000};
  cfg.reps = 1000;
  cfg.master_seed = kSeed + 4;
  cfg.density.oracle.steps = 100000;
  cfg.density.oracle.paths = 2000;
  cfg.density.oracle.bandwidth = 0.02;
  const McReport r = run_density_convergence(cfg);
  for (const auto& c : r.cells) {
    if (c.metric == "density_sup_error") {
      k.check(c.valid && c.estimate <= 0.05, fmt("sup|mean mu_n - limit|=%.4f ", c.estimate) + cell_tag(c));
    } else if (c.metric == "density_ks") {
      k.check(c.valid && c.estimate <= 0.1, fmt("KS vs local-time oracle=%.4f (p=%.3g) ", c.estimate, *c.p_value) + cell_tag(c));
    }
  }
  return k;
}

Criterion norming_check() {
  Criterion k{5, "exact norming d_n^2 = g_n(rho) to 1e-10; MC var(x_n) within 4 s.e. incl. MA(2)"};
  const LinearFilter unit;
  const std::int64_t n = 2000;
  for (const auto& rule : grid_rules()) {
    const double rho = resolve_rho(rule, n);
    const double g = rho == 1.0 ? static_cast<double>(n) : (1.0 - std::pow(rho, 2.0 * n)) / (1.0 - rho * rho);
    DgpSpec s;
    s.persistence = rule;
    s.n = n;
    const Norming nm = norming(s);
    const double err = std::abs(nm.d_n * nm.d_n - g);
    k.check(err <= 1e-10, fmt("%s: d_n^2=%.15g g_n=%.15g |diff|=%.2e", rule.label().c_str(), nm.d_n * nm.d_n, g, err));
  }
  struct Cell {
    PersistenceRule rule;
    std::vector<double> phi;
    std::int64_t n;
  };
  const Cell cells[] = {{PersistenceRule::stationary(0.5), {1.0}, 50},
                        {PersistenceRule::stationary(0.9), {1.0, 0.5, -0.3}, 200},
                        {PersistenceRule::local_to_unity(-5.0), {1.0, 0.5, -0.3}, 200},
                        {PersistenceRule::unit_root(), {1.0}, 100}};
  const int reps = 10000;
  for (std::size_t ci = 0; ci < std::size(cells); ++ci) {
    const auto& c = cells[ci];
    DgpSpec s;
    s.persistence = c.rule;
    s.filter = LinearFilter(c.phi);
    s.n = c.n;
    double s1 = 0.0, s2 = 0.0, s4 = 0.0;
    for (int r = 0; r < reps; ++r) {
      const double x = simulate(s, derive_stream(kSeed + 5, ci, r)).x.back();
      s1 += x;
      s2 += x * x;
      s4 += x * x * x * x;
    }
    const double m = s1 / reps;
    const double var = s2 / reps - m * m;
    const double se = std::sqrt((s4 / reps - (s2 / reps) * (s2 / reps)) / reps);
    const double exact = exact_variance(s.filter, resolve_rho(c.rule, c.n), c.n);
    k.check(std::abs(var - exact) <= 4.0 * se,
            fmt("%s filter order %zu n=%lld: MC var=%.4f exact=%.4f se=%.4f", c.rule.label().c_str(),
                s.filter.order(), static_cast<long long>(c.n), var, exact, se));
  }
  return k;
}

Criterion oracle() {
  Criterion k{6, "local-time oracle: E L(1,0) within 0.03 of sqrt(2/pi); occupation integral 1 +- 0.02; omega^2(1)=1"};
  const double target = std::sqrt(2.0 / std::acos(-1.0));
  const OuPathSpec bm{0.0, 100000, 2000, kSeed + 6};
  const auto draws = ou_local_time(bm, 0.0, 0.02);
  const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / draws.size();
  k.check(std::abs(mean - target) <= 0.03, fmt("c=0 mean L(1,0)=%.4f target=%.4f", mean, target));

  for (double c : {0.0, -5.0}) {
    const OuPathSpec spec{c, 20000, 500, kSeed + 7};
    std::vector<double> levels;
    const double da = 0.01;
    for (double a = -7.0; a <= 7.0 + 1e-9; a += da) levels.push_back(a);
    const auto grid = ou_local_time(spec, levels, 0.02);
    double mass = 0.0;
    for (const auto& row : grid) mass += std::accumulate(row.begin(), row.end(), 0.0) * da / grid.size();
    k.check(std::abs(mass - 1.0) <= 0.02, fmt("c=%g integral of mean L(1,a) da=%.5f", c, mass));
  }
  bool exact = true;
  for (std::int64_t n : {1, 2, 100, 2000, 1000000}) exact = exact && omega_sq(1.0, n) == 1.0;
  k.check(exact, "omega^2(rho=1, n) == 1 exactly for n in {1, 2, 100, 2000, 1e6}");
  return k;
}

Criterion numerics() {
  Criterion k{7, "normal and chi-square round trips <= 1e-8; chi2_quantile(1,.95) = z_.975^2 to 1e-9"};
  double worst_n = 0.0, worst_c = 0.0;
  for (double p = 1e-6; p < 1.0; p += 0.0005) worst_n = std::max(worst_n, std::abs(normal_cdf(normal_quantile(p)) - p));
  for (double x = -8.0; x <= 8.0; x += 0.01) {
    const double p = normal_cdf(x);
    if (p > 1e-300 && p < 1.0) worst_n = std::max(worst_n, std::abs(normal_cdf(normal_quantile(p)) - p));
  }
  for (int df : {1, 2, 3, 4, 5, 10, 20, 50}) {
    for (double p = 1e-4; p < 1.0; p += 0.001) worst_c = std::max(worst_c, std::abs(chi2_cdf(df, chi2_quantile(df, p)) - p));
  }
  k.check(worst_n <= 1e-8, fmt("max |Phi(Phi^-1(p)) - p| = %.2e", worst_n));
  k.check(worst_c <= 1e-8, fmt("max |F(F^-1(p)) - p| over df in {1..50} = %.2e", worst_c));
  const double z = normal_quantile(0.975);
  const double d = std::abs(chi2_quantile(1, 0.95) - z * z);
  k.check(d <= 1e-9, fmt("chi2_quantile(1,0.95)=%.15g z^2=%.15g diff=%.2e", chi2_quantile(1, 0.95), z * z, d));
  return k;
}

Criterion invariants() {
  Criterion k{8, "affine invariance of F statistics to 1e-9; CI/t duality at +-1e-9; bit-identical MC across workers"};
  DgpSpec s;
  s.persistence = PersistenceRule::stationary(0.9);
  s.m = RegressionFunction::sine(0.7);
  s.n = 2000;
  const Sample sm = simulate(s, kSeed + 8);
  const RegressionData d = sm.data();
  const Kernel kern;
  const std::vector<double> pts = {-1.0, 0.0, 1.0};
  const double h = BandwidthRule::deterministic().bandwidth(d.x);
  const PredTestResult base = predictability_test(d, kern, pts, h, 0.05);
  double worst = 0.0;
  for (double a : {2.0, -3.5, 0.01, 1e3}) {
    for (double b : {0.0, 5.0, -100.0}) {
      std::vector<double> y(d.y.begin(), d.y.end());
      for (double& v : y) v = a * v + b;
      const PredTestResult r = predictability_test(RegressionData{d.x, y}, kern, pts, h, 0.05);
      worst = std::max({worst, std::abs(r.f_sum - base.f_sum), std::abs(r.f_max - base.f_max)});
    }
  }
  k.check(worst <= 1e-9, fmt("max |F(a y + b) - F(y)| = %.2e over 12 affine maps", worst));

  const double z = normal_quantile(0.975);
  bool dual = true;
  for (double x : pts) {
    const auto [lo, hi] = conf_interval(d, kern, x, h, 0.05);
    dual = dual && std::abs(t_stat(d, kern, x, h, hi - 1e-9)) < z && std::abs(t_stat(d, kern, x, h, hi + 1e-9)) > z;
    dual = dual && std::abs(t_stat(d, kern, x, h, lo + 1e-9)) < z && std::abs(t_stat(d, kern, x, h, lo - 1e-9)) > z;
  }
  k.check(dual, "theta inside CI by 1e-9 => |t| < z; outside by 1e-9 => |t| > z, at x in {-1,0,1}");

  ExperimentConfig cfg = grid_config({-1.0, 0.0, 1.0});
  cfg.n_grid = {500};
  cfg.reps = 200;
  cfg.density.oracle.steps = 10000;
  cfg.density.oracle.paths = 200;
  const std::pair<const char*, std::function<McReport(const ExperimentConfig&)>> studies[] = {
      {"coverage", [](const ExperimentConfig& c) { return run_coverage(c); }},
      {"size", [](const ExperimentConfig& c) { return run_size(c); }},
      {"tstat", [](const ExperimentConfig& c) { return run_tstat_distribution(c); }},
      {"density", [](const ExperimentConfig& c) { return run_density_convergence(c); }}};
  for (const auto& [name, run] : studies) {
    cfg.workers = 1;
    std::ostringstream ref;
    ref << run(cfg).to_json().dump();
    bool same = true;
    for (unsigned w : {4u, 16u}) {
      cfg.workers = w;
      same = same && run(cfg).to_json().dump() == ref.str();
    }
    k.check(same, std::string(name) + " report identical for 1, 4 and 16 workers");
  }
  return k;
}

}  // namespace

int main() {
  const std::function<Criterion()> all[] = {coverage, size, tstat, density, norming_check, oracle, numerics, invariants};
  int failed = 0;
  for (std::size_t i = 0; i < std::size(all); ++i) {
    const auto& run = all[i];
    const auto start = std::chrono::steady_clock::now();
    Criterion c{static_cast<int>(i + 1), "(aborted)"};
    try {
      c = run();
    } catch (const std::exception& e) {
      c.pass = false;
      c.details.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d: %s (%.1fs)\n", c.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), secs);
    for (const auto& line : c.details) std::printf("    %s\n", line.c_str());
    std::fflush(stdout);
    failed += c.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(all)) - failed, std::size(all));
  return failed == 0 ? 0 : 1;
}

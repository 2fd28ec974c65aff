#include "predreg/montecarlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include "predreg/config.hpp"
#include "predreg/distributions.hpp"
#include "predreg/error.hpp"
#include "predreg/parallel.hpp"
#include "predreg/predictability.hpp"
#include "predreg/sample_io.hpp"

namespace predreg {

namespace {

using Clock = std::chrono::steady_clock;

struct Cell {
  std::size_t id;
  DgpSpec spec;
  double rho_n;
  std::string label;
};

std::vector<Cell> make_cells(const ExperimentConfig& config) {
  std::vector<Cell> cells;
  for (std::size_t r = 0; r < config.rho_grid.size(); ++r) {
    for (std::size_t k = 0; k < config.n_grid.size(); ++k) {
      Cell c;
      c.id = r * config.n_grid.size() + k;
      c.spec = config.cell_spec(r, k);
      c.rho_n = resolve_rho(c.spec.persistence, c.spec.n);
      c.label = c.spec.persistence.label() + "/n=" + std::to_string(c.spec.n);
      cells.push_back(std::move(c));
    }
  }
  return cells;
}

std::uint64_t rep_seed(const ExperimentConfig& config, const Cell& cell, std::int64_t rep) {
  return derive_stream(config.master_seed, cell.id, static_cast<std::uint64_t>(rep));
}

CellRecord base_record(const Cell& cell, std::string metric, std::int64_t reps) {
  CellRecord r;
  r.rule = cell.spec.persistence.label();
  r.rho_n = cell.rho_n;
  r.n = cell.spec.n;
  r.metric = std::move(metric);
  r.reps = reps;
  return r;
}

void finish_validity(CellRecord& r) {
  r.valid = static_cast<double>(r.failures) <= kMaxFailureRate * static_cast<double>(r.reps) &&
            r.reps_effective > 0;
}

// Binomial-rate record from outcomes coded -1 (failed), 0, 1.
CellRecord rate_record(const Cell& cell, std::string metric, std::optional<double> point,
                       std::span<const std::int8_t> outcomes, std::size_t stride,
                       std::size_t offset) {
  const auto reps = static_cast<std::int64_t>(outcomes.size() / stride);
  CellRecord r = base_record(cell, std::move(metric), reps);
  r.point = point;
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < reps; ++i) {
    const std::int8_t o = outcomes[static_cast<std::size_t>(i) * stride + offset];
    if (o < 0) {
      ++r.failures;
    } else {
      ++r.reps_effective;
      hits += o;
    }
  }
  r.estimate = r.reps_effective > 0 ? static_cast<double>(hits) / static_cast<double>(r.reps_effective)
                                    : std::numeric_limits<double>::quiet_NaN();
  if (r.reps_effective > 0) r.mc_se = binomial_se(r.estimate, r.reps_effective);
  finish_validity(r);
  return r;
}

template <class CellFn>
McReport run_cells(const ExperimentConfig& config, std::string study, const ProgressFn& progress,
                   CellFn&& fn) {
  config.validate();
  const auto start = Clock::now();
  McReport report;
  report.study = std::move(study);
  report.config_digest = experiment_digest(config);
  const auto cells = make_cells(config);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    fn(cells[i], report.cells);
    if (progress) {
      const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
      const double per_cell = elapsed / static_cast<double>(i + 1);
      progress({cells[i].label, i + 1, cells.size(), per_cell * static_cast<double>(cells.size() - i - 1)});
    }
  }
  report.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return report;
}

void add_extremes(McReport& report, const std::string& metric) {
  // Group by (n, point); only valid cells enter the min/max.
  std::vector<GridExtremes> groups;
  for (const auto& c : report.cells) {
    if (c.metric != metric || !c.valid) continue;
    auto it = std::find_if(groups.begin(), groups.end(), [&](const GridExtremes& g) {
      return g.n == c.n && g.point == c.point;
    });
    if (it == groups.end()) {
      groups.push_back({metric, c.n, c.point, c.estimate, c.estimate, c.rule, c.rule, 1});
      continue;
    }
    if (c.estimate < it->min) {
      it->min = c.estimate;
      it->argmin = c.rule;
    }
    if (c.estimate > it->max) {
      it->max = c.estimate;
      it->argmax = c.rule;
    }
    ++it->cells;
  }
  report.extremes.insert(report.extremes.end(), groups.begin(), groups.end());
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sd_of(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double correlation(std::span<const double> a, std::span<const double> b) {
  const double ma = mean_of(a);
  const double mb = mean_of(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

bool is_statistical_failure(const Error& e) {
  return e.code() == Errc::NoLocalMass || e.code() == Errc::DegenerateVariance;
}

nlohmann::json optional_json(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

std::string optional_csv(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

}  // namespace

// ---------------------------------------------------------------------------

double DensitySettings::bandwidth(double d_n, std::int64_t n) const {
  return c_h * d_n * std::pow(static_cast<double>(n), -gamma);
}

void ExperimentConfig::validate() const {
  if (rho_grid.empty()) throw Error(Errc::Config, "$.rho_grid: must not be empty");
  if (n_grid.empty()) throw Error(Errc::Config, "$.n_grid: must not be empty");
  if (reps < 100) throw Error(Errc::Config, "$.reps: must be >= 100");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::Config, "$.alpha: must lie in (0,1)");
  if (points.empty()) throw Error(Errc::Config, "$.points: must not be empty");
  if (density.grid.empty()) throw Error(Errc::Config, "$.density.grid: must not be empty");
  if (!(density.c_h > 0.0)) throw Error(Errc::Config, "$.density.c_h: must be positive");
  for (std::size_t r = 0; r < rho_grid.size(); ++r) {
    for (std::size_t k = 0; k < n_grid.size(); ++k) {
      try {
        cell_spec(r, k).validate();
      } catch (const Error& e) {
        throw Error(Errc::Config, "$.rho_grid[" + std::to_string(r) + "] at $.n_grid[" +
                                      std::to_string(k) + "]: " + e.what());
      }
    }
  }
}

DgpSpec ExperimentConfig::cell_spec(std::size_t rule_index, std::size_t n_index) const {
  DgpSpec spec = base;
  const double delta = base.persistence.delta;
  const double cbar = base.persistence.cbar;
  spec.persistence = rho_grid.at(rule_index);
  spec.persistence.delta = delta;
  spec.persistence.cbar = cbar;
  spec.n = n_grid.at(n_index);
  return spec;
}

std::vector<const CellRecord*> McReport::find(std::string_view metric,
                                              std::optional<double> point) const {
  std::vector<const CellRecord*> out;
  for (const auto& c : cells) {
    if (c.metric == metric && (!point || c.point == point)) out.push_back(&c);
  }
  return out;
}

nlohmann::json McReport::to_json() const {
  nlohmann::json j;
  j["study"] = study;
  j["config_digest"] = std::to_string(config_digest);
  auto& cj = j["cells"] = nlohmann::json::array();
  for (const auto& c : cells) {
    cj.push_back({{"rule", c.rule},
                  {"rho_n", c.rho_n},
                  {"n", c.n},
                  {"metric", c.metric},
                  {"point", optional_json(c.point)},
                  {"point2", optional_json(c.point2)},
                  {"estimate", optional_json(c.estimate)},
                  {"mc_se", optional_json(c.mc_se)},
                  {"reference", optional_json(c.reference)},
                  {"p_value", optional_json(c.p_value)},
                  {"reps", c.reps},
                  {"reps_effective", c.reps_effective},
                  {"failures", c.failures},
                  {"valid", c.valid}});
  }
  auto& ej = j["grid_extremes"] = nlohmann::json::array();
  for (const auto& e : extremes) {
    ej.push_back({{"metric", e.metric},
                  {"n", e.n},
                  {"point", optional_json(e.point)},
                  {"min", e.min},
                  {"max", e.max},
                  {"argmin", e.argmin},
                  {"argmax", e.argmax},
                  {"cells", e.cells}});
  }
  return j;
}

void McReport::write_csv(std::ostream& out) const {
  out << "study,rule,rho_n,n,metric,point,point2,estimate,mc_se,reference,p_value,reps,"
         "reps_effective,failures,valid\n";
  for (const auto& c : cells) {
    out << study << ',' << csv_quote(c.rule) << ',' << format_double(c.rho_n) << ',' << c.n << ','
        << c.metric << ',' << optional_csv(c.point) << ',' << optional_csv(c.point2) << ','
        << format_double(c.estimate) << ',' << optional_csv(c.mc_se) << ','
        << optional_csv(c.reference) << ',' << optional_csv(c.p_value) << ',' << c.reps << ','
        << c.reps_effective << ',' << c.failures << ',' << (c.valid ? "true" : "false") << '\n';
  }
}

// ---------------------------------------------------------------------------

McReport run_coverage(const ExperimentConfig& config, const ProgressFn& progress) {
  McReport report = run_cells(config, "coverage", progress, [&](const Cell& cell, auto& records) {
    const std::size_t npts = config.points.size();
    const auto reps = static_cast<std::size_t>(config.reps);
    std::vector<std::int8_t> outcomes(reps * npts, -1);
    parallel_for(reps, config.workers, [&](std::size_t rep) {
      const Sample s = simulate(cell.spec, rep_seed(config, cell, static_cast<std::int64_t>(rep)));
      const RegressionData data = s.data();
      const double h = config.bandwidth.bandwidth(data.x);
      for (std::size_t p = 0; p < npts; ++p) {
        const double x = config.points[p];
        try {
          const PointInference pi = infer_point(data, config.kernel, x, h, config.alpha);
          const double truth = cell.spec.m(x);
          outcomes[rep * npts + p] = (pi.ci_lo <= truth && truth <= pi.ci_hi) ? 1 : 0;
        } catch (const Error& e) {
          if (!is_statistical_failure(e)) throw;
        }
      }
    });
    for (std::size_t p = 0; p < npts; ++p) {
      CellRecord r = rate_record(cell, "coverage", config.points[p], outcomes, npts, p);
      r.reference = 1.0 - config.alpha;
      records.push_back(std::move(r));
    }
  });
  add_extremes(report, "coverage");
  return report;
}

McReport run_size(const ExperimentConfig& config, const ProgressFn& progress) {
  McReport report = run_cells(config, "size", progress, [&](const Cell& cell, auto& records) {
    const auto reps = static_cast<std::size_t>(config.reps);
    std::vector<std::int8_t> outcomes(reps * 2, -1);
    parallel_for(reps, config.workers, [&](std::size_t rep) {
      const Sample s = simulate(cell.spec, rep_seed(config, cell, static_cast<std::int64_t>(rep)));
      try {
        const PredTestResult r =
            predictability_test(s.data(), config.kernel, config.points, config.bandwidth, config.alpha);
        outcomes[rep * 2] = r.reject_sum ? 1 : 0;
        outcomes[rep * 2 + 1] = r.reject_max ? 1 : 0;
      } catch (const Error& e) {
        if (!is_statistical_failure(e)) throw;
      }
    });
    for (std::size_t k = 0; k < 2; ++k) {
      CellRecord r = rate_record(cell, k == 0 ? "reject_sum" : "reject_max", std::nullopt, outcomes, 2, k);
      r.reference = config.alpha;
      records.push_back(std::move(r));
    }
  });
  add_extremes(report, "reject_sum");
  add_extremes(report, "reject_max");
  return report;
}

McReport run_tstat_distribution(const ExperimentConfig& config, const ProgressFn& progress) {
  return run_cells(config, "tstat", progress, [&](const Cell& cell, auto& records) {
    const std::size_t npts = config.points.size();
    const auto reps = static_cast<std::size_t>(config.reps);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> tvals(reps * npts, nan);
    parallel_for(reps, config.workers, [&](std::size_t rep) {
      const std::uint64_t seed = rep_seed(config, cell, static_cast<std::int64_t>(rep));
      if (config.self_test) {
        Rng rng(derive_stream(seed, 0x5e1f));
        for (std::size_t p = 0; p < npts; ++p) tvals[rep * npts + p] = rng.normal();
        return;
      }
      const Sample s = simulate(cell.spec, seed);
      const RegressionData data = s.data();
      const double h = config.bandwidth.bandwidth(data.x);
      for (std::size_t p = 0; p < npts; ++p) {
        const double x = config.points[p];
        try {
          tvals[rep * npts + p] = t_stat(data, config.kernel, x, h, cell.spec.m(x));
        } catch (const Error& e) {
          if (!is_statistical_failure(e)) throw;
        }
      }
    });

    auto column = [&](std::size_t p) {
      std::vector<double> v;
      for (std::size_t i = 0; i < reps; ++i) {
        if (!std::isnan(tvals[i * npts + p])) v.push_back(tvals[i * npts + p]);
      }
      return v;
    };
    for (std::size_t p = 0; p < npts; ++p) {
      const auto v = column(p);
      CellRecord r = base_record(cell, "ks_normal", config.reps);
      r.point = config.points[p];
      r.reps_effective = static_cast<std::int64_t>(v.size());
      r.failures = r.reps - r.reps_effective;
      if (!v.empty()) {
        r.estimate = ks_statistic(v, [](double x) { return normal_cdf(x); });
        r.p_value = kolmogorov_pvalue(r.estimate, static_cast<double>(v.size()));
      } else {
        r.estimate = nan;
      }
      finish_validity(r);
      records.push_back(std::move(r));
    }
    for (std::size_t p = 0; p < npts; ++p) {
      for (std::size_t q = p + 1; q < npts; ++q) {
        std::vector<double> a, b;
        for (std::size_t i = 0; i < reps; ++i) {
          const double tp = tvals[i * npts + p];
          const double tq = tvals[i * npts + q];
          if (!std::isnan(tp) && !std::isnan(tq)) {
            a.push_back(tp);
            b.push_back(tq);
          }
        }
        CellRecord r = base_record(cell, "cross_corr", config.reps);
        r.point = config.points[p];
        r.point2 = config.points[q];
        r.reps_effective = static_cast<std::int64_t>(a.size());
        r.failures = r.reps - r.reps_effective;
        r.reference = 0.0;
        if (a.size() >= 3) {
          r.estimate = correlation(a, b);
          r.mc_se = (1.0 - r.estimate * r.estimate) / std::sqrt(static_cast<double>(a.size()));
        } else {
          r.estimate = nan;
        }
        finish_validity(r);
        records.push_back(std::move(r));
      }
    }
  });
}

McReport run_density_convergence(const ExperimentConfig& config, const ProgressFn& progress) {
  return run_cells(config, "density", progress, [&](const Cell& cell, auto& records) {
    const Norming norm = norming(cell.spec);
    const double h = config.density.bandwidth(norm.d_n, cell.spec.n);
    const SpatialRegime regime =
        SpatialRegime::for_rule(cell.spec.persistence, cell.spec.eps_law, cell.spec.filter);
    const auto reps = static_cast<std::size_t>(config.reps);

    if (regime.kind == SpatialRegime::Kind::LocalToUnity) {
      std::vector<double> mu(reps);
      parallel_for(reps, config.workers, [&](std::size_t rep) {
        const Sample s = simulate(cell.spec, rep_seed(config, cell, static_cast<std::int64_t>(rep)));
        mu[rep] = spatial_density(s.regressor(), norm.d_n, config.kernel, h, 1.0, 0.0);
      });
      LocalTimeOracle oracle = config.density.oracle;
      oracle.seed = derive_stream(config.master_seed, cell.id, 0x10ca1713eULL);
      oracle.workers = config.workers;
      const std::vector<double> draws = SpatialLimit(regime, oracle).draws(0.0);

      CellRecord ks = base_record(cell, "density_ks", config.reps);
      ks.point = 0.0;
      ks.reps_effective = config.reps;
      ks.estimate = ks_two_sample(mu, draws);
      const double n1 = static_cast<double>(mu.size());
      const double n2 = static_cast<double>(draws.size());
      ks.p_value = kolmogorov_pvalue(ks.estimate, n1 * n2 / (n1 + n2));
      finish_validity(ks);
      records.push_back(ks);

      CellRecord mean = base_record(cell, "density_mean", config.reps);
      mean.point = 0.0;
      mean.reps_effective = config.reps;
      mean.estimate = mean_of(mu);
      mean.mc_se = sd_of(mu) / std::sqrt(n1);
      mean.reference = mean_of(draws);
      finish_validity(mean);
      records.push_back(mean);
      return;
    }

    const SpatialLimit limit(regime);
    const auto& grid = config.density.grid;
    std::vector<double> mu(reps * grid.size());
    parallel_for(reps, config.workers, [&](std::size_t rep) {
      const Sample s = simulate(cell.spec, rep_seed(config, cell, static_cast<std::int64_t>(rep)));
      for (std::size_t g = 0; g < grid.size(); ++g) {
        mu[rep * grid.size() + g] = spatial_density(s.regressor(), norm.d_n, config.kernel, h, 1.0, grid[g]);
      }
    });
    CellRecord sup = base_record(cell, "density_sup_error", config.reps);
    sup.reps_effective = config.reps;
    sup.estimate = -1.0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      std::vector<double> col(reps);
      for (std::size_t i = 0; i < reps; ++i) col[i] = mu[i * grid.size() + g];
      CellRecord mean = base_record(cell, "density_mean", config.reps);
      mean.point = grid[g];
      mean.reps_effective = config.reps;
      mean.estimate = mean_of(col);
      mean.mc_se = sd_of(col) / std::sqrt(static_cast<double>(reps));
      mean.reference = limit.density(grid[g]);
      finish_validity(mean);
      const double err = std::abs(mean.estimate - *mean.reference);
      if (err > sup.estimate) {
        sup.estimate = err;
        sup.point = grid[g];
        sup.mc_se = mean.mc_se;
      }
      records.push_back(std::move(mean));
    }
    sup.reference = 0.0;
    finish_validity(sup);
    records.push_back(std::move(sup));
  });
}

// ---------------------------------------------------------------------------

double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw Error(Errc::BadInput, "KS statistic of an empty sample");
  std::vector<double> v(sample.begin(), sample.end());
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = cdf(v[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(Errc::BadInput, "KS statistic of an empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

double kolmogorov_pvalue(double d, double n_eff) {
  const double sn = std::sqrt(n_eff);
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

double binomial_se(double p, std::int64_t reps) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
}

}  // namespace predreg

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "predreg/dgp.hpp"
#include "predreg/estimate.hpp"
#include "predreg/kernel.hpp"
#include "predreg/limits.hpp"

namespace predreg {

//! Spatial-density study settings. Density bandwidth is h = c_h d_n n^{-gamma}.
struct DensitySettings {
  std::vector<double> grid = {-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0};
  double c_h = 1.0;
  double gamma = 1.0 / 3.0;
  LocalTimeOracle oracle;

  double bandwidth(double d_n, std::int64_t n) const;
};

struct ExperimentConfig {
  DgpSpec base;  // n is taken from n_grid per cell
  std::vector<PersistenceRule> rho_grid;
  std::vector<std::int64_t> n_grid;
  std::int64_t reps = 1000;
  double alpha = 0.05;
  Kernel kernel;
  BandwidthRule bandwidth;
  std::vector<double> points = {0.0};
  DensitySettings density;
  std::uint64_t master_seed = 1;
  unsigned workers = 0;
  //! t-statistic study only: replace t values by exact N(0,1) draws.
  bool self_test = false;

  //! Throws Config naming the offending field.
  void validate() const;
  //! DGP for grid cell (rule, n).
  DgpSpec cell_spec(std::size_t rule_index, std::size_t n_index) const;
  std::size_t cell_count() const noexcept { return rho_grid.size() * n_grid.size(); }
};

//! One (cell, metric[, point]) result.
struct CellRecord {
  std::string rule;
  double rho_n = 0.0;
  std::int64_t n = 0;
  std::string metric;
  std::optional<double> point;
  std::optional<double> point2;
  double estimate = 0.0;
  std::optional<double> mc_se;
  std::optional<double> reference;
  std::optional<double> p_value;
  std::int64_t reps = 0;
  std::int64_t reps_effective = 0;
  std::int64_t failures = 0;
  bool valid = true;
};

//! min/max of a rate metric across the persistence grid (AsySz / AsyMaxCP proxies).
struct GridExtremes {
  std::string metric;
  std::int64_t n = 0;
  std::optional<double> point;
  double min = 0.0;
  double max = 0.0;
  std::string argmin;
  std::string argmax;
  std::int64_t cells = 0;
};

struct McReport {
  std::string study;
  std::vector<CellRecord> cells;
  std::vector<GridExtremes> extremes;
  std::uint64_t config_digest = 0;
  double wall_seconds = 0.0;

  //! Records matching a metric (and point, when given).
  std::vector<const CellRecord*> find(std::string_view metric,
                                      std::optional<double> point = std::nullopt) const;

  //! Full nested report. Wall time is omitted so that reruns are byte-identical.
  nlohmann::json to_json() const;
  //! One row per cell x metric.
  void write_csv(std::ostream& out) const;
};

struct Progress {
  std::string cell;
  std::size_t done = 0;
  std::size_t total = 0;
  double eta_seconds = 0.0;
};
using ProgressFn = std::function<void(const Progress&)>;

McReport run_coverage(const ExperimentConfig& config, const ProgressFn& progress = {});
McReport run_size(const ExperimentConfig& config, const ProgressFn& progress = {});
McReport run_tstat_distribution(const ExperimentConfig& config, const ProgressFn& progress = {});
McReport run_density_convergence(const ExperimentConfig& config, const ProgressFn& progress = {});

//! Fraction of failed replications above which a cell is flagged invalid.
inline constexpr double kMaxFailureRate = 0.01;

//! sup_x |F_n(x) - F(x)|. Throws BadInput on an empty sample.
double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf);
//! sup_x |F_a(x) - F_b(x)|. Throws BadInput on an empty sample.
double ks_two_sample(std::span<const double> a, std::span<const double> b);
//! Asymptotic Kolmogorov tail probability P(sqrt(n_eff) D > sqrt(n_eff) d).
double kolmogorov_pvalue(double d, double n_eff);

//! Binomial Monte Carlo standard error sqrt(p(1-p)/reps).
double binomial_se(double p, std::int64_t reps);

}  // namespace predreg

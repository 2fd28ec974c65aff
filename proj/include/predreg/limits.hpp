#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "predreg/dgp.hpp"
#include "predreg/kernel.hpp"

namespace predreg {

double gaussian_density(double a) noexcept;

//! Variance of the stationary solution of x_t = rho x_{t-1} + v_t, |rho| < 1.
double stationary_variance(const LinearFilter& filter, double rho);

/*!
 * Unit-variance stationary density nu_rho.
 *
 * Exact for Gaussian innovations (nu_rho = phi for every filter and rho) and
 * for rho = 0 with a single-coefficient filter (nu_rho is the innovation
 * density). Otherwise it is a simulation oracle: a long stationary path,
 * standardized by the exact stationary variance, smoothed by a Gaussian
 * kernel with Silverman's rule-of-thumb bandwidth.
 */
class StationaryDensity {
 public:
  //! Exact when possible, simulated otherwise. Throws NotStationary unless |rho| < 1.
  static StationaryDensity make(const InnovationLaw& law, const LinearFilter& filter, double rho,
                                std::uint64_t seed = 0x5eed, std::size_t length = 200000);
  //! Always the simulation oracle.
  static StationaryDensity simulated(const InnovationLaw& law, const LinearFilter& filter,
                                     double rho, std::uint64_t seed = 0x5eed,
                                     std::size_t length = 200000);

  double operator()(double a) const;
  bool approximate() const noexcept { return !standardized_.empty(); }
  double bandwidth() const noexcept { return bandwidth_; }

 private:
  InnovationLaw law_ = InnovationLaw::gaussian();
  double sign_ = 1.0;
  std::vector<double> standardized_;
  double bandwidth_ = 0.0;
};

double stationary_density(const InnovationLaw& law, const LinearFilter& filter, double rho,
                          double a);

//! Grid OU simulation settings.
struct OuPathSpec {
  double c = 0.0;
  std::int64_t steps = 100000;
  std::int64_t paths = 2000;
  std::uint64_t seed = 0;
};

//! Exact-discretization path of the unit-variance OU process J_c on {i/N}, i = 0..N.
std::vector<double> simulate_ou_path(const OuPathSpec& spec, std::int64_t path);
std::vector<std::vector<double>> simulate_ou(const OuPathSpec& spec, unsigned workers = 0);

//! Exact covariance cov(J_c(r), J_c(s)) of the normalized process.
double ou_covariance(double c, double r, double s);

/*!
 * Discretized occupation density (1/N) sum_i K_bw(J(i/N) - a) with the
 * Epanechnikov kernel, one value per path. Throws BadBandwidth unless
 * bandwidth lies in [N^{-1/2}/10, 0.1].
 */
std::vector<double> ou_local_time(const OuPathSpec& spec, double a, double bandwidth,
                                  unsigned workers = 0);

//! Same at several levels; result[path][level].
std::vector<std::vector<double>> ou_local_time(const OuPathSpec& spec, std::span<const double> levels,
                                               double bandwidth, unsigned workers = 0);

//! Limit regime named by a persistence rule.
struct SpatialRegime {
  enum class Kind { Stationary, MildlyIntegrated, LocalToUnity };

  Kind kind = Kind::MildlyIntegrated;
  double rho = 0.0;  // Stationary
  double c = 0.0;    // LocalToUnity
  InnovationLaw law = InnovationLaw::gaussian();
  LinearFilter filter;

  static SpatialRegime for_rule(const PersistenceRule& rule, const InnovationLaw& law,
                                const LinearFilter& filter);
};

struct LocalTimeOracle {
  std::int64_t steps = 100000;
  std::int64_t paths = 2000;
  double bandwidth = 0.02;
  std::uint64_t seed = 0x10ca1;
  unsigned workers = 0;
};

//! Limit of mu_n(1, a): a deterministic density, or local-time draws under LUR.
class SpatialLimit {
 public:
  explicit SpatialLimit(SpatialRegime regime, LocalTimeOracle oracle = {});

  const SpatialRegime& regime() const noexcept { return regime_; }
  bool deterministic() const noexcept { return regime_.kind != SpatialRegime::Kind::LocalToUnity; }
  //! Deterministic branches only.
  double density(double a) const;
  //! LUR branch only: oracle draws of L_c(1, a).
  std::vector<double> draws(double a) const;

 private:
  SpatialRegime regime_;
  LocalTimeOracle oracle_;
  std::vector<StationaryDensity> stationary_;  // 0 or 1 entries
};

//! Draws (or the constant value) of the mixing variate in the t-statistic variance.
class EtaSampler {
 public:
  bool degenerate() const noexcept { return draws_.size() == 1 && degenerate_; }
  //! Degenerate value, or the first draw.
  double value() const noexcept { return draws_.front(); }
  const std::vector<double>& draws() const noexcept { return draws_; }

 private:
  friend EtaSampler eta_sampler(const SpatialRegime&, double, double, const Kernel&,
                                const LocalTimeOracle&);
  std::vector<double> draws_;
  bool degenerate_ = true;
};

EtaSampler eta_sampler(const SpatialRegime& regime, double x, double sigma_u, const Kernel& k,
                       const LocalTimeOracle& oracle = {});

}  // namespace predreg

#include "predreg/limits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "predreg/error.hpp"
#include "predreg/parallel.hpp"
#include "predreg/rng.hpp"

namespace predreg {

namespace {

void require_stationary(double rho) {
  if (!(std::abs(rho) < 1.0)) {
    throw Error(Errc::NotStationary, "stationary density needs |rho| < 1, got " + std::to_string(rho));
  }
}

// Var of the unnormalized OU integral over [0, r]: (e^{2cr} - 1) / (2c).
double ou_raw_variance(double c, double r) {
  if (c == 0.0) return r;
  return std::expm1(2.0 * c * r) / (2.0 * c);
}

double sample_sd(std::span<const double> v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

double gaussian_density(double a) noexcept {
  return std::exp(-0.5 * a * a) / std::sqrt(2.0 * std::numbers::pi);
}

double stationary_variance(const LinearFilter& filter, double rho) {
  require_stationary(rho);
  // sum_k a_k^2 with a_k = rho a_{k-1} + phi_k; geometric tail after the filter order.
  double a = 0.0;
  double sum = 0.0;
  const std::size_t order = filter.order();
  for (std::size_t k = 0; k <= order; ++k) {
    a = rho * a + filter[k];
    sum += a * a;
  }
  const double r2 = rho * rho;
  return sum + a * a * r2 / (1.0 - r2);
}

// ---------------------------------------------------------------------------
// StationaryDensity

StationaryDensity StationaryDensity::make(const InnovationLaw& law, const LinearFilter& filter,
                                          double rho, std::uint64_t seed, std::size_t length) {
  require_stationary(rho);
  if (law.kind() == InnovationLaw::Kind::Gaussian) {
    StationaryDensity d;
    return d;
  }
  if (rho == 0.0 && filter.order() == 0) {
    StationaryDensity d;
    d.law_ = law;
    d.sign_ = filter[0] < 0.0 ? -1.0 : 1.0;
    return d;
  }
  return simulated(law, filter, rho, seed, length);
}

StationaryDensity StationaryDensity::simulated(const InnovationLaw& law, const LinearFilter& filter,
                                               double rho, std::uint64_t seed, std::size_t length) {
  require_stationary(rho);
  if (length < 100) throw Error(Errc::BadInput, "stationary oracle needs a longer path");
  const double sd = std::sqrt(stationary_variance(filter, rho));
  const std::size_t order = filter.order();
  // Burn-in until rho^burn is negligible against the stationary spread.
  std::size_t burn = order + 1;
  if (rho != 0.0) burn += static_cast<std::size_t>(std::ceil(std::log(1e-16) / std::log(std::abs(rho))));

  Rng rng(derive_stream(seed, 0x57a7));
  std::vector<double> eps(order + 1, 0.0);
  for (auto& e : eps) e = law.draw(rng);
  StationaryDensity d;
  d.law_ = law;
  d.standardized_.reserve(length);
  double x = 0.0;
  for (std::size_t t = 0; t < burn + length; ++t) {
    std::rotate(eps.rbegin(), eps.rbegin() + 1, eps.rend());
    eps[0] = law.draw(rng);
    double v = 0.0;
    for (std::size_t k = 0; k <= order; ++k) v += filter[k] * eps[k];
    x = rho * x + v;
    if (t >= burn) d.standardized_.push_back(x / sd);
  }
  std::sort(d.standardized_.begin(), d.standardized_.end());
  const auto& z = d.standardized_;
  const auto q = [&](double p) { return z[static_cast<std::size_t>(p * static_cast<double>(z.size() - 1))]; };
  const double spread = std::min(sample_sd(z), (q(0.75) - q(0.25)) / 1.34);
  d.bandwidth_ = 0.9 * spread * std::pow(static_cast<double>(z.size()), -0.2);
  return d;
}

double StationaryDensity::operator()(double a) const {
  if (standardized_.empty()) {
    if (law_.kind() == InnovationLaw::Kind::Gaussian) return gaussian_density(a);
    return law_.density(sign_ * a);
  }
  // Gaussian kernel truncated at 8 bandwidths; sorted data bounds the window.
  const double reach = 8.0 * bandwidth_;
  auto lo = std::lower_bound(standardized_.begin(), standardized_.end(), a - reach);
  auto hi = std::upper_bound(lo, standardized_.end(), a + reach);
  double sum = 0.0;
  for (auto it = lo; it != hi; ++it) {
    const double u = (*it - a) / bandwidth_;
    sum += std::exp(-0.5 * u * u);
  }
  return sum / (static_cast<double>(standardized_.size()) * bandwidth_ *
                std::sqrt(2.0 * std::numbers::pi));
}

double stationary_density(const InnovationLaw& law, const LinearFilter& filter, double rho,
                          double a) {
  return StationaryDensity::make(law, filter, rho)(a);
}

// ---------------------------------------------------------------------------
// Ornstein-Uhlenbeck oracle

std::vector<double> simulate_ou_path(const OuPathSpec& spec, std::int64_t path) {
  if (spec.steps < 1) throw Error(Errc::BadInput, "OU simulation needs at least one step");
  const auto steps = static_cast<std::size_t>(spec.steps);
  const double dt = 1.0 / static_cast<double>(steps);
  const double decay = std::exp(spec.c * dt);
  const double step_sd = std::sqrt(ou_raw_variance(spec.c, dt));
  const double norm = 1.0 / std::sqrt(ou_raw_variance(spec.c, 1.0));

  Rng rng(derive_stream(spec.seed, static_cast<std::uint64_t>(path)));
  std::vector<double> j(steps + 1, 0.0);
  double raw = 0.0;
  for (std::size_t i = 1; i <= steps; ++i) {
    raw = decay * raw + step_sd * rng.normal();
    j[i] = norm * raw;
  }
  return j;
}

std::vector<std::vector<double>> simulate_ou(const OuPathSpec& spec, unsigned workers) {
  if (spec.paths < 1) throw Error(Errc::BadInput, "OU simulation needs at least one path");
  std::vector<std::vector<double>> out(static_cast<std::size_t>(spec.paths));
  parallel_for(out.size(), workers, [&](std::size_t p) {
    out[p] = simulate_ou_path(spec, static_cast<std::int64_t>(p));
  });
  return out;
}

double ou_covariance(double c, double r, double s) {
  const double lo = std::min(r, s);
  const double hi = std::max(r, s);
  return std::exp(c * (hi - lo)) * ou_raw_variance(c, lo) / ou_raw_variance(c, 1.0);
}

std::vector<std::vector<double>> ou_local_time(const OuPathSpec& spec, std::span<const double> levels,
                                               double bandwidth, unsigned workers) {
  if (spec.steps < 1 || spec.paths < 1) throw Error(Errc::BadInput, "OU oracle needs steps and paths");
  const double min_bw = 0.1 / std::sqrt(static_cast<double>(spec.steps));
  if (!(bandwidth >= min_bw && bandwidth <= 0.1)) {
    throw Error(Errc::BadBandwidth, "local-time bandwidth must lie in [N^{-1/2}/10, 0.1]");
  }
  const Kernel k(Kernel::Kind::Epanechnikov);
  const double inv_bw = 1.0 / bandwidth;
  const double inv_steps = 1.0 / static_cast<double>(spec.steps);
  std::vector<std::vector<double>> out(static_cast<std::size_t>(spec.paths),
                                       std::vector<double>(levels.size(), 0.0));
  parallel_for(out.size(), workers, [&](std::size_t p) {
    std::vector<double> path = simulate_ou_path(spec, static_cast<std::int64_t>(p));
    auto& row = out[p];
    if (levels.size() <= 4) {
      for (std::size_t l = 0; l < levels.size(); ++l) {
        double sum = 0.0;
        for (std::size_t i = 1; i < path.size(); ++i) sum += k((path[i] - levels[l]) * inv_bw);
        row[l] = sum * inv_bw * inv_steps;
      }
      return;
    }
    path.erase(path.begin());  // J(0) is excluded from the sum
    std::sort(path.begin(), path.end());
    for (std::size_t l = 0; l < levels.size(); ++l) {
      auto lo = std::lower_bound(path.begin(), path.end(), levels[l] - bandwidth);
      auto hi = std::upper_bound(lo, path.end(), levels[l] + bandwidth);
      double sum = 0.0;
      for (auto it = lo; it != hi; ++it) sum += k((*it - levels[l]) * inv_bw);
      row[l] = sum * inv_bw * inv_steps;
    }
  });
  return out;
}

std::vector<double> ou_local_time(const OuPathSpec& spec, double a, double bandwidth,
                                  unsigned workers) {
  const double level[1] = {a};
  auto grid = ou_local_time(spec, level, bandwidth, workers);
  std::vector<double> out;
  out.reserve(grid.size());
  for (const auto& row : grid) out.push_back(row[0]);
  return out;
}

// ---------------------------------------------------------------------------
// Regimes and limits

SpatialRegime SpatialRegime::for_rule(const PersistenceRule& rule, const InnovationLaw& law,
                                      const LinearFilter& filter) {
  SpatialRegime r;
  r.law = law;
  r.filter = filter;
  switch (rule.kind) {
    case PersistenceRule::Kind::Stationary:
      r.kind = Kind::Stationary;
      r.rho = rule.rho;
      break;
    case PersistenceRule::Kind::MildlyIntegrated:
      r.kind = Kind::MildlyIntegrated;
      break;
    case PersistenceRule::Kind::LocalToUnity:
      r.kind = Kind::LocalToUnity;
      r.c = rule.c;
      break;
    case PersistenceRule::Kind::UnitRoot:
      r.kind = Kind::LocalToUnity;
      r.c = 0.0;
      break;
  }
  return r;
}

SpatialLimit::SpatialLimit(SpatialRegime regime, LocalTimeOracle oracle)
    : regime_(std::move(regime)), oracle_(oracle) {
  if (regime_.kind == SpatialRegime::Kind::Stationary) {
    stationary_.push_back(StationaryDensity::make(regime_.law, regime_.filter, regime_.rho));
  }
}

double SpatialLimit::density(double a) const {
  switch (regime_.kind) {
    case SpatialRegime::Kind::Stationary: return stationary_.front()(a);
    case SpatialRegime::Kind::MildlyIntegrated: return gaussian_density(a);
    case SpatialRegime::Kind::LocalToUnity: break;
  }
  throw Error(Errc::BadInput, "local-to-unity spatial limit is random; use draws()");
}

std::vector<double> SpatialLimit::draws(double a) const {
  if (deterministic()) return {density(a)};
  OuPathSpec spec{regime_.c, oracle_.steps, oracle_.paths, oracle_.seed};
  return ou_local_time(spec, a, oracle_.bandwidth, oracle_.workers);
}

EtaSampler eta_sampler(const SpatialRegime& regime, double x, double sigma_u, const Kernel& k,
                       const LocalTimeOracle& oracle) {
  const double scale = sigma_u * std::sqrt(k.l2());
  EtaSampler s;
  switch (regime.kind) {
    case SpatialRegime::Kind::Stationary: {
      const double sd = std::sqrt(stationary_variance(regime.filter, regime.rho));
      const auto nu = StationaryDensity::make(regime.law, regime.filter, regime.rho);
      s.draws_ = {scale * nu(x / sd)};
      break;
    }
    case SpatialRegime::Kind::MildlyIntegrated:
      s.draws_ = {scale * gaussian_density(0.0)};
      break;
    case SpatialRegime::Kind::LocalToUnity: {
      OuPathSpec spec{regime.c, oracle.steps, oracle.paths, oracle.seed};
      s.draws_ = ou_local_time(spec, 0.0, oracle.bandwidth, oracle.workers);
      for (auto& d : s.draws_) d *= scale;
      s.degenerate_ = false;
      break;
    }
  }
  return s;
}

}  // namespace predreg

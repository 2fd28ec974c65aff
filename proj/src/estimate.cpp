#include "predreg/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "predreg/distributions.hpp"
#include "predreg/error.hpp"

namespace predreg {

namespace {

constexpr double kVarianceFloor = 1e-12;

void check_bandwidth(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(Errc::BadBandwidth, "bandwidth must be positive and finite");
  }
}

struct LocalFit {
  double signal;   // sum K_h
  double m_hat;
  double sigma_sq;
};

// Weights are accumulated unscaled (K rather than K_h); the 1/h factor cancels
// in every ratio and is applied only to the signal. Responses are centred on
// the first in-window value so a constant window is reproduced exactly.
LocalFit local_fit(const RegressionData& data, const Kernel& k, double x, double h) {
  check_bandwidth(h);
  const double inv_h = 1.0 / h;
  const std::size_t n = data.n();
  double sw = 0.0;
  double swy = 0.0;
  double ref = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double w = k((data.x[t] - x) * inv_h);
    if (w > 0.0) {
      if (sw == 0.0) ref = data.y[t];
      sw += w;
      swy += w * (data.y[t] - ref);
    }
  }
  if (!(sw > 0.0)) {
    throw Error(Errc::NoLocalMass, "no observations within bandwidth of x = " + std::to_string(x),
                {x});
  }
  const double m_hat = ref + swy / sw;
  double swr = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double w = k((data.x[t] - x) * inv_h);
    if (w > 0.0) {
      const double r = data.y[t] - m_hat;
      swr += w * r * r;
    }
  }
  return {sw * inv_h, m_hat, swr / sw};
}

void check_variance(double sigma_sq, double x) {
  if (!(sigma_sq >= kVarianceFloor)) {
    throw Error(Errc::DegenerateVariance,
                "local residual variance is zero at x = " + std::to_string(x), {x});
  }
}

double standard_error(const LocalFit& fit, const Kernel& k, double h) {
  return std::sqrt(fit.sigma_sq * k.l2() / (h * fit.signal));
}

}  // namespace

double robust_scale(std::span<const double> x) {
  if (x.empty()) throw Error(Errc::BadInput, "robust_scale of empty sample");
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  return (quantile(0.75) - quantile(0.25)) / 1.349;
}

double BandwidthRule::lower_bound(std::size_t n) const {
  return c_h * std::pow(static_cast<double>(n), -lower_exponent);
}

double BandwidthRule::upper_bound(std::size_t n) const {
  return c_h * std::pow(static_cast<double>(n), -upper_exponent);
}

double BandwidthRule::bandwidth(std::span<const double> x) const {
  if (x.empty()) throw Error(Errc::BadInput, "bandwidth rule needs at least one observation");
  if (!(c_h > 0.0)) throw Error(Errc::BadBandwidth, "c_h must be positive");
  const double nd = static_cast<double>(x.size());
  double h = c_h * std::pow(nd, -gamma);
  if (kind == Kind::DataDriven) {
    h = std::clamp(h * robust_scale(x), lower_bound(x.size()), upper_bound(x.size()));
  }
  check_bandwidth(h);
  return h;
}

double local_signal(const RegressionData& data, const Kernel& k, double x, double h) {
  check_bandwidth(h);
  const double inv_h = 1.0 / h;
  double sum = 0.0;
  for (double xt : data.x) sum += k((xt - x) * inv_h);
  return sum * inv_h;
}

double nw_estimate(const RegressionData& data, const Kernel& k, double x, double h) {
  return local_fit(data, k, x, h).m_hat;
}

double sigma_u_hat(const RegressionData& data, const Kernel& k, double x, double h) {
  const LocalFit fit = local_fit(data, k, x, h);
  check_variance(fit.sigma_sq, x);
  return fit.sigma_sq;
}

double t_stat(const RegressionData& data, const Kernel& k, double x, double h, double theta) {
  const LocalFit fit = local_fit(data, k, x, h);
  check_variance(fit.sigma_sq, x);
  return (fit.m_hat - theta) / standard_error(fit, k, h);
}

std::pair<double, double> conf_interval(const RegressionData& data, const Kernel& k, double x,
                                        double h, double alpha) {
  const PointInference p = infer_point(data, k, x, h, alpha);
  return {p.ci_lo, p.ci_hi};
}

PointInference infer_point(const RegressionData& data, const Kernel& k, double x, double h,
                           double alpha, std::optional<double> theta) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::BadProbability, "alpha must lie in (0,1)");
  const double z = normal_quantile(1.0 - 0.5 * alpha);
  const LocalFit fit = local_fit(data, k, x, h);
  check_variance(fit.sigma_sq, x);
  PointInference p;
  p.x = x;
  p.m_hat = fit.m_hat;
  p.sigma_u_hat_sq = fit.sigma_sq;
  p.s_n = standard_error(fit, k, h);
  if (theta) p.t_stat = (fit.m_hat - *theta) / p.s_n;
  p.ci_lo = fit.m_hat - z * p.s_n;
  p.ci_hi = fit.m_hat + z * p.s_n;
  p.signal = fit.signal;
  p.h_used = h;
  p.n = data.n();
  return p;
}

double spatial_density(std::span<const double> x, double d_n, const Kernel& f, double h, double r,
                       double a) {
  check_bandwidth(h);
  if (!(d_n > 0.0) || !std::isfinite(d_n)) throw Error(Errc::BadBandwidth, "d_n must be positive");
  if (!(r >= 0.0 && r <= 1.0)) throw Error(Errc::BadInput, "r must lie in [0,1]");
  const std::size_t n = x.size();
  if (n == 0) return 0.0;
  const auto upto = std::min(n, static_cast<std::size_t>(std::floor(static_cast<double>(n) * r)));
  const double inv_h = 1.0 / h;
  const double centre = d_n * a;
  double sum = 0.0;
  for (std::size_t t = 0; t < upto; ++t) sum += f((x[t] - centre) * inv_h);
  const double signal = sum * inv_h;
  return signal * d_n / static_cast<double>(n);
}

}  // namespace predreg

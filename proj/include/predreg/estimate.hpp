#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>

#include "predreg/dgp.hpp"
#include "predreg/kernel.hpp"

namespace predreg {

/*!
 * Bandwidth sequence h_n.
 *
 * Deterministic: h_n = c_h n^{-gamma}.
 * DataDriven:    h_n = c_h scale(x) n^{-gamma}, clipped to
 *                [c_h n^{-lower_exponent}, c_h n^{-upper_exponent}],
 *                with scale(x) = IQR(x) / 1.349.
 */
struct BandwidthRule {
  enum class Kind { Deterministic, DataDriven };

  Kind kind = Kind::Deterministic;
  double c_h = 1.0;
  double gamma = 0.4;
  double lower_exponent = 0.45;
  double upper_exponent = 0.35;

  static BandwidthRule deterministic(double c_h = 1.0, double gamma = 0.4) {
    return {Kind::Deterministic, c_h, gamma};
  }
  static BandwidthRule data_driven(double c_h = 1.0, double gamma = 0.4) {
    return {Kind::DataDriven, c_h, gamma};
  }

  //! Bandwidth for the regressor values x_1..x_n.
  double bandwidth(std::span<const double> x) const;
  double lower_bound(std::size_t n) const;
  double upper_bound(std::size_t n) const;
};

//! Interquartile range divided by 1.349 (normal-consistent scale).
double robust_scale(std::span<const double> x);

//! Everything reported at a single spatial point.
struct PointInference {
  double x = 0.0;
  double m_hat = 0.0;
  double sigma_u_hat_sq = 0.0;
  double s_n = 0.0;
  std::optional<double> t_stat;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double signal = 0.0;
  double h_used = 0.0;
  std::size_t n = 0;
};

//! S_n(x;h) = sum_t K_h(x_t - x).
double local_signal(const RegressionData& data, const Kernel& k, double x, double h);

//! Nadaraya-Watson estimate. Throws NoLocalMass when S_n = 0.
double nw_estimate(const RegressionData& data, const Kernel& k, double x, double h);

//! Kernel-weighted residual variance. Throws NoLocalMass, DegenerateVariance.
double sigma_u_hat(const RegressionData& data, const Kernel& k, double x, double h);

//! (m_hat - theta)/s_n. Throws NoLocalMass, DegenerateVariance.
double t_stat(const RegressionData& data, const Kernel& k, double x, double h, double theta);

//! m_hat -/+ z_{1-alpha/2} s_n. Throws NoLocalMass, DegenerateVariance, BadProbability.
std::pair<double, double> conf_interval(const RegressionData& data, const Kernel& k, double x,
                                        double h, double alpha);

//! Single-pass evaluation of every PointInference field.
PointInference infer_point(const RegressionData& data, const Kernel& k, double x, double h,
                           double alpha, std::optional<double> theta = std::nullopt);

/*!
 * mu_n(r, a; f, h) = (d_n / n) sum_{t <= floor(n r)} f_h(x_t - d_n a), with
 * `x` holding x_1..x_n. Throws BadBandwidth unless h > 0 and d_n > 0.
 */
double spatial_density(std::span<const double> x, double d_n, const Kernel& f, double h,
                       double r, double a);

}  // namespace predreg

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "predreg/dgp.hpp"
#include "predreg/estimate.hpp"
#include "predreg/kernel.hpp"

namespace predreg {

//! Sum and max non-predictability statistics over a fixed point set.
struct PredTestResult {
  std::vector<double> points;
  double theta_hat = 0.0;
  std::vector<double> t_by_point;
  double f_sum = 0.0;
  double f_max = 0.0;
  double crit_sum = 0.0;
  double crit_max = 0.0;
  bool reject_sum = false;
  bool reject_max = false;
  double alpha = 0.05;
  std::size_t n = 0;
  double h = 0.0;

  nlohmann::json to_json() const;
};

//! Mean of y_2..y_{n+1}.
double theta_hat(const RegressionData& data);

/*!
 * Tests m(x) = theta for all x in `points`, with theta estimated by
 * theta_hat(). Every point must carry positive local mass; otherwise
 * NoLocalMass is thrown listing all offending points.
 */
PredTestResult predictability_test(const RegressionData& data, const Kernel& k,
                                   std::span<const double> points, const BandwidthRule& bw,
                                   double alpha);

//! Same, with the bandwidth fixed by the caller.
PredTestResult predictability_test(const RegressionData& data, const Kernel& k,
                                   std::span<const double> points, double h, double alpha);

/*!
 * Convenience: empirical quantiles of x_1..x_n as test points.
 *
 * Data-dependent points fall outside the fixed-point theory backing the
 * chi-squared limits, so critical values at these points are heuristic.
 */
std::vector<double> empirical_quantile_points(const RegressionData& data,
                                              std::span<const double> probabilities);

}  // namespace predreg

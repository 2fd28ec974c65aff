#include "predreg/predictability.hpp"

#include <algorithm>
#include <cmath>

#include "predreg/distributions.hpp"
#include "predreg/error.hpp"

namespace predreg {

nlohmann::json PredTestResult::to_json() const {
  return {
      {"points", points},     {"theta_hat", theta_hat}, {"t", t_by_point},
      {"f_sum", f_sum},       {"f_max", f_max},         {"crit_sum", crit_sum},
      {"crit_max", crit_max}, {"reject_sum", reject_sum}, {"reject_max", reject_max},
      {"alpha", alpha},       {"n", n},                 {"h", h},
  };
}

double theta_hat(const RegressionData& data) {
  if (data.n() == 0) throw Error(Errc::BadInput, "theta_hat needs n >= 1");
  double sum = 0.0;
  for (double v : data.y) sum += v;
  return sum / static_cast<double>(data.n());
}

PredTestResult predictability_test(const RegressionData& data, const Kernel& k,
                                   std::span<const double> points, double h, double alpha) {
  if (points.empty()) throw Error(Errc::BadInput, "predictability test needs at least one point");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(Errc::BadProbability, "alpha must lie in (0,1)");

  std::vector<double> empty;
  for (double x : points) {
    if (!(local_signal(data, k, x, h) > 0.0)) empty.push_back(x);
  }
  if (!empty.empty()) {
    std::string list;
    for (double x : empty) list += (list.empty() ? "" : ", ") + std::to_string(x);
    throw Error(Errc::NoLocalMass, "no local mass at point(s) " + list, empty);
  }

  PredTestResult r;
  r.points.assign(points.begin(), points.end());
  r.theta_hat = theta_hat(data);
  r.alpha = alpha;
  r.n = data.n();
  r.h = h;
  r.t_by_point.reserve(points.size());
  for (double x : points) {
    const double t = t_stat(data, k, x, h, r.theta_hat);
    r.t_by_point.push_back(t);
    r.f_sum += t * t;
    r.f_max = std::max(r.f_max, t * t);
  }
  const auto m = static_cast<int>(points.size());
  r.crit_sum = chi2_quantile(m, 1.0 - alpha);
  r.crit_max = m == 1 ? r.crit_sum : max_chi2_quantile(m, 1.0 - alpha);
  r.reject_sum = r.f_sum >= r.crit_sum;
  r.reject_max = r.f_max >= r.crit_max;
  return r;
}

PredTestResult predictability_test(const RegressionData& data, const Kernel& k,
                                   std::span<const double> points, const BandwidthRule& bw,
                                   double alpha) {
  return predictability_test(data, k, points, bw.bandwidth(data.x), alpha);
}

std::vector<double> empirical_quantile_points(const RegressionData& data,
                                              std::span<const double> probabilities) {
  if (data.n() == 0) throw Error(Errc::BadInput, "no observations");
  std::vector<double> sorted(data.x.begin(), data.x.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  for (double p : probabilities) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::BadProbability, "quantile level outside [0,1]");
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    out.push_back(sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]));
  }
  return out;
}

}  // namespace predreg

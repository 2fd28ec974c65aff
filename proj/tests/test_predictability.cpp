#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "predreg/distributions.hpp"
#include "predreg/error.hpp"
#include "predreg/predictability.hpp"

using namespace predreg;

namespace {

const Kernel kEpa(Kernel::Kind::Epanechnikov);

struct Owned {
  std::vector<double> x, y;
  RegressionData data() const { return {x, y}; }
};

Owned simulated(double rho, std::int64_t n, std::uint64_t seed, RegressionFunction m = {}) {
  DgpSpec s;
  s.persistence = PersistenceRule::stationary(rho);
  s.n = n;
  s.m = m;
  const Sample sm = simulate(s, seed);
  const RegressionData d = sm.data();
  return {{d.x.begin(), d.x.end()}, {d.y.begin(), d.y.end()}};
}

}  // namespace

TEST_CASE("theta_hat") {
  Owned d{{0, 0, 0}, {1, 2, 3}};
  CHECK(theta_hat(d.data()) == 2.0);
  Owned c{{0, 1, 2, 3}, {4.5, 4.5, 4.5, 4.5}};
  CHECK(theta_hat(c.data()) == 4.5);
}

TEST_CASE("theta_hat has root-n spread") {
  const int reps = 2000;
  const std::int64_t n = 2000;
  double s1 = 0.0, s2 = 0.0;
  for (int r = 0; r < reps; ++r) {
    const double th = theta_hat(simulated(0.5, n, derive_stream(8, r), RegressionFunction::constant(1.0)).data());
    s1 += th;
    s2 += th * th;
  }
  const double var = s2 / reps - (s1 / reps) * (s1 / reps);
  const double target = 1.0 / n;
  // var of the sample variance of normals is 2 sigma^4 / reps.
  CHECK(std::abs(var - target) <= 4.0 * target * std::sqrt(2.0 / reps));
}

TEST_CASE("statistics match their definitions") {
  const Owned d = simulated(0.7, 2000, 5);
  const std::vector<double> pts = {-1.0, 0.0, 1.0};
  const double h = 0.3;
  const PredTestResult r = predictability_test(d.data(), kEpa, pts, h, 0.05);
  const double th = theta_hat(d.data());
  CHECK(r.theta_hat == th);
  double sum = 0.0, mx = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double t = t_stat(d.data(), kEpa, pts[i], h, th);
    CHECK(r.t_by_point[i] == t);
    sum += t * t;
    mx = std::max(mx, t * t);
  }
  CHECK(r.f_sum == doctest::Approx(sum).epsilon(1e-15));
  CHECK(r.f_max == mx);
  CHECK(r.f_max <= r.f_sum);
  CHECK(r.crit_sum == chi2_quantile(3, 0.95));
  CHECK(r.crit_max == max_chi2_quantile(3, 0.95));
  CHECK(r.reject_sum == (r.f_sum >= r.crit_sum));
  CHECK(r.reject_max == (r.f_max >= r.crit_max));
  CHECK(r.n == 2000);
  CHECK(r.h == h);
}

TEST_CASE("single point") {
  const Owned d = simulated(0.2, 1000, 6);
  const std::vector<double> pts = {0.3};
  const PredTestResult r = predictability_test(d.data(), kEpa, pts, 0.25, 0.05);
  CHECK(r.f_sum == r.f_max);
  CHECK(r.crit_sum == r.crit_max);
  const double z = normal_quantile(0.975);
  CHECK(r.reject_sum == (std::abs(r.t_by_point[0]) >= z));
}

TEST_CASE("affine invariance") {
  const Owned d = simulated(0.9, 2000, 9, RegressionFunction::sine(0.5));
  const std::vector<double> pts = {-1.0, 0.0, 1.0};
  const PredTestResult base = predictability_test(d.data(), kEpa, pts, 0.3, 0.05);
  for (double a : {3.0, -0.5, 1e-3}) {
    Owned e = d;
    for (double& y : e.y) y = a * y - 4.0;
    const PredTestResult r = predictability_test(e.data(), kEpa, pts, 0.3, 0.05);
    CHECK(std::abs(r.f_sum - base.f_sum) <= 1e-9);
    CHECK(std::abs(r.f_max - base.f_max) <= 1e-9);
  }
}

TEST_CASE("points without local mass are all reported") {
  const Owned d = simulated(0.2, 500, 2);
  const std::vector<double> pts = {0.0, 40.0, -55.0};
  try {
    predictability_test(d.data(), kEpa, pts, 0.2, 0.05);
    FAIL("expected NoLocalMass");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NoLocalMass);
    CHECK(e.locations() == std::vector<double>{40.0, -55.0});
  }
}

TEST_CASE("rejects under a strong alternative") {
  const Owned d = simulated(0.5, 3000, 10, RegressionFunction::linear(1.0, 5.0));
  const std::vector<double> pts = {-1.0, 1.0};
  const PredTestResult r = predictability_test(d.data(), kEpa, pts, BandwidthRule::deterministic(), 0.05);
  CHECK(r.reject_sum);
  CHECK(r.reject_max);
}

TEST_CASE("json layout") {
  const Owned d = simulated(0.2, 300, 1);
  const std::vector<double> pts = {0.0};
  const auto j = predictability_test(d.data(), kEpa, pts, 0.5, 0.1).to_json();
  for (const char* key : {"points", "theta_hat", "t", "f_sum", "f_max", "crit_sum", "crit_max", "reject_sum",
                          "reject_max", "alpha", "n", "h"}) {
    CHECK(j.contains(key));
  }
  CHECK(j.size() == 12);
}

TEST_CASE("empirical quantile points") {
  Owned d{{5, 1, 3, 2, 4}, {0, 0, 0, 0, 0}};
  const std::vector<double> probs = {0.0, 0.5, 1.0};
  const auto q = empirical_quantile_points(d.data(), probs);
  CHECK(q == std::vector<double>{1.0, 3.0, 5.0});
}

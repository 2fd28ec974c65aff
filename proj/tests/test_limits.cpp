#include <doctest.h>

#include <cmath>
#include <numeric>

#include "predreg/error.hpp"
#include "predreg/limits.hpp"

using namespace predreg;

namespace {

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / (v.size() - 1);
}

// Unit-variance Laplace density.
double laplace(double a) {
  const double b = 1.0 / std::sqrt(2.0);
  return std::exp(-std::abs(a) / b) / (2.0 * b);
}

const double kSqrt2OverPi = std::sqrt(2.0 / std::acos(-1.0));

}  // namespace

TEST_CASE("gaussian density") {
  CHECK(gaussian_density(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-15));
  CHECK(gaussian_density(1.7) == gaussian_density(-1.7));
  double mass = 0.0;
  const double da = 1e-3;
  for (double a = -12.0; a <= 12.0; a += da) mass += gaussian_density(a) * da;
  CHECK(std::abs(mass - 1.0) <= 1e-8);
}

TEST_CASE("stationary variance") {
  CHECK(stationary_variance(LinearFilter(), 0.5) == doctest::Approx(4.0 / 3.0));
  // MA(1) with rho = 0: 1 + phi^2.
  CHECK(stationary_variance(LinearFilter({1.0, 0.5}), 0.0) == doctest::Approx(1.25));
  // Limit of the finite-t exact variance.
  const LinearFilter f({1.0, 0.4, -0.3});
  CHECK(stationary_variance(f, 0.7) == doctest::Approx(exact_variance(f, 0.7, 2000)).epsilon(1e-12));
}

TEST_CASE("stationary density") {
  for (double rho : {-0.5, 0.0, 0.5, 0.95}) {
    for (double a : {-1.0, 0.0, 2.0}) {
      CHECK(stationary_density(InnovationLaw::gaussian(), LinearFilter({1.0, 0.3}), rho, a) ==
            doctest::Approx(gaussian_density(a)).epsilon(1e-15));
    }
  }
  for (double a : {-2.0, -0.3, 0.0, 0.8, 3.0}) {
    CHECK(stationary_density(InnovationLaw::laplace(), LinearFilter(), 0.0, a) == doctest::Approx(laplace(a)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(stationary_density(InnovationLaw::gaussian(), LinearFilter(), 1.0, 0.0), Error);
  CHECK_THROWS_AS(stationary_density(InnovationLaw::laplace(), LinearFilter(), 1.0, 0.0), Error);
}

TEST_CASE("simulated stationary density integrates to one") {
  const auto nu = StationaryDensity::make(InnovationLaw::laplace(), LinearFilter(), 0.5);
  CHECK(nu.approximate());
  double mass = 0.0, second = 0.0;
  const double da = 1e-2;
  for (double a = -12.0; a <= 12.0; a += da) {
    const double f = nu(a);
    CHECK(f >= 0.0);
    mass += f * da;
    second += a * a * f * da;
  }
  CHECK(std::abs(mass - 1.0) <= 0.01);
  CHECK(std::abs(second - 1.0) <= 0.05);
  // In the iid case the oracle should be close to the innovation density.
  const auto iid = StationaryDensity::simulated(InnovationLaw::laplace(), LinearFilter(), 0.0);
  for (double a : {-1.5, -0.5, 0.5, 1.5}) CHECK(std::abs(iid(a) - laplace(a)) <= 0.02);
}

TEST_CASE("OU terminal variance is one") {
  for (double c : {0.0, -5.0, 2.0}) {
    const OuPathSpec spec{c, 2000, 4000, 91};
    std::vector<double> end;
    for (const auto& p : simulate_ou(spec)) end.push_back(p.back());
    const double v = variance(end);
    CAPTURE(c);
    CHECK(std::abs(v - 1.0) <= 4.0 * std::sqrt(2.0 / end.size()));
    CHECK(std::abs(mean(end)) <= 4.0 / std::sqrt(end.size()));
  }
}

TEST_CASE("OU covariance") {
  // v(r) = int_0^r e^{2c(r-s)} ds; at c = 0 this is Brownian covariance.
  CHECK(ou_covariance(0.0, 0.3, 0.8) == doctest::Approx(0.3));
  CHECK(ou_covariance(0.0, 1.0, 1.0) == doctest::Approx(1.0));
  const double c = -5.0;
  const auto v = [&](double r) { return std::expm1(2.0 * c * r) / (2.0 * c); };
  CHECK(ou_covariance(c, 0.5, 1.0) == doctest::Approx(std::exp(-2.5) * v(0.5) / v(1.0)).epsilon(1e-12));

  const OuPathSpec spec{c, 2000, 5000, 13};
  double sxy = 0, sxx = 0, syy = 0;
  for (const auto& p : simulate_ou(spec)) {
    const double x = p[1000], y = p[2000];
    sxy += x * y;
    sxx += x * x;
    syy += y * y;
  }
  const double r = sxy / std::sqrt(sxx * syy);
  const double target = std::exp(-2.5) * std::sqrt(v(0.5) / v(1.0));
  CHECK(std::abs(r - target) <= 4.0 * (1.0 - target * target) / std::sqrt(5000.0));
}

TEST_CASE("Brownian increments are uncorrelated") {
  const OuPathSpec spec{0.0, 1000, 5000, 17};
  double s12 = 0, s11 = 0, s22 = 0;
  for (const auto& p : simulate_ou(spec)) {
    const double a = p[400] - p[0], b = p[1000] - p[600];
    s12 += a * b;
    s11 += a * a;
    s22 += b * b;
  }
  CHECK(std::abs(s12 / std::sqrt(s11 * s22)) <= 4.0 / std::sqrt(5000.0));
}

TEST_CASE("Brownian local time at zero") {
  const OuPathSpec spec{0.0, 100000, 2000, 0x10ca1};
  const auto draws = ou_local_time(spec, 0.0, 0.02);
  CHECK(draws.size() == 2000);
  for (double d : draws) CHECK(d >= 0.0);
  CHECK(std::abs(mean(draws) - kSqrt2OverPi) <= 0.03);
}

TEST_CASE("local time occupation integrates to one and vanishes in the tails") {
  const OuPathSpec spec{-2.0, 20000, 400, 5};
  std::vector<double> levels;
  for (double a = -6.0; a <= 6.0 + 1e-9; a += 0.01) levels.push_back(a);
  const auto grid = ou_local_time(spec, levels, 0.02);
  double mass = 0.0;
  std::vector<double> mean_at(levels.size(), 0.0);
  for (const auto& row : grid) {
    for (std::size_t l = 0; l < levels.size(); ++l) mean_at[l] += row[l] / grid.size();
  }
  for (double m : mean_at) mass += m * 0.01;
  CHECK(std::abs(mass - 1.0) <= 0.02);
  const OuPathSpec bm{0.0, 20000, 2000, 6};
  CHECK(mean(ou_local_time(bm, 5.0, 0.02)) <= 0.01);
  CHECK(mean(ou_local_time(bm, -5.0, 0.02)) <= 0.01);
}

TEST_CASE("multi-level and single-level local times agree") {
  const OuPathSpec spec{-1.0, 5000, 50, 8};
  const std::vector<double> levels = {-1.0, -0.5, 0.0, 0.25, 0.5, 1.0};
  const auto grid = ou_local_time(spec, levels, 0.05);
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const auto one = ou_local_time(spec, levels[l], 0.05);
    for (std::size_t p = 0; p < one.size(); ++p) CHECK(grid[p][l] == doctest::Approx(one[p]).epsilon(1e-12));
  }
}

TEST_CASE("local time is stable under halving the grid step") {
  // The coarse path is the fine path observed every other step, so the comparison isolates discretization.
  const OuPathSpec fine{0.0, 100000, 500, 21};
  const Kernel k(Kernel::Kind::Epanechnikov);
  const double bw = 0.02;
  const auto lib = ou_local_time(fine, 0.0, bw);
  double diff = 0.0;
  for (std::int64_t p = 0; p < fine.paths; ++p) {
    const auto path = simulate_ou_path(fine, p);
    double lf = 0.0, lc = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) {
      const double w = k(path[i] / bw) / bw;
      lf += w;
      if (i % 2 == 0) lc += w;
    }
    lf /= 100000.0;
    lc /= 50000.0;
    CHECK(lib[p] == doctest::Approx(lf).epsilon(1e-10));
    diff += (lf - lc) / fine.paths;
  }
  CHECK(std::abs(diff) <= 0.02);
}

TEST_CASE("local time bandwidth bounds") {
  const OuPathSpec spec{0.0, 10000, 2, 1};
  CHECK_THROWS_AS(ou_local_time(spec, 0.0, 0.2), Error);
  CHECK_THROWS_AS(ou_local_time(spec, 0.0, 0.0005), Error);
  CHECK_NOTHROW(ou_local_time(spec, 0.0, 0.001));
}

TEST_CASE("eta sampler") {
  const Kernel k(Kernel::Kind::Epanechnikov);
  SpatialRegime mi;
  mi.kind = SpatialRegime::Kind::MildlyIntegrated;
  const EtaSampler e = eta_sampler(mi, 0.7, 1.0, k);
  CHECK(e.degenerate());
  CHECK(e.value() == doctest::Approx(std::sqrt(0.6) * 0.3989422804014327).epsilon(1e-14));
  CHECK(e.value() == doctest::Approx(0.30898).epsilon(1e-4));
  CHECK(eta_sampler(mi, 0.7, 2.0, k).value() == 2.0 * e.value());

  SpatialRegime st;
  st.kind = SpatialRegime::Kind::Stationary;
  st.rho = 0.5;
  const double sd = std::sqrt(4.0 / 3.0);
  CHECK(eta_sampler(st, 0.9, 1.0, k).value() == doctest::Approx(std::sqrt(0.6) * gaussian_density(0.9 / sd)));
  st.rho = 1.0;
  CHECK_THROWS_AS(eta_sampler(st, 0.0, 1.0, k), Error);

  SpatialRegime lur;
  lur.kind = SpatialRegime::Kind::LocalToUnity;
  const LocalTimeOracle oracle{20000, 2000, 0.02, 44, 0};
  const EtaSampler a = eta_sampler(lur, 0.0, 1.0, k, oracle);
  const EtaSampler b = eta_sampler(lur, 0.0, 2.0, k, oracle);
  CHECK_FALSE(a.degenerate());
  for (std::size_t i = 0; i < a.draws().size(); ++i) CHECK(b.draws()[i] == 2.0 * a.draws()[i]);
  CHECK(std::abs(mean(a.draws()) - kSqrt2OverPi * std::sqrt(0.6)) <= 0.03 * std::sqrt(0.6));
}

TEST_CASE("spatial limits by rule") {
  const auto lim = SpatialLimit(SpatialRegime::for_rule(PersistenceRule::mildly_integrated(-1, 0.5),
                                                        InnovationLaw::gaussian(), LinearFilter()));
  CHECK(lim.deterministic());
  CHECK(lim.density(0.3) == gaussian_density(0.3));
  const auto unit = SpatialRegime::for_rule(PersistenceRule::unit_root(), InnovationLaw::gaussian(), LinearFilter());
  CHECK(unit.kind == SpatialRegime::Kind::LocalToUnity);
  CHECK(unit.c == 0.0);
  const SpatialLimit lur(unit, LocalTimeOracle{10000, 20, 0.02, 1, 1});
  CHECK_FALSE(lur.deterministic());
  CHECK_THROWS_AS(lur.density(0.0), Error);
  CHECK(lur.draws(0.0).size() == 20);
}

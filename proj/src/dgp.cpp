#include "predreg/dgp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

#include "predreg/error.hpp"

namespace predreg {

namespace {

std::string fmt(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

constexpr double kLaplaceScale = 0.70710678118654752440;  // 1/sqrt(2): unit variance

//! Neumaier compensated accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) noexcept {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  double value() const noexcept { return sum + carry; }
};

}  // namespace

// ---------------------------------------------------------------------------
// InnovationLaw

InnovationLaw InnovationLaw::student_t(int df) {
  if (df < 5) {
    throw Error(Errc::InvalidSpec, "Student-t innovations need df >= 5, got " + std::to_string(df));
  }
  return InnovationLaw(Kind::StudentT, df);
}

double InnovationLaw::draw(Rng& rng) const {
  switch (kind_) {
    case Kind::Gaussian:
      return rng.normal();
    case Kind::Laplace: {
      const double u = rng.uniform() - 0.5;
      const double mag = -kLaplaceScale * std::log1p(-2.0 * std::abs(u));
      return u < 0.0 ? -mag : mag;
    }
    case Kind::StudentT: {
      const double z = rng.normal();
      double chi2 = 0.0;
      for (int i = 0; i < df_; ++i) {
        const double g = rng.normal();
        chi2 += g * g;
      }
      const double scale = std::sqrt(static_cast<double>(df_ - 2) / df_);
      return scale * z / std::sqrt(chi2 / df_);
    }
  }
  return 0.0;
}

double InnovationLaw::density(double e) const {
  switch (kind_) {
    case Kind::Gaussian:
      return std::exp(-0.5 * e * e) / std::sqrt(2.0 * std::numbers::pi);
    case Kind::Laplace:
      return std::exp(-std::abs(e) / kLaplaceScale) / (2.0 * kLaplaceScale);
    case Kind::StudentT: {
      const double nu = df_;
      const double s = std::sqrt((nu - 2.0) / nu);
      const double z = e / s;
      const double log_norm = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                              0.5 * std::log(nu * std::numbers::pi);
      return std::exp(log_norm - 0.5 * (nu + 1.0) * std::log1p(z * z / nu)) / s;
    }
  }
  return 0.0;
}

std::string InnovationLaw::name() const {
  switch (kind_) {
    case Kind::Gaussian: return "gaussian";
    case Kind::Laplace: return "laplace";
    case Kind::StudentT: return "student_t(" + std::to_string(df_) + ")";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// LinearFilter

LinearFilter::LinearFilter(std::vector<double> coefficients)
    : coefficients_(std::move(coefficients)), phi_sum_(0.0) {
  if (coefficients_.empty()) throw Error(Errc::InvalidSpec, "filter needs at least one coefficient");
  if (coefficients_.front() == 0.0) throw Error(Errc::InvalidSpec, "filter phi_0 must be nonzero");
  for (double c : coefficients_) {
    if (!std::isfinite(c)) throw Error(Errc::InvalidSpec, "filter coefficients must be finite");
    phi_sum_ += c;
  }
  if (phi_sum_ == 0.0) throw Error(Errc::InvalidSpec, "filter coefficients must not sum to zero");
}

// ---------------------------------------------------------------------------
// PersistenceRule

PersistenceRule PersistenceRule::stationary(double rho) {
  PersistenceRule r;
  r.kind = Kind::Stationary;
  r.rho = rho;
  return r;
}

PersistenceRule PersistenceRule::mildly_integrated(double c, double a) {
  if (!(c < 0.0)) throw Error(Errc::InvalidSpec, "mildly integrated rule needs c < 0");
  if (!(a > 0.0 && a < 1.0)) throw Error(Errc::InvalidSpec, "mildly integrated rule needs a in (0,1)");
  PersistenceRule r;
  r.kind = Kind::MildlyIntegrated;
  r.c = c;
  r.a = a;
  return r;
}

PersistenceRule PersistenceRule::local_to_unity(double c) {
  PersistenceRule r;
  r.kind = Kind::LocalToUnity;
  r.c = c;
  return r;
}

PersistenceRule PersistenceRule::unit_root() { return PersistenceRule{}; }

std::string PersistenceRule::label() const {
  switch (kind) {
    case Kind::Stationary: return "stat(" + fmt(rho) + ")";
    case Kind::MildlyIntegrated: return "mi(" + fmt(c) + "," + fmt(a) + ")";
    case Kind::LocalToUnity: return "lur(" + fmt(c) + ")";
    case Kind::UnitRoot: return "unit";
  }
  return "?";
}

double resolve_rho(const PersistenceRule& rule, std::int64_t n) {
  if (n < 1) throw Error(Errc::InvalidSpec, "resolve_rho needs n >= 1");
  const double nd = static_cast<double>(n);
  double rho = 1.0;
  switch (rule.kind) {
    case PersistenceRule::Kind::Stationary: rho = rule.rho; break;
    case PersistenceRule::Kind::MildlyIntegrated: rho = 1.0 + rule.c * std::pow(nd, rule.a - 1.0); break;
    case PersistenceRule::Kind::LocalToUnity: rho = 1.0 + rule.c / nd; break;
    case PersistenceRule::Kind::UnitRoot: rho = 1.0; break;
  }
  const double lower = -1.0 + rule.delta;
  const double upper = 1.0 + rule.cbar / nd;
  if (!std::isfinite(rho) || rho < lower || rho > upper) {
    throw Error(Errc::RhoOutOfRange, "rho_n = " + fmt(rho) + " outside [" + fmt(lower) + ", " +
                                         fmt(upper) + "] for rule " + rule.label() +
                                         " at n = " + std::to_string(n));
  }
  return rho;
}

// ---------------------------------------------------------------------------
// RegressionFunction

RegressionFunction RegressionFunction::linear(double slope, double cap) {
  return {Kind::Linear, slope, cap};
}

double RegressionFunction::operator()(double x) const noexcept {
  switch (kind) {
    case Kind::Zero: return 0.0;
    case Kind::Constant: return p1;
    case Kind::Linear: return std::clamp(p1 * x, -p2, p2);
    case Kind::Logistic: return 1.0 / (1.0 + std::exp(-x / p1));
    case Kind::Sine: return std::sin(p1 * x);
  }
  return 0.0;
}

double RegressionFunction::derivative_bound() const noexcept {
  switch (kind) {
    case Kind::Zero:
    case Kind::Constant: return 0.0;
    case Kind::Linear: return std::abs(p1);
    case Kind::Logistic: return 0.25 / std::abs(p1);
    case Kind::Sine: return std::abs(p1);
  }
  return 0.0;
}

std::string RegressionFunction::label() const {
  switch (kind) {
    case Kind::Zero: return "zero";
    case Kind::Constant: return "constant(" + fmt(p1) + ")";
    case Kind::Linear: return "linear(" + fmt(p1) + "," + fmt(p2) + ")";
    case Kind::Logistic: return "logistic(" + fmt(p1) + ")";
    case Kind::Sine: return "sine(" + fmt(p1) + ")";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// DgpSpec

void DgpSpec::validate() const {
  if (n < 2) throw Error(Errc::InvalidSpec, "sample size n must be >= 2");
  if (!(sigma_u >= 0.0) || !std::isfinite(sigma_u)) {
    throw Error(Errc::InvalidSpec, "sigma_u must be finite and nonnegative");
  }
  switch (m.kind) {
    case RegressionFunction::Kind::Linear:
      if (!std::isfinite(m.p1) || !(m.p2 > 0.0)) {
        throw Error(Errc::InvalidSpec, "linear m needs a finite slope and a positive cap");
      }
      break;
    case RegressionFunction::Kind::Logistic:
      if (!(std::abs(m.p1) > 0.0) || !std::isfinite(m.p1)) {
        throw Error(Errc::InvalidSpec, "logistic m needs a nonzero finite scale");
      }
      break;
    case RegressionFunction::Kind::Sine:
    case RegressionFunction::Kind::Constant:
      if (!std::isfinite(m.p1)) throw Error(Errc::InvalidSpec, "m parameter must be finite");
      break;
    case RegressionFunction::Kind::Zero:
      break;
  }
  if (!(persistence.delta > 0.0 && persistence.delta < 2.0)) {
    throw Error(Errc::InvalidSpec, "delta must lie in (0, 2)");
  }
  if (!(persistence.cbar >= 0.0)) throw Error(Errc::InvalidSpec, "cbar must be nonnegative");
  (void)resolve_rho(persistence, n);
}

std::string DgpSpec::canonical() const {
  std::string s = "m=" + m.label() + ";rule=" + persistence.label() + ";delta=" +
                  fmt(persistence.delta) + ";cbar=" + fmt(persistence.cbar) + ";filter=";
  for (double c : filter.coefficients()) s += fmt(c) + ",";
  s += ";eps=" + eps_law.name() + ";u=" + u_law.name() + ";sigma_u=" + fmt(sigma_u) +
       ";n=" + std::to_string(n);
  return s;
}

std::uint64_t DgpSpec::digest() const {
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
  for (unsigned char ch : canonical()) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Sample

RegressionData Sample::data() const noexcept {
  const std::size_t len = n();
  return {std::span<const double>(x).subspan(1, len), std::span<const double>(y).subspan(2, len)};
}

std::span<const double> Sample::regressor() const noexcept {
  return std::span<const double>(x).subspan(1, n());
}

Sample Sample::from_pairs(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw Error(Errc::BadInput, "x and y must have equal length");
  if (xs.empty()) throw Error(Errc::BadInput, "no observations");
  Sample s;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  s.x.reserve(xs.size() + 1);
  s.x.push_back(0.0);
  s.x.insert(s.x.end(), xs.begin(), xs.end());
  s.y.reserve(ys.size() + 2);
  s.y.push_back(nan);
  s.y.push_back(nan);
  s.y.insert(s.y.end(), ys.begin(), ys.end());
  return s;
}

bool Sample::operator==(const Sample& other) const {
  auto same = [](const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (std::isnan(a[i]) && std::isnan(b[i])) continue;
      if (a[i] != b[i]) return false;
    }
    return true;
  };
  return seed == other.seed && spec_digest == other.spec_digest && same(x, other.x) &&
         same(y, other.y);
}

Sample simulate(const DgpSpec& spec, std::uint64_t seed) {
  spec.validate();
  const double rho = resolve_rho(spec.persistence, spec.n);
  const auto n = static_cast<std::size_t>(spec.n);
  const std::size_t order = spec.filter.order();
  const auto phi = spec.filter.coefficients();

  Rng eps_rng(derive_stream(seed, 0));
  Rng u_rng(derive_stream(seed, 1));

  // eps_{1-K}..eps_n; eps[j] holds eps_{j + 1 - K}
  std::vector<double> eps(n + order);
  for (auto& e : eps) e = spec.eps_law.draw(eps_rng);

  Sample s;
  s.seed = seed;
  s.spec_digest = spec.digest();
  s.x.assign(n + 1, 0.0);
  for (std::size_t t = 1; t <= n; ++t) {
    double v = 0.0;
    const std::size_t base = t - 1 + order;  // index of eps_t
    for (std::size_t k = 0; k <= order; ++k) v += phi[k] * eps[base - k];
    s.x[t] = rho * s.x[t - 1] + v;
  }
  s.y.assign(n + 2, 0.0);
  s.y[0] = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t t = 0; t <= n; ++t) {
    s.y[t + 1] = spec.m(s.x[t]) + spec.sigma_u * spec.u_law.draw(u_rng);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Variances and norming

double exact_variance(const LinearFilter& filter, double rho, std::int64_t t) {
  if (t < 1) throw Error(Errc::InvalidSpec, "exact_variance needs t >= 1");
  const auto order = static_cast<std::int64_t>(filter.order());

  // V1: a_k = sum_{l<=k} rho^l phi_{k-l} for k = 0..t-1, via a_k = rho a_{k-1} + phi_k.
  CompensatedSum total;
  double a = 0.0;
  for (std::int64_t k = 0; k < t; ++k) {
    a = rho * a + filter[static_cast<std::size_t>(k)];
    total.add(a * a);
  }

  // V2: pre-sample innovations eps_{t-k}, k = t..t-1+K; only l >= k-K contributes.
  for (std::int64_t k = t; k <= t - 1 + order; ++k) {
    double coef = 0.0;
    for (std::int64_t l = std::max<std::int64_t>(0, k - order); l <= t - 1; ++l) {
      coef += std::pow(rho, static_cast<double>(l)) * filter[static_cast<std::size_t>(k - l)];
    }
    total.add(coef * coef);
  }
  return total.value();
}

double omega_sq(double rho, std::int64_t n) {
  if (n < 1) throw Error(Errc::InvalidSpec, "omega_sq needs n >= 1");
  const double z = static_cast<double>(n) * (1.0 - rho) * (1.0 + rho);
  if (z == 0.0) return 1.0;
  return -std::expm1(-z) / z;
}

Norming norming(const DgpSpec& spec, std::int64_t n) {
  const double rho = resolve_rho(spec.persistence, n);
  const double d = std::sqrt(exact_variance(spec.filter, rho, n));
  return {d, static_cast<double>(n) / d};
}

Norming norming(const DgpSpec& spec) { return norming(spec, spec.n); }

}  // namespace predreg

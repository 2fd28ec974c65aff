#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "predreg/rng.hpp"

namespace predreg {

//! Standardized (mean 0, variance 1) innovation distribution.
class InnovationLaw {
 public:
  enum class Kind { Gaussian, Laplace, StudentT };

  static InnovationLaw gaussian() { return InnovationLaw(Kind::Gaussian, 0); }
  static InnovationLaw laplace() { return InnovationLaw(Kind::Laplace, 0); }
  //! Student-t rescaled to unit variance; df must be at least 5.
  static InnovationLaw student_t(int df);

  Kind kind() const noexcept { return kind_; }
  int df() const noexcept { return df_; }

  double draw(Rng& rng) const;
  double density(double e) const;
  std::string name() const;

  bool operator==(const InnovationLaw&) const = default;

 private:
  InnovationLaw(Kind kind, int df) : kind_(kind), df_(df) {}
  Kind kind_;
  int df_;
};

//! Finite moving-average filter v_t = sum_k phi_k eps_{t-k}.
class LinearFilter {
 public:
  LinearFilter() : LinearFilter(std::vector<double>{1.0}) {}
  explicit LinearFilter(std::vector<double> coefficients);

  std::span<const double> coefficients() const noexcept { return coefficients_; }
  //! Highest lag K (number of pre-sample innovations required).
  std::size_t order() const noexcept { return coefficients_.size() - 1; }
  double phi_sum() const noexcept { return phi_sum_; }
  //! phi_k, zero beyond the filter order.
  double operator[](std::size_t k) const noexcept {
    return k < coefficients_.size() ? coefficients_[k] : 0.0;
  }

  bool operator==(const LinearFilter& other) const { return coefficients_ == other.coefficients_; }

 private:
  std::vector<double> coefficients_;
  double phi_sum_;
};

//! Rule mapping the sample size n to an autoregressive root rho_n.
struct PersistenceRule {
  enum class Kind { Stationary, MildlyIntegrated, LocalToUnity, UnitRoot };

  Kind kind = Kind::UnitRoot;
  double rho = 1.0;  // Stationary
  double c = 0.0;    // MildlyIntegrated, LocalToUnity
  double a = 0.5;    // MildlyIntegrated exponent
  double delta = 0.05;
  double cbar = 0.0;

  static PersistenceRule stationary(double rho);
  static PersistenceRule mildly_integrated(double c, double a);
  static PersistenceRule local_to_unity(double c);
  static PersistenceRule unit_root();

  //! Short human-readable label, e.g. "stat(0.5)", "mi(-1,0.5)", "lur(-5)".
  std::string label() const;
  //! Local-to-unity parameter of the limit; UnitRoot maps to c = 0.
  bool is_local_to_unity() const noexcept {
    return kind == Kind::LocalToUnity || kind == Kind::UnitRoot;
  }

  bool operator==(const PersistenceRule&) const = default;
};

double resolve_rho(const PersistenceRule& rule, std::int64_t n);

//! Regression functions with a known bound on |m'|.
struct RegressionFunction {
  enum class Kind { Zero, Constant, Linear, Logistic, Sine };

  Kind kind = Kind::Zero;
  // Constant: theta. Linear: slope, cap (|m| <= cap). Logistic: scale. Sine: freq.
  double p1 = 0.0;
  double p2 = 0.0;

  static RegressionFunction zero() { return {}; }
  static RegressionFunction constant(double theta) { return {Kind::Constant, theta, 0.0}; }
  static RegressionFunction linear(double slope, double cap);
  static RegressionFunction logistic(double scale) { return {Kind::Logistic, scale, 0.0}; }
  static RegressionFunction sine(double freq) { return {Kind::Sine, freq, 0.0}; }

  double operator()(double x) const noexcept;
  //! sup |m'| for this family.
  double derivative_bound() const noexcept;
  std::string label() const;

  bool operator==(const RegressionFunction&) const = default;
};

struct DgpSpec {
  RegressionFunction m;
  PersistenceRule persistence;
  LinearFilter filter;
  InnovationLaw eps_law = InnovationLaw::gaussian();
  InnovationLaw u_law = InnovationLaw::gaussian();
  double sigma_u = 1.0;
  std::int64_t n = 100;

  //! Throws InvalidSpec / RhoOutOfRange.
  void validate() const;
  //! Stable 64-bit digest of every field.
  std::uint64_t digest() const;
  std::string canonical() const;
};

//! Regression pairs (x_t, y_{t+1}), t = 1..n, as used by every estimator.
struct RegressionData {
  std::span<const double> x;
  std::span<const double> y;

  std::size_t n() const noexcept { return x.size(); }
};

/*!
 * A realized path. x holds x_0..x_n (x_0 = 0 for simulated data) and y holds
 * y_0..y_{n+1}; y_0 does not exist and is stored as NaN, so y[t] pairs with
 * x[t-1].
 */
struct Sample {
  std::vector<double> x;
  std::vector<double> y;
  std::uint64_t seed = 0;
  std::uint64_t spec_digest = 0;

  std::size_t n() const noexcept { return x.empty() ? 0 : x.size() - 1; }
  RegressionData data() const noexcept;
  //! x_1..x_n
  std::span<const double> regressor() const noexcept;

  //! Build from observed pairs (x_t, y_{t+1}); x_0 and y_1 are unobserved.
  static Sample from_pairs(std::span<const double> x, std::span<const double> y);

  bool operator==(const Sample&) const;
};

Sample simulate(const DgpSpec& spec, std::uint64_t seed);

//! var(x_t) from the exact linear-process coefficients of the AR recursion.
double exact_variance(const LinearFilter& filter, double rho, std::int64_t t);

//! Continuous-time variance factor; equals 1 at rho = 1.
double omega_sq(double rho, std::int64_t n);

struct Norming {
  double d_n;
  double e_n;
};

//! d_n = sd(x_n), e_n = n / d_n, at the DGP's sample size.
Norming norming(const DgpSpec& spec);
Norming norming(const DgpSpec& spec, std::int64_t n);

}  // namespace predreg

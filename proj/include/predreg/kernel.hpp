#pragma once

#include <string>
#include <string_view>

namespace predreg {

/*!
 * Compactly supported, Lipschitz smoothing kernel on [-1, 1] integrating to
 * one. Bandwidth is applied through scaled(); the support radius is fixed.
 */
class Kernel {
 public:
  enum class Kind { Epanechnikov, Triangular, Quartic };

  constexpr explicit Kernel(Kind kind = Kind::Epanechnikov) noexcept : kind_(kind) {}

  //! "epanechnikov" | "triangular" | "quartic". Throws BadInput otherwise.
  static Kernel from_name(std::string_view name);

  constexpr Kind kind() const noexcept { return kind_; }
  std::string name() const;

  constexpr double operator()(double u) const noexcept {
    if (u < -1.0 || u > 1.0) return 0.0;
    switch (kind_) {
      case Kind::Epanechnikov: return 0.75 * (1.0 - u * u);
      case Kind::Triangular: return 1.0 - (u < 0.0 ? -u : u);
      case Kind::Quartic: {
        const double w = 1.0 - u * u;
        return 0.9375 * w * w;
      }
    }
    return 0.0;
  }

  //! K_h(u) = K(u/h)/h. Throws BadBandwidth for h <= 0.
  double scaled(double h, double u) const;

  //! integral of K^2
  constexpr double l2() const noexcept {
    switch (kind_) {
      case Kind::Epanechnikov: return 0.6;
      case Kind::Triangular: return 2.0 / 3.0;
      case Kind::Quartic: return 5.0 / 7.0;
    }
    return 0.0;
  }
  static constexpr double l1() noexcept { return 1.0; }
  static constexpr double support_radius() noexcept { return 1.0; }

  constexpr bool operator==(const Kernel&) const = default;

 private:
  Kind kind_;
};

}  // namespace predreg

#include "predreg/kernel.hpp"

#include <cmath>

#include "predreg/error.hpp"

namespace predreg {

Kernel Kernel::from_name(std::string_view name) {
  if (name == "epanechnikov") return Kernel(Kind::Epanechnikov);
  if (name == "triangular") return Kernel(Kind::Triangular);
  if (name == "quartic") return Kernel(Kind::Quartic);
  throw Error(Errc::BadInput, "unknown kernel '" + std::string(name) +
                                  "' (expected epanechnikov, triangular or quartic)");
}

std::string Kernel::name() const {
  switch (kind_) {
    case Kind::Epanechnikov: return "epanechnikov";
    case Kind::Triangular: return "triangular";
    case Kind::Quartic: return "quartic";
  }
  return "?";
}

double Kernel::scaled(double h, double u) const {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(Errc::BadBandwidth, "bandwidth must be positive and finite");
  }
  return (*this)(u / h) / h;
}

}  // namespace predreg

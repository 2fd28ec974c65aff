#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace predreg {

enum class Errc {
  RhoOutOfRange,
  BadBandwidth,
  NoLocalMass,
  DegenerateVariance,
  BadProbability,
  BadDf,
  NotStationary,
  BadInput,
  InvalidSpec,
  Config,
};

std::string_view errc_name(Errc code);

//! Library-wide error. Carries a machine-readable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Error(Errc code, const std::string& what, std::vector<double> locations);

  Errc code() const noexcept { return code_; }
  //! Spatial points involved in the failure (NoLocalMass), possibly empty.
  const std::vector<double>& locations() const noexcept { return locations_; }

 private:
  Errc code_;
  std::vector<double> locations_;
};

}  // namespace predreg

#include "predreg/error.hpp"

namespace predreg {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::RhoOutOfRange: return "RhoOutOfRange";
    case Errc::BadBandwidth: return "BadBandwidth";
    case Errc::NoLocalMass: return "NoLocalMass";
    case Errc::DegenerateVariance: return "DegenerateVariance";
    case Errc::BadProbability: return "BadProbability";
    case Errc::BadDf: return "BadDf";
    case Errc::NotStationary: return "NotStationary";
    case Errc::BadInput: return "BadInput";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::Config: return "Config";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

Error::Error(Errc code, const std::string& what, std::vector<double> locations)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what),
      code_(code),
      locations_(std::move(locations)) {}

}  // namespace predreg

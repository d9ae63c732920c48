#include "noisegap/error.hpp"

#include <sstream>

namespace noisegap {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::EmptySpectrum: return "EmptySpectrum";
    case ErrorKind::NonpositiveNoise: return "NonpositiveNoise";
    case ErrorKind::NegativeInformation: return "NegativeInformation";
    case ErrorKind::WeightSumInvalid: return "WeightSumInvalid";
    case ErrorKind::InvalidWeight: return "InvalidWeight";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::PoleHit: return "PoleHit";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::LeftUpperHalfPlane: return "LeftUpperHalfPlane";
    case ErrorKind::InvalidInterval: return "InvalidInterval";
    case ErrorKind::DegenerateProfile: return "DegenerateProfile";
    case ErrorKind::EmptyCdf: return "EmptyCdf";
    case ErrorKind::DecompositionFailure: return "DecompositionFailure";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::NoGapFound: return "NoGapFound";
    case ErrorKind::CertificationFailed: return "CertificationFailed";
  }
  return "Unknown";
}

ErrorClass classify(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::PoleHit:
    case ErrorKind::NoConvergence:
    case ErrorKind::LeftUpperHalfPlane:
    case ErrorKind::DecompositionFailure:
    case ErrorKind::CertificationFailed:
      return ErrorClass::Numerical;
    case ErrorKind::NoGapFound:
      return ErrorClass::NoGap;
    default:
      return ErrorClass::Validation;
  }
}

namespace {

std::string decorate(ErrorKind kind, const std::string& message,
                     std::optional<double> location) {
  std::ostringstream out;
  out << to_string(kind) << ": " << message;
  if (location) out << " (at " << *location << ")";
  return out.str();
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message,
             std::optional<double> location)
    : std::runtime_error(decorate(kind, message, location)),
      kind_(kind),
      location_(location) {}

}  // namespace noisegap

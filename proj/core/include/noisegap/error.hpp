#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace noisegap {

enum class ErrorKind {
  // spectrum / model validation
  EmptySpectrum,
  NonpositiveNoise,
  NegativeInformation,
  WeightSumInvalid,
  InvalidWeight,
  LengthMismatch,
  InvalidParameter,
  // fixed-point solver
  PoleHit,
  NoConvergence,
  LeftUpperHalfPlane,
  // density and gaps
  InvalidInterval,
  DegenerateProfile,
  // simulation
  EmptyCdf,
  DecompositionFailure,
  // experiment harness
  InvalidConfig,
  NoGapFound,
  CertificationFailed,
};

const char* to_string(ErrorKind kind) noexcept;

/// Broad failure class, used by the CLI to choose an exit code.
enum class ErrorClass { Validation, Numerical, NoGap };

ErrorClass classify(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<double> location = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }

  /// Abscissa or imaginary part at which a numerical routine gave up, when known.
  std::optional<double> location() const noexcept { return location_; }

 private:
  ErrorKind kind_;
  std::optional<double> location_;
};

}  // namespace noisegap

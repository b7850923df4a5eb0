#pragma once

#include <stdexcept>
#include <string>

namespace dipolewave {

// Base for all numerical failures; the CLI maps these to exit code 3.
struct NumericalError : std::runtime_error {
  NumericalError(const std::string& name, const std::string& what)
      : std::runtime_error(name + ": " + what), name(name) {}
  std::string name;
};

#define DIPOLEWAVE_ERROR(NAME)                                       \
  struct NAME : NumericalError {                                     \
    explicit NAME(const std::string& what) : NumericalError(#NAME, what) {} \
  }

DIPOLEWAVE_ERROR(SingularEvaluation);
DIPOLEWAVE_ERROR(ExpansionDiverged);
DIPOLEWAVE_ERROR(NonZeroMean);
DIPOLEWAVE_ERROR(NoConvergence);
DIPOLEWAVE_ERROR(DegenerateGeometry);
DIPOLEWAVE_ERROR(CompatibilityViolated);
DIPOLEWAVE_ERROR(NewtonDiverged);
DIPOLEWAVE_ERROR(SymmetryBroken);
DIPOLEWAVE_ERROR(EpsilonZero);
DIPOLEWAVE_ERROR(VortexNearSurface);
DIPOLEWAVE_ERROR(StepUnstable);
DIPOLEWAVE_ERROR(AmbiguousSignature);
DIPOLEWAVE_ERROR(BranchTooShort);

#undef DIPOLEWAVE_ERROR

// Config problems map to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dipolewave

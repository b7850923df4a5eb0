#pragma once

#include <string>
#include <vector>

#include "dipolewave/steady.hpp"

namespace dipolewave {

struct RunConfig {
  // geometry and strengths
  double a0 = 2.0;
  double rho0 = 1.0;
  double gamma1 = 1.0;
  double gamma2 = -1.0;  // < 0: derive from the compatibility condition
  double epsilon = 1e-2;
  double b = 1.0;
  double g = 1.0;

  // grid
  int N = 256;
  double L = -1.0;  // < 0: 40 * max(a0 + rho0, 1)
  int M = kDefaultDnoOrder;

  // solver
  double newtonTol = 1e-11;
  int maxNewtonIterations = 25;
  int epsilonSteps = 4;
  int cPoints = 11;
  double cSpan = 0.1;  // half-width of the c~ sweep around c~0

  // evolve
  double dt = 1e-3;
  double T = 1.0;
  int snapshotStride = 0;
  int evolvePoint = -1;  // branch point index; -1: middle

  // spectrum / perturbation experiment
  double zeroTol = 1e-8;
  int spectrumPoint = -1;
  std::string direction = "chi_c";  // chi_c | transverse | random
  double amplitude = 1e-4;
  double perturbT = 150.0;
  double perturbDt = 1e-2;

  unsigned seed = 1;
  int threads = 1;

  double gamma2Effective() const;
  double LEffective() const;
  Grid makeGrid() const;
  SteadyParams steadyParams() const;
  ContinuationSchedule schedule() const;

  void validate() const;
  std::string canonicalJson() const;
  std::string hash() const;  // FNV-1a of the canonical form
};

RunConfig loadConfig(const std::string& path);
RunConfig parseConfig(const std::string& text);

}  // namespace dipolewave

#pragma once

#include <vector>

#include "dipolewave/dynamics.hpp"
#include "dipolewave/surface.hpp"

namespace dipolewave {

struct SteadyParams {
  double epsilon = 0.0;
  double c_t = 0.0;  // scaled speed c~
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  double b = 1.0;
  double g = 1.0;
};

// Scaled unknowns; eta_t and psi_t are even in x1, psi_t is zero-mean (the
// parity of the printed residual components forces psi_t even).
struct SteadyUnknowns {
  Array eta_t;
  Array psi_t;
  double a = 0;
  double rho = 0;
};

struct SteadyResidual {
  Array F1;  // even (Bernoulli, scaled)
  Array F2;  // odd (kinematic, scaled)
  double F3 = 0, F4 = 0;
  double supNorm() const;
};

struct TravelingWave {
  double c = 0;  // unscaled speed
  FullState state;
  double a = 0, rho = 0;
  double a0 = 0, rho0 = 0;  // base geometry of the continuation
  double residual_norm = 0;
  SteadyParams params;
  SteadyUnknowns scaled;  // for restarts and diagnostics
  int dnoOrder = kDefaultDnoOrder;
};

// gamma2 = gamma1 (a0^3 + rho0^3)/(a0^3 - rho0^3)
double compatibility_gamma2(double a0, double rho0, double gamma1);

// c~0 = -gamma1/(4 pi (a0-rho0)) + gamma2/(4 pi) (1/a0 + 1/rho0)
double base_speed(double a0, double rho0, double gamma1, double gamma2);

struct MatrixT {
  Mat2 T;
  double detNumeric = 0;
  double detClosedForm = 0;
};
MatrixT matrix_T(double a0, double rho0, double gamma1, double gamma2);

// (a_0100, rho_0100): first-order response of the vortex geometry to c~
struct FirstOrderCoefficients {
  double a_c = 0, rho_c = 0;
};
FirstOrderCoefficients first_order_coefficients(double a0, double rho0, double gamma1, double gamma2);

// The steady operator F = (F1, F2, F3, F4) at general center abscissa xc
// (xc != 0 only used by translation-equivariance checks).
SteadyResidual steady_residual(const SteadyUnknowns& u, const SteadyParams& p, const Grid& grid,
                               int order = kDefaultDnoOrder, double xc = 0.0);

struct ContinuationSchedule {
  int epsilonSteps = 4;
  std::vector<double> cTildeOffsets = {0.0};  // branch points at c~ = c~0 + offset
  double tol = 1e-11;
  int maxNewtonIterations = 25;
};

// Damped Newton with a forward-difference Jacobian, continuing from the
// exact trivial solution at epsilon = 0; returns one TravelingWave per
// cTildeOffset at the target epsilon.
std::vector<TravelingWave> solve_branch(const SteadyParams& params, double a0, double rho0,
                                        const ContinuationSchedule& schedule, const Grid& grid,
                                        int order = kDefaultDnoOrder, int threads = 1);

// Sup-norms of the two Appendix reformulations (velocity-potential and
// stream-function steady equations) evaluated on the solved wave.
struct CrosscheckResiduals {
  double velocityPotentialForm = 0;
  double streamFunctionForm = 0;
};
CrosscheckResiduals steady_residual_crosscheck(const TravelingWave& wave);

// Conversion used by solve_branch and by tests: unscaled (eta, phi) state
// from scaled unknowns via phi' = -G(eta) psi.
FullState unknownsToState(const SteadyUnknowns& u, const SteadyParams& p, const Grid& grid,
                          int order = kDefaultDnoOrder, double xc = 0.0);

}  // namespace dipolewave

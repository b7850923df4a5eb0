#pragma once

#include <optional>
#include <vector>

#include "dipolewave/potentials.hpp"
#include "dipolewave/surface.hpp"

namespace dipolewave {

// Hamiltonian phase-space point u = (eta, phi, xbar, ybar).
struct FullState {
  SurfaceState surface;
  DipoleConfig dipole;

  // membership in O: vortices strictly submerged, below the reflected surface
  void validateO() const;
  double minSurfaceSeparation() const;
};

// Element of X* (also used for tangent increments, which share the carrier).
struct CotangentVector {
  Array d_eta;
  Array d_phi;  // zero-mean
  Vec2 d_xbar, d_ybar;
};
using StateIncrement = CotangentVector;

double energy(const FullState& u, int order = kDefaultDnoOrder);
double momentum(const FullState& u);
CotangentVector grad_energy(const FullState& u, int order = kDefaultDnoOrder);
CotangentVector grad_momentum(const FullState& u);

// J(u) w = B(u) Jhat w, assembled blockwise. Throws EpsilonZero when
// epsilon = 0 (the vortex blocks of Jhat carry 1/eps).
StateIncrement poisson_apply(const FullState& u, const CotangentVector& w);

// Explicit right-hand side of the evolution system for (eta, phi, xbar, ybar);
// d_t Theta is eliminated through the vortex velocities so the result is a
// state function. Throws VortexNearSurface within deltaSurf of the surface
// (default 3 grid spacings when deltaSurf <= 0).
StateIncrement evolution_rhs(const FullState& u, int order = kDefaultDnoOrder,
                             double deltaSurf = -1.0);

// T(s): shift surface fields, move centers by s e1. Spectral interpolation
// for non-commensurate s.
FullState translate(const FullState& u, double s);

struct EvolveOptions {
  double dt = 1e-3;
  double T = 1.0;
  int order = kDefaultDnoOrder;
  int snapshotStride = 0;  // 0: no snapshots
  double deltaSurf = -1.0;
};

struct BreachEvent {
  double time = 0;
  double separation = 0;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<double> E, P;
  std::vector<Vec2> xbar, ybar;
  std::vector<double> etaSup, minSeparation;
  std::vector<std::pair<double, FullState>> snapshots;
  std::optional<BreachEvent> breach;
  FullState final;
};

// Classical RK4 with conservation monitors; halts cleanly on a breach.
Trajectory evolve(const FullState& u0, const EvolveOptions& opts);

// Discrete X (energy-space) norm: H^1 for eta, homogeneous H^{1/2} for phi,
// Euclidean for the centers.
double stateNormX(const FullState& u);
double incrementNormX(const Grid& grid, const StateIncrement& v);
StateIncrement stateDifference(const FullState& a, const FullState& b);

}  // namespace dipolewave

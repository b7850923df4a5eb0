#pragma once

#include <functional>
#include <memory>

#include "dipolewave/fourier.hpp"
#include "dipolewave/geometry.hpp"
#include "dipolewave/potentials.hpp"

namespace dipolewave {

// Truncation of the line to the periodic box [-L, L).
struct Grid {
  int N = 256;
  double L = 40.0;
  std::shared_ptr<Spectral> sp;

  Grid() = default;
  Grid(int N, double L);
  const Spectral& spectral() const { return *sp; }
  double h() const { return 2.0 * L / N; }
  bool operator==(const Grid& o) const { return N == o.N && L == o.L; }
};

// Surface unknowns: elevation eta and the trace phi of the velocity
// potential, both sampled on the grid; phi is kept zero-mean.
struct SurfaceState {
  Grid grid;
  Array eta;
  Array phi;

  SurfaceState() = default;
  SurfaceState(Grid g) : grid(g), eta(g.N, 0.0), phi(g.N, 0.0) {}
  SurfaceState(Grid g, Array eta, Array phi);
  void validate(double decayTol = 1e-8) const;
};

inline constexpr int kDefaultDnoOrder = 8;

// Dirichlet-Neumann operator G(eta) f by the recursive Taylor expansion about
// G(0) = |D|, truncated at order M, with 2/3-rule dealiasing. Zero-mean in,
// zero-mean out.
Array dno_apply(const SurfaceState& state, const Array& f, int order = kDefaultDnoOrder);

// Solve G(eta) f = g for zero-mean f by |D|^{-1}-preconditioned CG.
Array dno_inverse(const SurfaceState& state, const Array& g, int order = kDefaultDnoOrder,
                  double tol = 1e-10, int maxIter = 600);

// Surface derivative operators applied to a 2D field restricted to the curve
// x2 = eta(x1). The field supplies value and gradient at a point.
using PlanarField = std::function<FieldSample(Vec2)>;
struct SurfaceDerivatives {
  Array perp;  // (-eta' d1 + d2) F |_S
  Array top;   // (d1 + eta' d2) F |_S
};
SurfaceDerivatives surface_derivatives(const SurfaceState& state, const PlanarField& F);

// kappa = -eta'' / <eta'>^3 with spectral derivatives.
Array curvature(const Grid& grid, const Array& eta);

// Trace of the gradient of the harmonic extension of phi:
// a = <eta'>^{-2} ((phi' - eta' G phi), (eta' phi' + G phi)).
struct VelocityTrace {
  Array a1, a2;
};
VelocityTrace velocity_trace(const SurfaceState& state, int order = kDefaultDnoOrder);

// Flat-strip representation of the harmonic extension of a surface trace:
// coefficients a with f = sum_m (eta^m/m!) |D|^m a, inverted to the same
// order as the DNO expansion. Evaluation is a decaying Fourier sum, valid
// strictly below the surface.
class HarmonicExtension {
 public:
  HarmonicExtension(const SurfaceState& state, const Array& trace, int order = kDefaultDnoOrder);
  double value(Vec2 x) const;
  Vec2 gradient(Vec2 x) const;

 private:
  const Spectral* sp_;
  Spectrum coeff_;
};

}  // namespace dipolewave

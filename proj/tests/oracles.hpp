#pragma once

// Independent test oracles: a second-order finite-difference Laplace solver
// for the Dirichlet-Neumann operator on the mapped strip, path quadrature for
// the vortex potentials, and small finite-difference helpers. Everything here
// is deliberately independent of the spectral implementation it checks.

#include <functional>

#include "dipolewave/fourier.hpp"
#include "dipolewave/geometry.hpp"
#include "dipolewave/surface.hpp"

namespace dipolewave::oracles {

// G(eta) f on the grid nodes by a finite-difference Laplace solve on the
// strip {x2 < eta} truncated at depth*L with a homogeneous Neumann bottom.
// eta derivatives are taken by finite differences as well. With richardson,
// the solve is repeated at double resolution and extrapolated.
Array laplaceDno(const Grid& grid, const Array& eta, const Array& f, int Ns,
                 double depthFactor = 6.0, bool richardson = true);

// Gauss-Legendre quadrature of a vector field along the segment [a, b].
double lineIntegral(const std::function<Vec2(Vec2)>& field, Vec2 a, Vec2 b, int panels = 64);

// 4th-order central difference of a scalar function of one variable.
double centralDerivative(const std::function<double(double)>& f, double x, double h);
double centralSecondDerivative(const std::function<double(double)>& f, double x, double h);

// 5-point finite-difference Laplacian of a planar scalar field.
double fdLaplacian(const std::function<double(Vec2)>& f, Vec2 x, double h);

}  // namespace dipolewave::oracles

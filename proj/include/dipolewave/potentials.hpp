#pragma once

#include <array>

#include "dipolewave/geometry.hpp"

namespace dipolewave {

// Guard radius around vortex centers and branch-cut rays.
inline constexpr double kDeltaMin = 1e-6;

// Finite dipole: upper vortex at xbar with strength eps*gamma1 (negative
// rotation), lower vortex at ybar with strength -eps*gamma2.
struct DipoleConfig {
  Vec2 xbar;
  Vec2 ybar;
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  double epsilon = 0.0;

  Vec2 xstar() const { return {xbar.x, -xbar.y}; }
  Vec2 ystar() const { return {ybar.x, -ybar.y}; }
  void validate() const;
};

struct FieldSample {
  double value = 0;
  Vec2 gradient;
  Mat2 hessian;  // symmetric
};

// Values of the four stream potentials at x and their sum.
struct ThetaValues {
  double theta1, theta1s, theta2, theta2s;
  double total() const { return theta1 + theta1s + theta2 + theta2s; }
};
struct GammaValues {
  double gamma1, gamma2, gamma1s, gamma2s;
  double total() const { return gamma1 + gamma2 + gamma1s + gamma2s; }
};

// Theta components: multivalued vortex angles. Branch cuts run straight down
// from the submerged centers and straight up from the image centers, so the
// total is single-valued on a neighborhood of any admissible surface.
// Throws SingularEvaluation within kDeltaMin of a center or cut ray.
ThetaValues theta(Vec2 x, const DipoleConfig& cfg);

// Harmonic conjugates (log kernels), single-valued. Throws SingularEvaluation
// within kDeltaMin of a center.
GammaValues gamma(Vec2 x, const DipoleConfig& cfg);

// Full field samples of the sums; derivative entries are single-valued and
// guard only the centers. thetaField's value uses the cut convention above.
FieldSample thetaField(Vec2 x, const DipoleConfig& cfg);
FieldSample gammaField(Vec2 x, const DipoleConfig& cfg);

// xi = -grad_{xbar} Theta = (Upsilon1_x1, Xi1_x2), zeta = -grad_{ybar} Theta.
// Returned with the spatial gradient of each component (rows of the sample).
struct VectorFieldSample {
  Vec2 value;
  Mat2 jacobian;  // d(value_i)/d(x_j)
};
VectorFieldSample xiField(Vec2 x, const DipoleConfig& cfg);
VectorFieldSample zetaField(Vec2 x, const DipoleConfig& cfg);
struct XiZeta {
  Vec2 xi, zeta;
};
XiZeta xi_zeta(Vec2 x, const DipoleConfig& cfg);

// Second derivatives of Theta and Gamma in the center arguments, evaluated
// at x: D^2_{xbar}Theta = (U1_x1x1, X1_x1x2; X1_x1x2, U1_x2x2) and the
// analogous Gamma matrices.
struct CenterSecondDerivatives {
  Mat2 d2_xbar_theta, d2_ybar_theta;
  Mat2 d2_xbar_gamma, d2_ybar_gamma;
};
CenterSecondDerivatives second_center_derivatives(Vec2 x, const DipoleConfig& cfg);

// Renormalized vortex interaction energy Gamma^* (the Kirchhoff-Routh part of
// K2) as an explicit function of the centers, with closed-form derivatives.
double gammaStar(const DipoleConfig& cfg);
Vec2 gradGammaStarXbar(const DipoleConfig& cfg);
Vec2 gradGammaStarYbar(const DipoleConfig& cfg);
Mat2 hessGammaStarXbar(const DipoleConfig& cfg);
Mat2 hessGammaStarYbar(const DipoleConfig& cfg);
Mat2 hessGammaStarCross(const DipoleConfig& cfg);  // d^2/(d xbar_i d ybar_j)

// Kirchhoff-Helmholtz drift of each vortex from the images and the other
// vortex (self-field removed), evaluated through the single-valued Gamma
// gradients: xbar drift uses grad(Theta1* + Theta2 + Theta2*), etc.
Vec2 imageDriftXbar(const DipoleConfig& cfg);
Vec2 imageDriftYbar(const DipoleConfig& cfg);

}  // namespace dipolewave

#include "dipolewave/potentials.hpp"

#include <cmath>

#include "dipolewave/errors.hpp"

namespace dipolewave {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

struct Kernel {
  double value;
  Vec2 grad;
  Mat2 hess;
};

void guardCenter(Vec2 d) {
  if (d.norm() < kDeltaMin) throw SingularEvaluation("evaluation at a vortex or image center");
}

// log|x - p|
Kernel logKernel(Vec2 x, Vec2 p) {
  Vec2 d = x - p;
  guardCenter(d);
  double r2 = d.norm2();
  Kernel k;
  k.value = 0.5 * std::log(r2);
  k.grad = d / r2;
  double r4 = r2 * r2;
  k.hess = Mat2(d.y * d.y - d.x * d.x, -2 * d.x * d.y, -2 * d.x * d.y, d.x * d.x - d.y * d.y) * (1.0 / r4);
  return k;
}

// Angle around p with the branch cut along the downward (cutUp=false) or
// upward (cutUp=true) vertical ray; both share the gradient (w,-u)/r^2 of
// the harmonic conjugate of log|x-p|.
Kernel angleKernel(Vec2 x, Vec2 p, bool cutUp, bool valueNeeded) {
  Vec2 d = x - p;
  guardCenter(d);
  double u = d.x, w = d.y;
  double r2 = d.norm2();
  Kernel k;
  if (valueNeeded) {
    bool onCut = cutUp ? (w > 0 && std::abs(u) < kDeltaMin) : (w < 0 && std::abs(u) < kDeltaMin);
    if (onCut) throw SingularEvaluation("evaluation on a branch-cut ray");
    k.value = cutUp ? -std::atan2(u, -w) : std::atan2(u, w);
  } else {
    k.value = 0.0;
  }
  k.grad = Vec2(w, -u) / r2;
  double r4 = r2 * r2;
  k.hess = Mat2(-2 * u * w, u * u - w * w, u * u - w * w, 2 * u * w) * (1.0 / r4);
  return k;
}

struct Coeffs {
  // signed prefactors of the four components (1, 1*, 2, 2*)
  double c1, c1s, c2, c2s;
};
Coeffs thetaCoeffs(const DipoleConfig& cfg) {
  return {-cfg.gamma1 / kTwoPi, cfg.gamma1 / kTwoPi, cfg.gamma2 / kTwoPi, -cfg.gamma2 / kTwoPi};
}
Coeffs gammaCoeffs(const DipoleConfig& cfg) {
  return {cfg.gamma1 / kTwoPi, -cfg.gamma1 / kTwoPi, -cfg.gamma2 / kTwoPi, cfg.gamma2 / kTwoPi};
}

Mat2 hessLog(Vec2 d) {
  double r2 = d.norm2();
  double r4 = r2 * r2;
  return Mat2(d.y * d.y - d.x * d.x, -2 * d.x * d.y, -2 * d.x * d.y, d.x * d.x - d.y * d.y) * (1.0 / r4);
}

}  // namespace

void DipoleConfig::validate() const {
  if ((xbar - ybar).norm() < kDeltaMin) throw DegenerateGeometry("vortex centers coincide");
  if (!(gamma1 > 0) || !(gamma2 > 0)) throw DegenerateGeometry("vortex strengths must be positive");
}

ThetaValues theta(Vec2 x, const DipoleConfig& cfg) {
  Coeffs c = thetaCoeffs(cfg);
  ThetaValues t;
  t.theta1 = c.c1 * angleKernel(x, cfg.xbar, false, true).value;
  t.theta1s = c.c1s * angleKernel(x, cfg.xstar(), true, true).value;
  t.theta2 = c.c2 * angleKernel(x, cfg.ybar, false, true).value;
  t.theta2s = c.c2s * angleKernel(x, cfg.ystar(), true, true).value;
  return t;
}

GammaValues gamma(Vec2 x, const DipoleConfig& cfg) {
  Coeffs c = gammaCoeffs(cfg);
  GammaValues g;
  g.gamma1 = c.c1 * logKernel(x, cfg.xbar).value;
  g.gamma1s = c.c1s * logKernel(x, cfg.xstar()).value;
  g.gamma2 = c.c2 * logKernel(x, cfg.ybar).value;
  g.gamma2s = c.c2s * logKernel(x, cfg.ystar()).value;
  return g;
}

namespace {
FieldSample combine(Vec2 x, const DipoleConfig& cfg, const Coeffs& c, bool isTheta, bool valueNeeded) {
  FieldSample s;
  auto add = [&](double coef, const Kernel& k) {
    s.value += coef * k.value;
    s.gradient += coef * k.grad;
    s.hessian += coef * k.hess;
  };
  if (isTheta) {
    add(c.c1, angleKernel(x, cfg.xbar, false, valueNeeded));
    add(c.c1s, angleKernel(x, cfg.xstar(), true, valueNeeded));
    add(c.c2, angleKernel(x, cfg.ybar, false, valueNeeded));
    add(c.c2s, angleKernel(x, cfg.ystar(), true, valueNeeded));
  } else {
    add(c.c1, logKernel(x, cfg.xbar));
    add(c.c1s, logKernel(x, cfg.xstar()));
    add(c.c2, logKernel(x, cfg.ybar));
    add(c.c2s, logKernel(x, cfg.ystar()));
  }
  return s;
}
}  // namespace

FieldSample thetaField(Vec2 x, const DipoleConfig& cfg) {
  return combine(x, cfg, thetaCoeffs(cfg), true, true);
}

FieldSample gammaField(Vec2 x, const DipoleConfig& cfg) {
  return combine(x, cfg, gammaCoeffs(cfg), false, true);
}

VectorFieldSample xiField(Vec2 x, const DipoleConfig& cfg) {
  Coeffs c = thetaCoeffs(cfg);
  Kernel k1 = angleKernel(x, cfg.xbar, false, false);
  Kernel k1s = angleKernel(x, cfg.xstar(), true, false);
  VectorFieldSample v;
  // Upsilon1 = Theta1 + Theta1*, Xi1 = Theta1 - Theta1*
  v.value.x = c.c1 * k1.grad.x + c.c1s * k1s.grad.x;       // U1_x1
  v.value.y = c.c1 * k1.grad.y - c.c1s * k1s.grad.y;       // X1_x2
  v.jacobian.a = c.c1 * k1.hess.a + c.c1s * k1s.hess.a;    // U1_x1x1
  v.jacobian.b = c.c1 * k1.hess.b + c.c1s * k1s.hess.b;    // U1_x1x2
  v.jacobian.c = c.c1 * k1.hess.b - c.c1s * k1s.hess.b;    // X1_x2x1
  v.jacobian.d = c.c1 * k1.hess.d - c.c1s * k1s.hess.d;    // X1_x2x2
  return v;
}

VectorFieldSample zetaField(Vec2 x, const DipoleConfig& cfg) {
  Coeffs c = thetaCoeffs(cfg);
  Kernel k2 = angleKernel(x, cfg.ybar, false, false);
  Kernel k2s = angleKernel(x, cfg.ystar(), true, false);
  VectorFieldSample v;
  v.value.x = c.c2 * k2.grad.x + c.c2s * k2s.grad.x;
  v.value.y = c.c2 * k2.grad.y - c.c2s * k2s.grad.y;
  v.jacobian.a = c.c2 * k2.hess.a + c.c2s * k2s.hess.a;
  v.jacobian.b = c.c2 * k2.hess.b + c.c2s * k2s.hess.b;
  v.jacobian.c = c.c2 * k2.hess.b - c.c2s * k2s.hess.b;
  v.jacobian.d = c.c2 * k2.hess.d - c.c2s * k2s.hess.d;
  return v;
}

XiZeta xi_zeta(Vec2 x, const DipoleConfig& cfg) {
  return {xiField(x, cfg).value, zetaField(x, cfg).value};
}

CenterSecondDerivatives second_center_derivatives(Vec2 x, const DipoleConfig& cfg) {
  Coeffs ct = thetaCoeffs(cfg);
  Coeffs cg = gammaCoeffs(cfg);
  Kernel t1 = angleKernel(x, cfg.xbar, false, false);
  Kernel t1s = angleKernel(x, cfg.xstar(), true, false);
  Kernel t2 = angleKernel(x, cfg.ybar, false, false);
  Kernel t2s = angleKernel(x, cfg.ystar(), true, false);
  Kernel g1 = logKernel(x, cfg.xbar);
  Kernel g1s = logKernel(x, cfg.xstar());
  Kernel g2 = logKernel(x, cfg.ybar);
  Kernel g2s = logKernel(x, cfg.ystar());
  CenterSecondDerivatives d;
  // Hess(f_center) + S Hess(f_image) S for a center and its reflection
  d.d2_xbar_theta = ct.c1 * t1.hess + (ct.c1s * t1s.hess).reflectConj();
  d.d2_ybar_theta = ct.c2 * t2.hess + (ct.c2s * t2s.hess).reflectConj();
  d.d2_xbar_gamma = cg.c1 * g1.hess + (cg.c1s * g1s.hess).reflectConj();
  d.d2_ybar_gamma = cg.c2 * g2.hess + (cg.c2s * g2s.hess).reflectConj();
  return d;
}

double gammaStar(const DipoleConfig& cfg) {
  double g1 = cfg.gamma1, g2 = cfg.gamma2;
  if (!(cfg.xbar.y < 0) || !(cfg.ybar.y < 0)) throw SingularEvaluation("Gamma*: vortices must be submerged");
  Vec2 d = cfg.xbar - cfg.ybar;
  Vec2 ds = cfg.xbar - cfg.ystar();
  guardCenter(d);
  return -(g1 * g1 / (4 * M_PI)) * std::log(-2 * cfg.xbar.y)
         - (g2 * g2 / (4 * M_PI)) * std::log(-2 * cfg.ybar.y)
         + (g1 * g2 / kTwoPi) * (std::log(ds.norm()) - std::log(d.norm()));
}

Vec2 gradGammaStarXbar(const DipoleConfig& cfg) {
  double g1 = cfg.gamma1, g2 = cfg.gamma2;
  Vec2 d = cfg.xbar - cfg.ybar;
  Vec2 ds = cfg.xbar - cfg.ystar();
  guardCenter(d);
  Vec2 v(0.0, -g1 * g1 / (4 * M_PI * cfg.xbar.y));
  v += (g1 * g2 / kTwoPi) * (ds / ds.norm2() - d / d.norm2());
  return v;
}

Vec2 gradGammaStarYbar(const DipoleConfig& cfg) {
  double g1 = cfg.gamma1, g2 = cfg.gamma2;
  Vec2 d = cfg.xbar - cfg.ybar;
  Vec2 ds = cfg.xbar - cfg.ystar();
  guardCenter(d);
  Vec2 v(0.0, -g2 * g2 / (4 * M_PI * cfg.ybar.y));
  v += (g1 * g2 / kTwoPi) * (Vec2(-ds.x, ds.y) / ds.norm2() + d / d.norm2());
  return v;
}

Mat2 hessGammaStarXbar(const DipoleConfig& cfg) {
  double g1 = cfg.gamma1, g2 = cfg.gamma2;
  Vec2 d = cfg.xbar - cfg.ybar;
  Vec2 ds = cfg.xbar - cfg.ystar();
  guardCenter(d);
  Mat2 m = Mat2::diag(0.0, g1 * g1 / (4 * M_PI * cfg.xbar.y * cfg.xbar.y));
  m += (g1 * g2 / kTwoPi) * (hessLog(ds) - hessLog(d));
  return m;
}

Mat2 hessGammaStarYbar(const DipoleConfig& cfg) {
  double g1 = cfg.gamma1, g2 = cfg.gamma2;
  Vec2 d = cfg.xbar - cfg.ybar;
  Vec2 ds = cfg.xbar - cfg.ystar();
  guardCenter(d);
  Mat2 m = Mat2::diag(0.0, g2 * g2 / (4 * M_PI * cfg.ybar.y * cfg.ybar.y));
  m += (g1 * g2 / kTwoPi) * (hessLog(ds).reflectConj() - hessLog(d));
  return m;
}

Mat2 hessGammaStarCross(const DipoleConfig& cfg) {
  double g1 = cfg.gamma1, g2 = cfg.gamma2;
  Vec2 d = cfg.xbar - cfg.ybar;
  Vec2 ds = cfg.xbar - cfg.ystar();
  guardCenter(d);
  // d(ds)/d(ybar) = diag(-1, +1)
  Mat2 hs = hessLog(ds);
  Mat2 first(-hs.a, hs.b, -hs.c, hs.d);  // hessLog(ds) * diag(-1, 1)
  return (g1 * g2 / kTwoPi) * (first + hessLog(d));
}

Vec2 imageDriftXbar(const DipoleConfig& cfg) {
  Coeffs c = gammaCoeffs(cfg);
  Vec2 grad = c.c1s * logKernel(cfg.xbar, cfg.xstar()).grad
            + c.c2 * logKernel(cfg.xbar, cfg.ybar).grad
            + c.c2s * logKernel(cfg.xbar, cfg.ystar()).grad;
  return rot90(grad);
}

Vec2 imageDriftYbar(const DipoleConfig& cfg) {
  Coeffs c = gammaCoeffs(cfg);
  Vec2 grad = c.c1 * logKernel(cfg.ybar, cfg.xbar).grad
            + c.c1s * logKernel(cfg.ybar, cfg.xstar()).grad
            + c.c2s * logKernel(cfg.ybar, cfg.ystar()).grad;
  return rot90(grad);
}

}  // namespace dipolewave

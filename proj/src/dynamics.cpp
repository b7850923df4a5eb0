#include "dipolewave/dynamics.hpp"

#include <cmath>

#include "dipolewave/errors.hpp"

namespace dipolewave {

namespace {

// Traces of the dipole fields along the surface, shared by the energy,
// momentum, gradients and Poisson blocks.
struct SurfaceTraces {
  Array theta;              // Theta|_S
  Array theta_x1, theta_x2; // field partials on S
  Array perpTheta;          // (-eta' d1 + d2) Theta |_S
  Array xi1, xi2, zeta1, zeta2;
  Array perpXi1, perpXi2, perpZeta1, perpZeta2;
  Array etaPrime;
};

SurfaceTraces surfaceTraces(const FullState& u) {
  const Spectral& sp = u.surface.grid.spectral();
  const int n = sp.n();
  SurfaceTraces t;
  t.etaPrime = sp.deriv(u.surface.eta);
  t.theta.resize(n);
  t.theta_x1.resize(n);
  t.theta_x2.resize(n);
  t.perpTheta.resize(n);
  t.xi1.resize(n);
  t.xi2.resize(n);
  t.zeta1.resize(n);
  t.zeta2.resize(n);
  t.perpXi1.resize(n);
  t.perpXi2.resize(n);
  t.perpZeta1.resize(n);
  t.perpZeta2.resize(n);
  for (int i = 0; i < n; ++i) {
    Vec2 x(sp.node(i), u.surface.eta[i]);
    FieldSample th = thetaField(x, u.dipole);
    VectorFieldSample xi = xiField(x, u.dipole);
    VectorFieldSample ze = zetaField(x, u.dipole);
    double ep = t.etaPrime[i];
    t.theta[i] = th.value;
    t.theta_x1[i] = th.gradient.x;
    t.theta_x2[i] = th.gradient.y;
    t.perpTheta[i] = -ep * th.gradient.x + th.gradient.y;
    t.xi1[i] = xi.value.x;
    t.xi2[i] = xi.value.y;
    t.zeta1[i] = ze.value.x;
    t.zeta2[i] = ze.value.y;
    t.perpXi1[i] = -ep * xi.jacobian.a + xi.jacobian.b;
    t.perpXi2[i] = -ep * xi.jacobian.c + xi.jacobian.d;
    t.perpZeta1[i] = -ep * ze.jacobian.a + ze.jacobian.b;
    t.perpZeta2[i] = -ep * ze.jacobian.c + ze.jacobian.d;
  }
  return t;
}

constexpr double kG = 1.0;  // gravity is nondimensionalized to 1
constexpr double kB = 1.0;  // surface tension coefficient

}  // namespace

void FullState::validateO() const {
  const Spectral& sp = surface.grid.spectral();
  Spectrum ce = sp.fft(surface.eta);
  auto etaAt = [&](double x) { return sp.evaluate(ce, x); };
  const Vec2 xb = dipole.xbar, yb = dipole.ybar;
  double ex = etaAt(xb.x), ey = etaAt(yb.x);
  if (!(xb.y < ex && ex < -xb.y)) throw SingularEvaluation("state leaves O: xbar constraint violated");
  if (!(yb.y < ey && ey < -yb.y)) throw SingularEvaluation("state leaves O: ybar constraint violated");
  if ((xb - yb).norm() < kDeltaMin) throw DegenerateGeometry("state leaves O: coincident vortices");
}

double FullState::minSurfaceSeparation() const {
  const Spectral& sp = surface.grid.spectral();
  Spectrum ce = sp.fft(surface.eta);
  double sx = sp.evaluate(ce, dipole.xbar.x) - dipole.xbar.y;
  double sy = sp.evaluate(ce, dipole.ybar.x) - dipole.ybar.y;
  return std::min(sx, sy);
}

double energy(const FullState& u, int order) {
  const Spectral& sp = u.surface.grid.spectral();
  const double eps = u.dipole.epsilon;
  Array gphi = dno_apply(u.surface, u.surface.phi, order);
  SurfaceTraces t = surfaceTraces(u);
  double K0 = 0.5 * sp.inner(u.surface.phi, gphi);
  double K1 = sp.inner(u.surface.phi, t.perpTheta);
  double K2 = 0.5 * sp.inner(t.theta, t.perpTheta) + gammaStar(u.dipole);
  double V = 0;
  for (int i = 0; i < sp.n(); ++i) {
    double e = u.surface.eta[i], ep = t.etaPrime[i];
    V += 0.5 * kG * e * e + kB * (std::sqrt(1.0 + ep * ep) - 1.0);
  }
  V *= sp.h();
  return K0 + eps * K1 + eps * eps * K2 + V;
}

double momentum(const FullState& u) {
  const Spectral& sp = u.surface.grid.spectral();
  const double eps = u.dipole.epsilon;
  SurfaceTraces t = surfaceTraces(u);
  double P = -eps * u.dipole.gamma1 * u.dipole.xbar.y + eps * u.dipole.gamma2 * u.dipole.ybar.y;
  for (int i = 0; i < sp.n(); ++i)
    P -= t.etaPrime[i] * (u.surface.phi[i] + eps * t.theta[i]) * sp.h();
  return P;
}

CotangentVector grad_energy(const FullState& u, int order) {
  const Spectral& sp = u.surface.grid.spectral();
  const int n = sp.n();
  const double eps = u.dipole.epsilon;
  Array gphi = dno_apply(u.surface, u.surface.phi, order);
  Array phiPrime = sp.deriv(u.surface.phi);
  SurfaceTraces t = surfaceTraces(u);

  CotangentVector g;
  g.d_phi.resize(n);
  for (int i = 0; i < n; ++i) g.d_phi[i] = gphi[i] + eps * t.perpTheta[i];
  g.d_phi = sp.zeroMean(g.d_phi);

  // eta component: D_eta K0 via the trace identity, then K1, K2, V parts.
  g.d_eta.resize(n);
  Array ep = t.etaPrime;
  Array tension(n);
  for (int i = 0; i < n; ++i) tension[i] = ep[i] / std::sqrt(1.0 + ep[i] * ep[i]);
  Array tensionPrime = sp.deriv(tension);
  for (int i = 0; i < n; ++i) {
    double j2 = 1.0 + ep[i] * ep[i];
    double k0 = 0.5 * (phiPrime[i] * phiPrime[i] - gphi[i] * gphi[i]
                       - 2.0 * ep[i] * phiPrime[i] * gphi[i]) / j2;
    double k1 = phiPrime[i] * t.theta_x1[i];
    double k2 = 0.5 * (t.theta_x1[i] * t.theta_x1[i] + t.theta_x2[i] * t.theta_x2[i]);
    g.d_eta[i] = k0 + eps * k1 + eps * eps * k2 + kG * u.surface.eta[i] - kB * tensionPrime[i];
  }

  // center components
  auto centerGrad = [&](const Array& tr1, const Array& tr2, const Array& perp1, const Array& perp2) {
    Vec2 v;
    for (int i = 0; i < n; ++i) {
      v.x += -eps * u.surface.phi[i] * perp1[i]
             - 0.5 * eps * eps * (tr1[i] * t.perpTheta[i] + t.theta[i] * perp1[i]);
      v.y += -eps * u.surface.phi[i] * perp2[i]
             - 0.5 * eps * eps * (tr2[i] * t.perpTheta[i] + t.theta[i] * perp2[i]);
    }
    return v * sp.h();
  };
  g.d_xbar = centerGrad(t.xi1, t.xi2, t.perpXi1, t.perpXi2) + eps * eps * gradGammaStarXbar(u.dipole);
  g.d_ybar = centerGrad(t.zeta1, t.zeta2, t.perpZeta1, t.perpZeta2) + eps * eps * gradGammaStarYbar(u.dipole);
  return g;
}

CotangentVector grad_momentum(const FullState& u) {
  const Spectral& sp = u.surface.grid.spectral();
  const int n = sp.n();
  const double eps = u.dipole.epsilon;
  SurfaceTraces t = surfaceTraces(u);
  Array phiPrime = sp.deriv(u.surface.phi);
  CotangentVector g;
  g.d_eta.resize(n);
  g.d_phi.resize(n);
  for (int i = 0; i < n; ++i) {
    g.d_eta[i] = phiPrime[i] + eps * t.theta_x1[i];
    g.d_phi[i] = -t.etaPrime[i];
  }
  g.d_phi = sp.zeroMean(g.d_phi);
  Vec2 ix(0, 0), iy(0, 0);
  for (int i = 0; i < n; ++i) {
    ix += Vec2(t.xi1[i], t.xi2[i]) * t.etaPrime[i];
    iy += Vec2(t.zeta1[i], t.zeta2[i]) * t.etaPrime[i];
  }
  g.d_xbar = Vec2(0, -eps * u.dipole.gamma1) + eps * sp.h() * ix;
  g.d_ybar = Vec2(0, eps * u.dipole.gamma2) + eps * sp.h() * iy;
  return g;
}

StateIncrement poisson_apply(const FullState& u, const CotangentVector& w) {
  const Spectral& sp = u.surface.grid.spectral();
  const int n = sp.n();
  const double eps = u.dipole.epsilon;
  const double g1 = u.dipole.gamma1, g2 = u.dipole.gamma2;
  if (eps == 0.0) throw EpsilonZero("poisson_apply: Jhat vortex blocks are undefined at epsilon = 0");
  SurfaceTraces t = surfaceTraces(u);

  double wXi1 = sp.inner(w.d_phi, t.xi1), wXi2 = sp.inner(w.d_phi, t.xi2);
  double wZe1 = sp.inner(w.d_phi, t.zeta1), wZe2 = sp.inner(w.d_phi, t.zeta2);

  StateIncrement out;
  out.d_eta = w.d_phi;
  out.d_phi.resize(n);
  for (int i = 0; i < n; ++i) {
    double j22 = (eps / g1) * (t.xi2[i] * wXi1 - t.xi1[i] * wXi2)
               + (eps / g2) * (t.zeta1[i] * wZe2 - t.zeta2[i] * wZe1);
    double j23 = (t.xi2[i] * w.d_xbar.x - t.xi1[i] * w.d_xbar.y) / g1;
    double j24 = (-t.zeta2[i] * w.d_ybar.x + t.zeta1[i] * w.d_ybar.y) / g2;
    out.d_phi[i] = -w.d_eta[i] + j22 + j23 + j24;
  }
  out.d_xbar = Vec2(-wXi2 / g1, wXi1 / g1) + rot90(w.d_xbar) / (eps * g1);
  out.d_ybar = Vec2(wZe2 / g2, -wZe1 / g2) - rot90(w.d_ybar) / (eps * g2);
  return out;
}

StateIncrement evolution_rhs(const FullState& u, int order, double deltaSurf) {
  const Spectral& sp = u.surface.grid.spectral();
  const int n = sp.n();
  const double eps = u.dipole.epsilon;
  if (deltaSurf <= 0) deltaSurf = 3.0 * sp.h();
  double sep = u.minSurfaceSeparation();
  if (sep < deltaSurf) throw VortexNearSurface("vortex-surface separation " + std::to_string(sep));
  u.validateO();

  Array gphi = dno_apply(u.surface, u.surface.phi, order);
  Array phiPrime = sp.deriv(u.surface.phi);
  Array etaPP = sp.deriv(u.surface.eta, 2);
  SurfaceTraces t = surfaceTraces(u);

  // vortex velocities: irrotational part from the harmonic extension of phi,
  // plus the image/other-vortex drift (self-interaction removed)
  HarmonicExtension ext(u.surface, u.surface.phi, order);
  Vec2 vx = ext.gradient(u.dipole.xbar) + eps * imageDriftXbar(u.dipole);
  Vec2 vy = ext.gradient(u.dipole.ybar) + eps * imageDriftYbar(u.dipole);

  StateIncrement out;
  out.d_eta.resize(n);
  out.d_phi.resize(n);
  for (int i = 0; i < n; ++i) out.d_eta[i] = gphi[i] + eps * t.perpTheta[i];
  for (int i = 0; i < n; ++i) {
    double ep = t.etaPrime[i];
    double j2 = 1.0 + ep * ep;
    double quad = -0.5 / j2 * (phiPrime[i] * phiPrime[i]
                               - 2.0 * ep * phiPrime[i] * gphi[i]
                               - gphi[i] * gphi[i]);
    double dtTheta = -(t.xi1[i] * vx.x + t.xi2[i] * vx.y)
                     - (t.zeta1[i] * vy.x + t.zeta2[i] * vy.y);
    double grad2 = t.theta_x1[i] * t.theta_x1[i] + t.theta_x2[i] * t.theta_x2[i];
    double j = std::sqrt(j2);
    out.d_phi[i] = quad - eps * dtTheta - eps * phiPrime[i] * t.theta_x1[i]
                   - 0.5 * eps * eps * grad2 - kG * u.surface.eta[i]
                   + kB * etaPP[i] / (j * j * j);
  }
  out.d_phi = sp.zeroMean(out.d_phi);  // phi gauge: quotient out constants
  out.d_xbar = vx;
  out.d_ybar = vy;
  return out;
}

FullState translate(const FullState& u, double s) {
  const Spectral& sp = u.surface.grid.spectral();
  FullState v = u;
  v.surface.eta = sp.shift(u.surface.eta, s);
  v.surface.phi = sp.shift(u.surface.phi, s);
  v.dipole.xbar.x += s;
  v.dipole.ybar.x += s;
  return v;
}

double incrementNormX(const Grid& grid, const StateIncrement& v) {
  const Spectral& sp = grid.spectral();
  Spectrum ce = sp.fft(v.d_eta);
  Spectrum cp = sp.fft(v.d_phi);
  double s = 0;
  for (int k = 0; k < sp.bins(); ++k) {
    double kk = sp.wavenumber(k);
    double w = (k == 0 || k == sp.n() / 2) ? 1.0 : 2.0;
    s += w * (1.0 + kk * kk) * std::norm(ce[k]) * 2.0 * sp.L();
    s += w * kk * std::norm(cp[k]) * 2.0 * sp.L();
  }
  s += v.d_xbar.norm2() + v.d_ybar.norm2();
  return std::sqrt(s);
}

StateIncrement stateDifference(const FullState& a, const FullState& b) {
  StateIncrement d;
  const int n = a.surface.grid.N;
  d.d_eta.resize(n);
  d.d_phi.resize(n);
  for (int i = 0; i < n; ++i) {
    d.d_eta[i] = a.surface.eta[i] - b.surface.eta[i];
    d.d_phi[i] = a.surface.phi[i] - b.surface.phi[i];
  }
  d.d_xbar = a.dipole.xbar - b.dipole.xbar;
  d.d_ybar = a.dipole.ybar - b.dipole.ybar;
  return d;
}

double stateNormX(const FullState& u) {
  StateIncrement v;
  v.d_eta = u.surface.eta;
  v.d_phi = u.surface.phi;
  v.d_xbar = u.dipole.xbar;
  v.d_ybar = u.dipole.ybar;
  return incrementNormX(u.surface.grid, v);
}

namespace {
FullState axpy(const FullState& u, double a, const StateIncrement& v) {
  FullState w = u;
  const int n = u.surface.grid.N;
  for (int i = 0; i < n; ++i) {
    w.surface.eta[i] += a * v.d_eta[i];
    w.surface.phi[i] += a * v.d_phi[i];
  }
  w.dipole.xbar += a * v.d_xbar;
  w.dipole.ybar += a * v.d_ybar;
  return w;
}
}  // namespace

Trajectory evolve(const FullState& u0, const EvolveOptions& opts) {
  const Spectral& sp = u0.surface.grid.spectral();
  double kmax = sp.maxWavenumber();
  double omegaMax = std::sqrt(kB * kmax * kmax * kmax + kG * kmax);
  if (opts.dt * omegaMax > 2.5)
    throw ConfigError("evolve: dt violates the capillary dispersion stability guard");

  Trajectory traj;
  FullState u = u0;
  int steps = (int)std::llround(opts.T / opts.dt);
  double normPrev = stateNormX(u);

  auto record = [&](double time) {
    traj.t.push_back(time);
    traj.E.push_back(energy(u, opts.order));
    traj.P.push_back(momentum(u));
    traj.xbar.push_back(u.dipole.xbar);
    traj.ybar.push_back(u.dipole.ybar);
    traj.etaSup.push_back(sp.supNorm(u.surface.eta));
    traj.minSeparation.push_back(u.minSurfaceSeparation());
  };
  record(0.0);
  if (opts.snapshotStride > 0) traj.snapshots.push_back({0.0, u});

  for (int s = 1; s <= steps; ++s) {
    try {
      StateIncrement k1 = evolution_rhs(u, opts.order, opts.deltaSurf);
      StateIncrement k2 = evolution_rhs(axpy(u, 0.5 * opts.dt, k1), opts.order, opts.deltaSurf);
      StateIncrement k3 = evolution_rhs(axpy(u, 0.5 * opts.dt, k2), opts.order, opts.deltaSurf);
      StateIncrement k4 = evolution_rhs(axpy(u, opts.dt, k3), opts.order, opts.deltaSurf);
      const int n = sp.n();
      for (int i = 0; i < n; ++i) {
        u.surface.eta[i] += opts.dt / 6.0 * (k1.d_eta[i] + 2 * k2.d_eta[i] + 2 * k3.d_eta[i] + k4.d_eta[i]);
        u.surface.phi[i] += opts.dt / 6.0 * (k1.d_phi[i] + 2 * k2.d_phi[i] + 2 * k3.d_phi[i] + k4.d_phi[i]);
      }
      u.dipole.xbar += opts.dt / 6.0 * (k1.d_xbar + 2 * k2.d_xbar + 2 * k3.d_xbar + k4.d_xbar);
      u.dipole.ybar += opts.dt / 6.0 * (k1.d_ybar + 2 * k2.d_ybar + 2 * k3.d_ybar + k4.d_ybar);
    } catch (const VortexNearSurface&) {
      traj.breach = BreachEvent{s * opts.dt, u.minSurfaceSeparation()};
      break;
    }
    double norm = stateNormX(u);
    if (norm > 1e3 * std::max(normPrev, 1e-12))
      throw StepUnstable("evolve: state norm grew by 10^3 in one step");
    normPrev = norm;
    record(s * opts.dt);
    if (opts.snapshotStride > 0 && s % opts.snapshotStride == 0)
      traj.snapshots.push_back({s * opts.dt, u});
  }
  traj.final = u;
  return traj;
}

}  // namespace dipolewave

#include "dipolewave/steady.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <future>

#include "dipolewave/errors.hpp"

namespace dipolewave {

namespace {
constexpr double kFourPi = 4.0 * M_PI;

void guardGeometry(double a0, double rho0) {
  if (!(rho0 > 0) || !(rho0 < a0)) throw DegenerateGeometry("require 0 < rho0 < a0");
}

void guardCompatibility(double a0, double rho0, double g1, double g2) {
  double want = compatibility_gamma2(a0, rho0, g1);
  if (std::abs(g2 - want) > 1e-12 * std::max(1.0, std::abs(want)))
    throw CompatibilityViolated("gamma2 violates the compatibility condition");
}
}  // namespace

double SteadyResidual::supNorm() const {
  double s = std::max(std::abs(F3), std::abs(F4));
  for (double v : F1) s = std::max(s, std::abs(v));
  for (double v : F2) s = std::max(s, std::abs(v));
  return s;
}

double compatibility_gamma2(double a0, double rho0, double gamma1) {
  guardGeometry(a0, rho0);
  double a3 = a0 * a0 * a0, r3 = rho0 * rho0 * rho0;
  return gamma1 * (a3 + r3) / (a3 - r3);
}

double base_speed(double a0, double rho0, double gamma1, double gamma2) {
  guardGeometry(a0, rho0);
  return -gamma1 / (kFourPi * (a0 - rho0)) + gamma2 / kFourPi * (1.0 / a0 + 1.0 / rho0);
}

MatrixT matrix_T(double a0, double rho0, double gamma1, double gamma2) {
  guardGeometry(a0, rho0);
  guardCompatibility(a0, rho0, gamma1, gamma2);
  double m = a0 - rho0, p = a0 + rho0;
  MatrixT out;
  out.T = Mat2(-gamma1 / (kFourPi * m * m) + gamma2 / (kFourPi * a0 * a0),
               gamma1 / (kFourPi * m * m) + gamma2 / (kFourPi * rho0 * rho0),
               -gamma1 / (kFourPi * a0 * a0) + gamma2 / (kFourPi * p * p),
               gamma2 / (kFourPi * p * p) + gamma1 / (kFourPi * rho0 * rho0));
  out.detNumeric = out.T.det();
  double q = a0 * a0 + a0 * rho0 + rho0 * rho0;
  double quart = a0 * a0 * a0 * a0 - a0 * a0 * rho0 * rho0 + rho0 * rho0 * rho0 * rho0;
  out.detClosedForm = -(gamma1 * gamma1 / (16.0 * M_PI * M_PI)) * 6.0 * quart / (p * m * m * m * q * q);
  return out;
}

FirstOrderCoefficients first_order_coefficients(double a0, double rho0, double gamma1, double gamma2) {
  MatrixT mt = matrix_T(a0, rho0, gamma1, gamma2);
  FirstOrderCoefficients fc;
  fc.a_c = (mt.T.b - mt.T.d) / mt.detNumeric;
  fc.rho_c = (mt.T.c - mt.T.a) / mt.detNumeric;
  return fc;
}

namespace {

DipoleConfig makeConfig(const SteadyUnknowns& u, const SteadyParams& p, double xc) {
  DipoleConfig cfg;
  cfg.xbar = Vec2(xc, -u.a + u.rho);
  cfg.ybar = Vec2(xc, -u.a - u.rho);
  cfg.gamma1 = p.gamma1;
  cfg.gamma2 = p.gamma2;
  cfg.epsilon = p.epsilon;
  return cfg;
}

}  // namespace

SteadyResidual steady_residual(const SteadyUnknowns& u, const SteadyParams& p, const Grid& grid,
                               int order, double xc) {
  const Spectral& sp = grid.spectral();
  const int n = sp.n();
  const double eps = p.epsilon, ct = p.c_t;
  if (!(u.rho > kDeltaMin) || !(u.a - u.rho > kDeltaMin))
    throw SingularEvaluation("steady_residual: degenerate vortex geometry");
  DipoleConfig cfg = makeConfig(u, p, xc);

  Array etaUnscaled(n);
  for (int i = 0; i < n; ++i) etaUnscaled[i] = eps * u.eta_t[i];
  SurfaceState surf(grid, etaUnscaled, Array(n, 0.0));
  double depthGuard = 5.0 * sp.supNorm(etaUnscaled);
  if (u.a - u.rho < depthGuard)
    throw SingularEvaluation("steady_residual: vortex too shallow for the extension evaluation");

  Array etaPrime = sp.deriv(u.eta_t);       // eta~'
  Array etaPP = sp.deriv(u.eta_t, 2);
  Array psiPrime = sp.deriv(u.psi_t);
  Array gpsi = dno_apply(surf, u.psi_t, order);

  // Gamma traces on S = {x2 = eps eta~}
  Array gx1(n), gx2(n);
  for (int i = 0; i < n; ++i) {
    FieldSample s = gammaField(Vec2(sp.node(i), etaUnscaled[i]), cfg);
    gx1[i] = s.gradient.x;
    gx2[i] = s.gradient.y;
  }

  SteadyResidual r;
  r.F1.resize(n);
  r.F2.resize(n);
  for (int i = 0; i < n; ++i) {
    double Ep = eps * etaPrime[i];  // (eps eta~)'
    double j2 = 1.0 + Ep * Ep;
    double perpG = -Ep * gx1[i] + gx2[i];
    double topG = gx1[i] + Ep * gx2[i];
    r.F1[i] = eps * ct / j2 * (gpsi[i] + Ep * psiPrime[i])
            + eps * ct * gx2[i]
            + eps / (2.0 * j2) * (psiPrime[i] * psiPrime[i] + gpsi[i] * gpsi[i])
            + eps / j2 * (gpsi[i] * perpG + psiPrime[i] * topG)
            + 0.5 * eps * (gx1[i] * gx1[i] + gx2[i] * gx2[i])
            + p.g * u.eta_t[i]
            - p.b * etaPP[i] / std::pow(j2, 1.5);
    r.F2[i] = eps * ct * etaPrime[i] + psiPrime[i] + gx1[i] + Ep * gx2[i];
  }

  // Galerkin residual: project onto the dealiased solution band. Trace
  // forcing above the band has no unknowns to balance it; that content is
  // grid truncation error, not solver residual.
  r.F1 = sp.dealias(r.F1);
  r.F2 = sp.dealias(r.F2);

  HarmonicExtension ext(surf, u.psi_t, order);
  r.F3 = ct + ext.gradient(cfg.xbar).y - imageDriftXbar(cfg).x;
  r.F4 = ct + ext.gradient(cfg.ybar).y - imageDriftYbar(cfg).x;
  return r;
}

namespace {

// Spectral packing of the even/odd symmetry classes on the dealiased band.
struct Packing {
  const Spectral* sp;
  int cut;          // highest retained bin
  int nEta, nPsi;   // eta~: bins 0..cut, psi~: bins 1..cut
  int dim() const { return nEta + nPsi + 2; }

  explicit Packing(const Spectral& s) : sp(&s) {
    cut = s.n() / 3;
    nEta = cut + 1;
    nPsi = cut;
  }

  // even array -> real cosine coefficients (phase-corrected for x0 = -L)
  void packEven(const Array& f, double* out, int count, int k0) const {
    Spectrum c = sp->fft(f);
    for (int j = 0; j < count; ++j) {
      int k = k0 + j;
      double sign = (k % 2 == 0) ? 1.0 : -1.0;
      out[j] = c[k].real() * sign;
    }
  }
  Array unpackEven(const double* v, int count, int k0) const {
    Spectrum c(sp->bins(), Cx(0, 0));
    for (int j = 0; j < count; ++j) {
      int k = k0 + j;
      double sign = (k % 2 == 0) ? 1.0 : -1.0;
      c[k] = Cx(v[j] * sign, 0.0);
    }
    return sp->ifft(c);
  }
  void packOdd(const Array& f, double* out, int count, int k0) const {
    Spectrum c = sp->fft(f);
    for (int j = 0; j < count; ++j) {
      int k = k0 + j;
      double sign = (k % 2 == 0) ? 1.0 : -1.0;
      out[j] = c[k].imag() * sign;
    }
  }

  Eigen::VectorXd pack(const SteadyUnknowns& u) const {
    Eigen::VectorXd v(dim());
    packEven(u.eta_t, v.data(), nEta, 0);
    packEven(u.psi_t, v.data() + nEta, nPsi, 1);
    v[dim() - 2] = u.a;
    v[dim() - 1] = u.rho;
    return v;
  }
  SteadyUnknowns unpack(const Eigen::VectorXd& v) const {
    SteadyUnknowns u;
    u.eta_t = unpackEven(v.data(), nEta, 0);
    u.psi_t = unpackEven(v.data() + nEta, nPsi, 1);
    u.a = v[dim() - 2];
    u.rho = v[dim() - 1];
    return u;
  }
  Eigen::VectorXd packResidual(const SteadyResidual& r) const {
    Eigen::VectorXd v(dim());
    packEven(r.F1, v.data(), nEta, 0);
    packOdd(r.F2, v.data() + nEta, nPsi, 1);
    v[dim() - 2] = r.F3;
    v[dim() - 1] = r.F4;
    return v;
  }

  // wrong-parity content of the residual, relative to its size
  double parityDefect(const SteadyResidual& r) const {
    Spectrum c1 = sp->fft(r.F1);
    Spectrum c2 = sp->fft(r.F2);
    double bad = 0;
    for (int k = 0; k < (int)c1.size(); ++k) {
      bad = std::max(bad, std::abs(c1[k].imag()));
      bad = std::max(bad, std::abs(c2[k].real()));
    }
    return bad;
  }
};

struct NewtonResult {
  SteadyUnknowns u;
  double residualSup;
};

NewtonResult dampedNewton(const SteadyUnknowns& start, const SteadyParams& p, const Grid& grid,
                          int order, const ContinuationSchedule& sched, int threads) {
  Packing pk(grid.spectral());
  Eigen::VectorXd x = pk.pack(start);
  auto evalPacked = [&](const Eigen::VectorXd& v) {
    SteadyUnknowns u = pk.unpack(v);
    SteadyResidual r = steady_residual(u, p, grid, order);
    return std::make_pair(pk.packResidual(r), r.supNorm());
  };

  auto [F, sup] = evalPacked(x);
  for (int iter = 0; iter < sched.maxNewtonIterations; ++iter) {
    if (sup <= sched.tol) break;
    const int dim = pk.dim();
    Eigen::MatrixXd J(dim, dim);
    auto column = [&](int j) {
      double step = 1e-7 * std::max(1.0, std::abs(x[j]));
      Eigen::VectorXd xp = x;
      xp[j] += step;
      Eigen::VectorXd Fp = evalPacked(xp).first;
      J.col(j) = (Fp - F) / step;
    };
    if (threads > 1) {
      std::vector<std::future<void>> futs;
      std::atomic<int> next{0};
      for (int t = 0; t < threads; ++t)
        futs.push_back(std::async(std::launch::async, [&] {
          for (int j = next++; j < dim; j = next++) column(j);
        }));
      for (auto& f : futs) f.get();
    } else {
      for (int j = 0; j < dim; ++j) column(j);
    }

    Eigen::VectorXd dx = J.partialPivLu().solve(-F);
    double lambda = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 24; ++bt) {
      Eigen::VectorXd xTry = x + lambda * dx;
      try {
        auto [Ft, supT] = evalPacked(xTry);
        if (supT < sup || supT <= sched.tol) {
          x = xTry;
          F = Ft;
          sup = supT;
          accepted = true;
          break;
        }
      } catch (const NumericalError&) {
        // shrink into the admissible region
      }
      lambda *= 0.5;
    }
    if (!accepted)
      throw NewtonDiverged("damped Newton stalled at residual " + std::to_string(sup));
  }
  if (sup > sched.tol * 10 && sup > 1e-10)
    throw NewtonDiverged("Newton did not reach tolerance, residual " + std::to_string(sup));

  SteadyUnknowns u = pk.unpack(x);
  SteadyResidual r = steady_residual(u, p, grid, order);
  double defect = pk.parityDefect(r);
  if (defect > 1e-8 * std::max(1.0, r.supNorm()))
    throw SymmetryBroken("steady residual leaves the even/odd classes");
  return {u, r.supNorm()};
}

}  // namespace

FullState unknownsToState(const SteadyUnknowns& u, const SteadyParams& p, const Grid& grid,
                          int order, double xc) {
  const Spectral& sp = grid.spectral();
  const int n = sp.n();
  FullState st;
  st.surface = SurfaceState(grid);
  for (int i = 0; i < n; ++i) st.surface.eta[i] = p.epsilon * u.eta_t[i];
  // phi' = -G(eta) psi with psi = eps psi~
  SurfaceState tmp(grid, st.surface.eta, Array(n, 0.0));
  Array gpsi = dno_apply(tmp, u.psi_t, order);
  Array phi = sp.antideriv(gpsi);
  for (int i = 0; i < n; ++i) st.surface.phi[i] = -p.epsilon * phi[i];
  st.surface.phi = sp.zeroMean(st.surface.phi);
  st.dipole = makeConfig(u, p, xc);
  return st;
}

std::vector<TravelingWave> solve_branch(const SteadyParams& params, double a0, double rho0,
                                        const ContinuationSchedule& schedule, const Grid& grid,
                                        int order, int threads) {
  guardGeometry(a0, rho0);
  guardCompatibility(a0, rho0, params.gamma1, params.gamma2);
  const Spectral& sp = grid.spectral();
  double ct0 = base_speed(a0, rho0, params.gamma1, params.gamma2);

  SteadyUnknowns u;
  u.eta_t = Array(sp.n(), 0.0);
  u.psi_t = Array(sp.n(), 0.0);
  u.a = a0;
  u.rho = rho0;

  SteadyParams p = params;
  p.c_t = ct0;

  // continuation in epsilon from the exact trivial solution
  int mEps = std::max(1, schedule.epsilonSteps);
  double lastSup = 0;
  if (params.epsilon != 0.0) {
    double epsReached = 0.0;
    double step = params.epsilon / mEps;
    while (std::abs(epsReached - params.epsilon) > 0) {
      double target = epsReached + step;
      if (std::abs(target) > std::abs(params.epsilon)) target = params.epsilon;
      SteadyParams pt = p;
      pt.epsilon = target;
      try {
        NewtonResult res = dampedNewton(u, pt, grid, order, schedule, threads);
        u = res.u;
        lastSup = res.residualSup;
        epsReached = target;
        if (target == params.epsilon) break;
      } catch (const NewtonDiverged&) {
        step *= 0.5;
        if (std::abs(step) < 1e-6 * std::abs(params.epsilon))
          throw NewtonDiverged("epsilon continuation stalled");
      }
    }
    p.epsilon = params.epsilon;
  }

  // branch points in c~
  std::vector<TravelingWave> branch;
  SteadyUnknowns uBase = u;
  for (double off : schedule.cTildeOffsets) {
    SteadyParams pc = p;
    pc.c_t = ct0 + off;
    SteadyUnknowns uStart = uBase;
    double reached = 0.0;
    double step = off;
    if (off == 0.0 && params.epsilon == 0.0) {
      // the trivial solution is exact
    }
    if (off != 0.0 || params.epsilon != 0.0) {
      // walk in c~ with step halving
      while (true) {
        double target = (off == 0.0) ? 0.0 : reached + step;
        if (off != 0.0 && std::abs(target) > std::abs(off)) target = off;
        SteadyParams pt = p;
        pt.c_t = ct0 + target;
        try {
          NewtonResult res = dampedNewton(uStart, pt, grid, order, schedule, threads);
          uStart = res.u;
          lastSup = res.residualSup;
          reached = target;
          if (target == off) break;
        } catch (const NewtonDiverged&) {
          step *= 0.5;
          if (std::abs(step) < 1e-6 * std::max(std::abs(off), 1e-12))
            throw NewtonDiverged("c~ continuation stalled");
        }
        if (off == 0.0) break;
      }
    }
    TravelingWave w;
    w.params = pc;
    w.a0 = a0;
    w.rho0 = rho0;
    w.a = uStart.a;
    w.rho = uStart.rho;
    w.c = pc.epsilon * pc.c_t;
    w.residual_norm = lastSup;
    w.scaled = uStart;
    w.dnoOrder = order;
    w.state = unknownsToState(uStart, pc, grid, order);
    branch.push_back(std::move(w));
  }
  return branch;
}

CrosscheckResiduals steady_residual_crosscheck(const TravelingWave& wave) {
  const Grid& grid = wave.state.surface.grid;
  const Spectral& sp = grid.spectral();
  const int n = sp.n();
  const double eps = wave.params.epsilon;
  const double c = wave.c;
  const SurfaceState& surf = wave.state.surface;
  int order = wave.dnoOrder;

  Array etaPrime = sp.deriv(surf.eta);
  Array etaPP = sp.deriv(surf.eta, 2);
  Array phiPrime = sp.deriv(surf.phi);
  Array gphi = dno_apply(surf, surf.phi, order);

  // psi from phi: psi' = G phi  (zero-mean antiderivative)
  Array psi = sp.antideriv(gphi);
  Array psiPrime = sp.deriv(psi);
  SurfaceState psiSurf(grid, surf.eta, Array(n, 0.0));
  Array gpsi = dno_apply(psiSurf, psi, order);

  Array gx1(n), gx2(n);
  for (int i = 0; i < n; ++i) {
    FieldSample s = gammaField(Vec2(sp.node(i), surf.eta[i]), wave.state.dipole);
    gx1[i] = s.gradient.x;
    gx2[i] = s.gradient.y;
  }

  Array rPhiArr(n), rPsiArr(n);
  for (int i = 0; i < n; ++i) {
    double ep = etaPrime[i];
    double j2 = 1.0 + ep * ep;
    double perpG = -ep * gx1[i] + gx2[i];
    double topG = gx1[i] + ep * gx2[i];
    double grad2 = gx1[i] * gx1[i] + gx2[i] * gx2[i];
    double common = c * eps * gx2[i] + 0.5 * eps * eps * grad2
                  + wave.params.g * surf.eta[i] - wave.params.b * etaPP[i] / std::pow(j2, 1.5);
    double rPhi = -c / j2 * (phiPrime[i] - ep * gphi[i])
                + 0.5 / j2 * (phiPrime[i] * phiPrime[i] + gphi[i] * gphi[i])
                + eps / j2 * (-phiPrime[i] * perpG + gphi[i] * topG)
                + common;
    double rPsi = c / j2 * (gpsi[i] + ep * psiPrime[i])
                + 0.5 / j2 * (psiPrime[i] * psiPrime[i] + gpsi[i] * gpsi[i])
                + eps / j2 * (gpsi[i] * perpG + psiPrime[i] * topG)
                + common;
    rPhiArr[i] = rPhi;
    rPsiArr[i] = rPsi;
  }
  // compare within the Galerkin band, like the solver residual
  rPhiArr = sp.dealias(rPhiArr);
  rPsiArr = sp.dealias(rPsiArr);
  CrosscheckResiduals out;
  out.velocityPotentialForm = sp.supNorm(rPhiArr);
  out.streamFunctionForm = sp.supNorm(rPsiArr);
  return out;
}

}  // namespace dipolewave

#include "dipolewave/stability.hpp"

#include <Eigen/Dense>

#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <random>

#include "dipolewave/errors.hpp"

namespace dipolewave {

ReducedState reduce(const FullState& u) {
  ReducedState v;
  v.surface = u.surface;
  std::fill(v.surface.phi.begin(), v.surface.phi.end(), 0.0);
  v.dipole = u.dipole;
  return v;
}

namespace {

Array perpThetaTrace(const ReducedState& v, Array* thetaX1 = nullptr, Array* thetaX2 = nullptr) {
  const Spectral& sp = v.surface.grid.spectral();
  Array etaPrime = sp.deriv(v.surface.eta);
  Array out(sp.n());
  if (thetaX1) thetaX1->resize(sp.n());
  if (thetaX2) thetaX2->resize(sp.n());
  for (int i = 0; i < sp.n(); ++i) {
    FieldSample s = thetaField(Vec2(sp.node(i), v.surface.eta[i]), v.dipole);
    out[i] = -etaPrime[i] * s.gradient.x + s.gradient.y;
    if (thetaX1) (*thetaX1)[i] = s.gradient.x;
    if (thetaX2) (*thetaX2)[i] = s.gradient.y;
  }
  return out;
}

}  // namespace

Array varphi_min(const ReducedState& v, double c, int order) {
  const Spectral& sp = v.surface.grid.spectral();
  Array etaPrime = sp.deriv(v.surface.eta);
  Array perpTheta = perpThetaTrace(v);
  Array rhs(sp.n());
  const double eps = v.dipole.epsilon;
  for (int i = 0; i < sp.n(); ++i) rhs[i] = -c * etaPrime[i] - eps * perpTheta[i];
  rhs = sp.zeroMean(rhs);
  return dno_inverse(v.surface, rhs, order);
}

RelativeVelocity relative_velocity_b(const ReducedState& v, double c, int order) {
  const Spectral& sp = v.surface.grid.spectral();
  Array thetaX1, thetaX2;
  perpThetaTrace(v, &thetaX1, &thetaX2);
  SurfaceState withPhi = v.surface;
  withPhi.phi = varphi_min(v, c, order);
  VelocityTrace a = velocity_trace(withPhi, order);
  RelativeVelocity b;
  b.b1.resize(sp.n());
  b.b2.resize(sp.n());
  const double eps = v.dipole.epsilon;
  for (int i = 0; i < sp.n(); ++i) {
    b.b1[i] = a.a1[i] + eps * thetaX1[i] - c;
    b.b2[i] = a.a2[i] + eps * thetaX2[i];
  }
  return b;
}

AugmentedWorkspace::AugmentedWorkspace(const ReducedState& v, double c, int order, double g, double b)
    : v_(v), c_(c), g_(g), b_(b), order_(order) {
  const Spectral& sp = v.surface.grid.spectral();
  const int n = sp.n();
  const double eps = v.dipole.epsilon;
  etaPrime_ = sp.deriv(v.surface.eta);

  Array thetaX1, thetaX2;
  Array perpTheta = perpThetaTrace(v, &thetaX1, &thetaX2);

  Array rhs(n);
  for (int i = 0; i < n; ++i) rhs[i] = -c * etaPrime_[i] - eps * perpTheta[i];
  gPhiM_ = sp.zeroMean(rhs);
  phi_m_ = dno_inverse(v.surface, gPhiM_, order);
  phiMPrime_ = sp.deriv(phi_m_);

  a1_.resize(n);
  a2_.resize(n);
  for (int i = 0; i < n; ++i) {
    double j2 = 1.0 + etaPrime_[i] * etaPrime_[i];
    a1_[i] = (phiMPrime_[i] - etaPrime_[i] * gPhiM_[i]) / j2;
    a2_[i] = (etaPrime_[i] * phiMPrime_[i] + gPhiM_[i]) / j2;
  }
  bvel_.b1.resize(n);
  bvel_.b2.resize(n);
  for (int i = 0; i < n; ++i) {
    bvel_.b1[i] = a1_[i] + eps * thetaX1[i] - c;
    bvel_.b2[i] = a2_[i] + eps * thetaX2[i];
  }
  b2Prime_ = sp.deriv(bvel_.b2);

  xi1_.resize(n);
  xi2_.resize(n);
  zeta1_.resize(n);
  zeta2_.resize(n);
  for (int d = 0; d < 2; ++d) {
    perpXi_[d].resize(n);
    perpZeta_[d].resize(n);
    topXi_[d].resize(n);
    topZeta_[d].resize(n);
  }
  for (int i = 0; i < n; ++i) {
    Vec2 x(sp.node(i), v.surface.eta[i]);
    VectorFieldSample xi = xiField(x, v.dipole);
    VectorFieldSample ze = zetaField(x, v.dipole);
    double ep = etaPrime_[i];
    xi1_[i] = xi.value.x;
    xi2_[i] = xi.value.y;
    zeta1_[i] = ze.value.x;
    zeta2_[i] = ze.value.y;
    perpXi_[0][i] = -ep * xi.jacobian.a + xi.jacobian.b;
    perpXi_[1][i] = -ep * xi.jacobian.c + xi.jacobian.d;
    perpZeta_[0][i] = -ep * ze.jacobian.a + ze.jacobian.b;
    perpZeta_[1][i] = -ep * ze.jacobian.c + ze.jacobian.d;
    topXi_[0][i] = xi.jacobian.a + ep * xi.jacobian.b;
    topXi_[1][i] = xi.jacobian.c + ep * xi.jacobian.d;
    topZeta_[0][i] = ze.jacobian.a + ep * ze.jacobian.b;
    topZeta_[1][i] = ze.jacobian.c + ep * ze.jacobian.d;
  }
  for (int d = 0; d < 2; ++d) {
    ginvPerpXi_[d] = dno_inverse(v.surface, sp.zeroMean(perpXi_[d]), order);
    ginvPerpZeta_[d] = dno_inverse(v.surface, sp.zeroMean(perpZeta_[d]), order);
    Array dx = sp.deriv(ginvPerpXi_[d]);
    Array dz = sp.deriv(ginvPerpZeta_[d]);
    qXi_[d].resize(n);
    qZeta_[d].resize(n);
    for (int i = 0; i < n; ++i) {
      qXi_[d][i] = dx[i] - topXi_[d][i];
      qZeta_[d][i] = dz[i] - topZeta_[d][i];
    }
  }
  assembleVortexBlocks();
}

void AugmentedWorkspace::assembleVortexBlocks() {
  const Spectral& sp = v_.surface.grid.spectral();
  const int n = sp.n();
  const double eps = v_.dipole.epsilon;
  const double e2 = eps * eps;

  Array thetaX1(n), thetaX2(n), perpTheta(n), topTheta(n);
  std::vector<Mat2> d2xTheta(n), d2yTheta(n), d2xGamma(n), d2yGamma(n);
  for (int i = 0; i < n; ++i) {
    Vec2 x(sp.node(i), v_.surface.eta[i]);
    FieldSample th = thetaField(x, v_.dipole);
    CenterSecondDerivatives cd = second_center_derivatives(x, v_.dipole);
    double ep = etaPrime_[i];
    thetaX1[i] = th.gradient.x;
    thetaX2[i] = th.gradient.y;
    perpTheta[i] = -ep * th.gradient.x + th.gradient.y;
    topTheta[i] = th.gradient.x + ep * th.gradient.y;
    d2xTheta[i] = cd.d2_xbar_theta;
    d2yTheta[i] = cd.d2_ybar_theta;
    d2xGamma[i] = cd.d2_xbar_gamma;
    d2yGamma[i] = cd.d2_ybar_gamma;
  }

  auto intMat = [&](auto entry) {
    Mat2 m;
    for (int i = 0; i < n; ++i) m += entry(i);
    return m * sp.h();
  };

  const Array* xiArr[2] = {&xi1_, &xi2_};
  const Array* zeArr[2] = {&zeta1_, &zeta2_};

  // A33 = eps^2 Hess_x Gamma* - eps int(G phi_m D2x Theta + phi_m' D2x Gamma)
  //       + eps^2 int xi (.) perp xi - eps^2/2 int(perp Theta D2x Theta + top Theta D2x Gamma)
  //       - eps^2 int perp xi_i G^{-1} perp xi_j
  Mat2 m1 = intMat([&](int i) { return gPhiM_[i] * d2xTheta[i] + phiMPrime_[i] * d2xGamma[i]; });
  Mat2 m2 = intMat([&](int i) {
    Mat2 s;
    for (int r = 0; r < 2; ++r)
      for (int cidx = 0; cidx < 2; ++cidx) {
        double val = 0.5 * ((*xiArr[r])[i] * perpXi_[cidx][i] + (*xiArr[cidx])[i] * perpXi_[r][i]);
        (r == 0 ? (cidx == 0 ? s.a : s.b) : (cidx == 0 ? s.c : s.d)) = val;
      }
    return s;
  });
  Mat2 m3 = intMat([&](int i) { return perpTheta[i] * d2xTheta[i] + topTheta[i] * d2xGamma[i]; });
  Mat2 m4;
  for (int r = 0; r < 2; ++r)
    for (int cidx = 0; cidx < 2; ++cidx) {
      double val = sp.inner(perpXi_[r], ginvPerpXi_[cidx]);
      (r == 0 ? (cidx == 0 ? m4.a : m4.b) : (cidx == 0 ? m4.c : m4.d)) = val;
    }
  A33_ = e2 * hessGammaStarXbar(v_.dipole) - eps * m1 + e2 * m2 - 0.5 * e2 * m3 - e2 * m4;

  Mat2 y1 = intMat([&](int i) { return gPhiM_[i] * d2yTheta[i] + phiMPrime_[i] * d2yGamma[i]; });
  Mat2 y2 = intMat([&](int i) {
    Mat2 s;
    for (int r = 0; r < 2; ++r)
      for (int cidx = 0; cidx < 2; ++cidx) {
        double val = 0.5 * ((*zeArr[r])[i] * perpZeta_[cidx][i] + (*zeArr[cidx])[i] * perpZeta_[r][i]);
        (r == 0 ? (cidx == 0 ? s.a : s.b) : (cidx == 0 ? s.c : s.d)) = val;
      }
    return s;
  });
  Mat2 y3 = intMat([&](int i) { return perpTheta[i] * d2yTheta[i] + topTheta[i] * d2yGamma[i]; });
  Mat2 y4;
  for (int r = 0; r < 2; ++r)
    for (int cidx = 0; cidx < 2; ++cidx) {
      double val = sp.inner(perpZeta_[r], ginvPerpZeta_[cidx]);
      (r == 0 ? (cidx == 0 ? y4.a : y4.b) : (cidx == 0 ? y4.c : y4.d)) = val;
    }
  A44_ = e2 * hessGammaStarYbar(v_.dipole) - eps * y1 + e2 * y2 - 0.5 * e2 * y3 - e2 * y4;

  // A34_ij = eps^2 [HessCross Gamma*]_ij + eps^2/2 int(xi_i perp zeta_j + zeta_j perp xi_i)
  //          - eps^2 int perp xi_i G^{-1} perp zeta_j
  Mat2 c2 = intMat([&](int i) {
    Mat2 s;
    for (int r = 0; r < 2; ++r)
      for (int cidx = 0; cidx < 2; ++cidx) {
        double val = 0.5 * ((*xiArr[r])[i] * perpZeta_[cidx][i] + (*zeArr[cidx])[i] * perpXi_[r][i]);
        (r == 0 ? (cidx == 0 ? s.a : s.b) : (cidx == 0 ? s.c : s.d)) = val;
      }
    return s;
  });
  Mat2 c4;
  for (int r = 0; r < 2; ++r)
    for (int cidx = 0; cidx < 2; ++cidx) {
      double val = sp.inner(perpXi_[r], ginvPerpZeta_[cidx]);
      (r == 0 ? (cidx == 0 ? c4.a : c4.b) : (cidx == 0 ? c4.c : c4.d)) = val;
    }
  A34_ = e2 * hessGammaStarCross(v_.dipole) + e2 * c2 - e2 * c4;
}

Array AugmentedWorkspace::operatorL(const ReducedIncrement& vdot) const {
  const Spectral& sp = v_.surface.grid.spectral();
  const int n = sp.n();
  const double eps = v_.dipole.epsilon;
  Array a2eta(n), b1eta(n);
  for (int i = 0; i < n; ++i) {
    a2eta[i] = a2_[i] * vdot.d_eta[i];
    b1eta[i] = bvel_.b1[i] * vdot.d_eta[i];
  }
  Array out = dno_apply(v_.surface, sp.zeroMean(a2eta), order_);
  Array der = sp.deriv(b1eta);
  for (int i = 0; i < n; ++i) {
    out[i] += der[i]
            + eps * (perpXi_[0][i] * vdot.d_xbar.x + perpXi_[1][i] * vdot.d_xbar.y)
            + eps * (perpZeta_[0][i] * vdot.d_ybar.x + perpZeta_[1][i] * vdot.d_ybar.y);
  }
  return sp.zeroMean(out);
}

ReducedIncrement AugmentedWorkspace::operatorA(const ReducedIncrement& vdot) const {
  const Spectral& sp = v_.surface.grid.spectral();
  const int n = sp.n();
  const double eps = v_.dipole.epsilon;

  // M etadot = -b1 (G^{-1}(b1 etadot)')'
  Array b1eta(n);
  for (int i = 0; i < n; ++i) b1eta[i] = bvel_.b1[i] * vdot.d_eta[i];
  Array inv = dno_inverse(v_.surface, sp.zeroMean(sp.deriv(b1eta)), order_);
  Array invPrime = sp.deriv(inv);
  Array Meta(n);
  for (int i = 0; i < n; ++i) Meta[i] = -bvel_.b1[i] * invPrime[i];

  Array etadotPrime = sp.deriv(vdot.d_eta);
  Array tens(n);
  for (int i = 0; i < n; ++i) {
    double j = std::sqrt(1.0 + etaPrime_[i] * etaPrime_[i]);
    tens[i] = b_ / (j * j * j) * etadotPrime[i];
  }
  Array tensPrime = sp.deriv(tens);

  ReducedIncrement out;
  out.d_eta.resize(n);
  for (int i = 0; i < n; ++i) {
    out.d_eta[i] = (g_ + b2Prime_[i] * bvel_.b1[i]) * vdot.d_eta[i] - tensPrime[i] - Meta[i]
                 + eps * bvel_.b1[i] * (qXi_[0][i] * vdot.d_xbar.x + qXi_[1][i] * vdot.d_xbar.y)
                 + eps * bvel_.b1[i] * (qZeta_[0][i] * vdot.d_ybar.x + qZeta_[1][i] * vdot.d_ybar.y);
  }

  Array b1weighted(n);
  for (int i = 0; i < n; ++i) b1weighted[i] = bvel_.b1[i] * vdot.d_eta[i];
  Vec2 cx(eps * sp.inner(b1weighted, qXi_[0]), eps * sp.inner(b1weighted, qXi_[1]));
  Vec2 cy(eps * sp.inner(b1weighted, qZeta_[0]), eps * sp.inner(b1weighted, qZeta_[1]));
  out.d_xbar = cx + A33_.apply(vdot.d_xbar) + A34_.apply(vdot.d_ybar);
  out.d_ybar = cy + A34_.transpose().apply(vdot.d_xbar) + A44_.apply(vdot.d_ybar);
  return out;
}

CotangentVector AugmentedWorkspace::hessian(const StateIncrement& udot) const {
  const Spectral& sp = v_.surface.grid.spectral();
  const int n = sp.n();
  const double eps = v_.dipole.epsilon;
  ReducedIncrement vdot{udot.d_eta, udot.d_xbar, udot.d_ybar};

  Array Lv = operatorL(vdot);
  Array phidot = sp.zeroMean(udot.d_phi);
  Array gPhiDot = dno_apply(v_.surface, phidot, order_);
  Array w = dno_inverse(v_.surface, Lv, order_);
  for (int i = 0; i < n; ++i) w[i] -= phidot[i];
  Array Gw(n);
  for (int i = 0; i < n; ++i) Gw[i] = Lv[i] - gPhiDot[i];

  ReducedIncrement Av = operatorA(vdot);
  Array wPrime = sp.deriv(w);

  CotangentVector out;
  out.d_eta.resize(n);
  out.d_phi.resize(n);
  for (int i = 0; i < n; ++i) {
    out.d_eta[i] = Av.d_eta[i] + a2_[i] * Gw[i] - bvel_.b1[i] * wPrime[i];
    out.d_phi[i] = -Gw[i];
  }
  out.d_phi = sp.zeroMean(out.d_phi);
  out.d_xbar = Av.d_xbar + eps * Vec2(sp.inner(perpXi_[0], w), sp.inner(perpXi_[1], w));
  out.d_ybar = Av.d_ybar + eps * Vec2(sp.inner(perpZeta_[0], w), sp.inner(perpZeta_[1], w));
  return out;
}

MatrixASmall matrix_A_small(double a, double rho, double gamma1, double gamma2, double epsilon) {
  if (!(rho > 0) || !(rho < a)) throw DegenerateGeometry("matrix_A_small: require 0 < rho < a");
  MatrixASmall m{};
  double g12 = gamma1 * gamma2;
  m.alpha = 0.5 * g12 * (1.0 / (rho * rho) - 1.0 / (a * a));
  m.beta = 0.5 * g12 * (1.0 / (rho * rho) + 1.0 / (a * a));
  m.delta1 = gamma1 * gamma1 / ((a - rho) * (a - rho));
  m.delta2 = gamma2 * gamma2 / ((a + rho) * (a + rho));
  double pref = epsilon * epsilon / (4.0 * M_PI);
  double al = m.alpha, be = m.beta, d1 = m.delta1, d2 = m.delta2;
  double M0[4][4] = {{-al, 0, al, 0}, {0, d1 + al, 0, -be}, {al, 0, -al, 0}, {0, -be, 0, d2 + al}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m.matrix[i][j] = pref * M0[i][j];
  double disc = std::sqrt((d1 - d2) * (d1 - d2) + 4.0 * be * be);
  m.closedFormEigenvalues = {0.0, -2.0 * al, 0.5 * (2 * al + d1 + d2 + disc), 0.5 * (2 * al + d1 + d2 - disc)};
  m.certificateLhs = al * al + al * d1 + al * d2 + d1 * d2 - be * be;
  double q = a * a + a * rho + rho * rho;
  m.certificatePrinted = 2.0 * (a + rho) * std::pow(gamma1, 4) / ((a - rho) * q * q);
  double qm = a * a - a * rho + rho * rho;
  double quart = std::pow(a, 4) - a * a * rho * rho + std::pow(rho, 4);
  m.certificateClosedForm = 3.0 * std::pow(gamma1, 4) * qm * quart / (std::pow(a - rho, 4) * q * q * q);
  return m;
}

namespace {

struct HessianBasis {
  const Spectral* sp;
  int nEta, nPhi;
  double L;
  int dim() const { return nEta + nPhi + 4; }

  explicit HessianBasis(const Spectral& s) : sp(&s), L(s.L()) {
    nEta = s.n() - 1;  // k=0 plus cos/sin for k=1..n/2-1
    nPhi = s.n() - 2;  // cos/sin for k=1..n/2-1
  }

  // mode index -> (k, isSin); j=0 is the constant
  void etaMode(int j, int& k, bool& isSin) const {
    if (j == 0) { k = 0; isSin = false; return; }
    k = (j + 1) / 2;
    isSin = (j % 2 == 0);
  }
  void phiMode(int j, int& k, bool& isSin) const {
    k = j / 2 + 1;
    isSin = (j % 2 == 1);
  }

  Array modeArray(int k, bool isSin) const {
    Array f(sp->n());
    double norm = (k == 0) ? 1.0 / std::sqrt(2.0 * L) : 1.0 / std::sqrt(L);
    for (int i = 0; i < sp->n(); ++i) {
      double ph = sp->wavenumber(k) * (sp->node(i) + L);
      f[i] = norm * (isSin ? std::sin(ph) : std::cos(ph));
    }
    return f;
  }

  // pairings of an L^2 density with all basis modes of one field, via one fft
  void project(const Array& density, bool isPhi, double* out) const {
    Spectrum c = sp->fft(density);
    int count = isPhi ? nPhi : nEta;
    for (int j = 0; j < count; ++j) {
      int k;
      bool isSin;
      if (isPhi) phiMode(j, k, isSin); else etaMode(j, k, isSin);
      double norm = (k == 0) ? std::sqrt(2.0 * L) : std::sqrt(L);
      // int density * cos(k(x+L)) dx = 2L Re c_k ; sin: -2L Im c_k
      double val = isSin ? -2.0 * L * c[k].imag() : 2.0 * L * c[k].real();
      out[j] = val / norm;
    }
  }

  double iWeight(int j, bool isPhi) const {
    int k;
    bool isSin;
    if (isPhi) phiMode(j, k, isSin); else etaMode(j, k, isSin);
    double kk = sp->wavenumber(k);
    return isPhi ? kk : 1.0 + kk * kk;
  }
};

}  // namespace

SpectrumReport spectrum_report(const TravelingWave& wave, double zero_tol, int threads) {
  const Grid& grid = wave.state.surface.grid;
  const Spectral& sp = grid.spectral();
  const int n = sp.n();
  ReducedState v = reduce(wave.state);
  AugmentedWorkspace ws(v, wave.c, wave.dnoOrder, wave.params.g, wave.params.b);
  HessianBasis basis(sp);
  const int dim = basis.dim();

  Eigen::MatrixXd M(dim, dim);
  auto assembleColumn = [&](int j) {
    StateIncrement udot;
    udot.d_eta.assign(n, 0.0);
    udot.d_phi.assign(n, 0.0);
    if (j < basis.nEta) {
      int k; bool isSin;
      basis.etaMode(j, k, isSin);
      udot.d_eta = basis.modeArray(k, isSin);
    } else if (j < basis.nEta + basis.nPhi) {
      int k; bool isSin;
      basis.phiMode(j - basis.nEta, k, isSin);
      udot.d_phi = basis.modeArray(k, isSin);
    } else {
      int c = j - basis.nEta - basis.nPhi;
      if (c == 0) udot.d_xbar = Vec2(1, 0);
      if (c == 1) udot.d_xbar = Vec2(0, 1);
      if (c == 2) udot.d_ybar = Vec2(1, 0);
      if (c == 3) udot.d_ybar = Vec2(0, 1);
    }
    CotangentVector h = ws.hessian(udot);
    std::vector<double> col(dim);
    basis.project(h.d_eta, false, col.data());
    basis.project(h.d_phi, true, col.data() + basis.nEta);
    col[dim - 4] = h.d_xbar.x;
    col[dim - 3] = h.d_xbar.y;
    col[dim - 2] = h.d_ybar.x;
    col[dim - 1] = h.d_ybar.y;
    for (int i = 0; i < dim; ++i) M(i, j) = col[i];
  };
  if (threads > 1) {
    std::atomic<int> next{0};
    std::vector<std::future<void>> futs;
    for (int t = 0; t < threads; ++t)
      futs.push_back(std::async(std::launch::async, [&] {
        for (int j = next++; j < dim; j = next++) assembleColumn(j);
      }));
    for (auto& f : futs) f.get();
  } else {
    for (int j = 0; j < dim; ++j) assembleColumn(j);
  }

  Eigen::MatrixXd Msym = 0.5 * (M + M.transpose());
  Eigen::VectorXd iw(dim);
  for (int j = 0; j < basis.nEta; ++j) iw[j] = basis.iWeight(j, false);
  for (int j = 0; j < basis.nPhi; ++j) iw[basis.nEta + j] = basis.iWeight(j, true);
  for (int j = dim - 4; j < dim; ++j) iw[j] = 1.0;
  Eigen::MatrixXd I = iw.asDiagonal();

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Msym, I);
  Eigen::VectorXd ev = ges.eigenvalues();
  Eigen::MatrixXd evec = ges.eigenvectors();

  SpectrumReport rep;
  rep.dimension = dim;
  rep.eigenvalues.assign(ev.data(), ev.data() + dim);
  double maxAbs = std::max(std::abs(ev[0]), std::abs(ev[dim - 1]));
  rep.zero_tol = (zero_tol > 0) ? zero_tol : 1e-6 * maxAbs;

  // translation direction coefficients
  Eigen::VectorXd tvec(dim);
  {
    Array etaP = sp.deriv(wave.state.surface.eta);
    Array phiP = sp.deriv(wave.state.surface.phi);
    for (double& x : etaP) x = -x;
    for (double& x : phiP) x = -x;
    // tangent expansion coefficients equal L^2 pairings for an orthonormal basis
    basis.project(etaP, false, tvec.data());
    basis.project(phiP, true, tvec.data() + basis.nEta);
    tvec[dim - 4] = 1.0;
    tvec[dim - 3] = 0.0;
    tvec[dim - 2] = 1.0;
    tvec[dim - 1] = 0.0;
  }
  double tNorm = std::sqrt(tvec.dot(iw.asDiagonal() * tvec));
  int translationIdx = -1;
  double bestCorr = 0;
  for (int j = 0; j < dim; ++j) {
    double corr = std::abs(evec.col(j).dot(iw.asDiagonal() * tvec)) / tNorm;
    if (corr > bestCorr) {
      bestCorr = corr;
      translationIdx = j;
    }
  }
  rep.translation_correlation = bestCorr;

  int negatives = 0, nearZeros = 0;
  double minPositive = std::numeric_limits<double>::infinity();
  int mostNegativeIdx = -1;
  for (int j = 0; j < dim; ++j) {
    double lam = ev[j];
    if (std::abs(lam) <= rep.zero_tol) {
      ++nearZeros;
    } else if (lam < 0) {
      ++negatives;
      if (mostNegativeIdx < 0 || lam < ev[mostNegativeIdx]) mostNegativeIdx = j;
    } else {
      minPositive = std::min(minPositive, lam);
    }
    if (j != translationIdx && std::abs(lam) <= 10.0 * rep.zero_tol && std::abs(lam) > rep.zero_tol)
      throw AmbiguousSignature("eigenvalue " + std::to_string(lam) + " within 10*zero_tol of 0");
  }
  rep.negatives = negatives;
  rep.near_zeros = nearZeros;
  rep.min_positive = std::isfinite(minPositive) ? minPositive : 0.0;
  if (negatives == 1 && mostNegativeIdx >= 0) rep.mu_c_sq = -ev[mostNegativeIdx];

  if (mostNegativeIdx >= 0) {
    Eigen::VectorXd chi = evec.col(mostNegativeIdx);
    StateIncrement c;
    c.d_eta.assign(n, 0.0);
    c.d_phi.assign(n, 0.0);
    for (int j = 0; j < basis.nEta; ++j) {
      int k; bool isSin;
      basis.etaMode(j, k, isSin);
      Array m = basis.modeArray(k, isSin);
      for (int i = 0; i < n; ++i) c.d_eta[i] += chi[j] * m[i];
    }
    for (int j = 0; j < basis.nPhi; ++j) {
      int k; bool isSin;
      basis.phiMode(j, k, isSin);
      Array m = basis.modeArray(k, isSin);
      for (int i = 0; i < n; ++i) c.d_phi[i] += chi[basis.nEta + j] * m[i];
    }
    c.d_xbar = Vec2(chi[dim - 4], chi[dim - 3]);
    c.d_ybar = Vec2(chi[dim - 2], chi[dim - 1]);
    rep.chi_c = c;
  }
  return rep;
}

BranchDiagnostics moment_of_instability(const std::vector<TravelingWave>& branch) {
  const int m = (int)branch.size();
  if (m < 5) throw BranchTooShort("moment_of_instability needs >= 5 branch points");
  BranchDiagnostics d;
  for (const auto& w : branch) {
    d.c_values.push_back(w.c);
    double E = energy(w.state, w.dnoOrder);
    double P = momentum(w.state);
    d.E_values.push_back(E);
    d.P_values.push_back(P);
    d.d_values.push_back(E - w.c * P);
  }
  double dc = d.c_values[1] - d.c_values[0];
  for (int i = 1; i + 1 < m; ++i) {
    double step = d.c_values[i + 1] - d.c_values[i];
    if (std::abs(step - dc) > 1e-10 * std::max(1.0, std::abs(dc)))
      throw BranchTooShort("branch points must be equispaced in c");
  }

  for (int i = 2; i + 2 < m; ++i) {
    double dp = (d.d_values[i - 2] - 8 * d.d_values[i - 1] + 8 * d.d_values[i + 1] - d.d_values[i + 2]) / (12 * dc);
    d.dprime_max_error = std::max(d.dprime_max_error, std::abs(dp + d.P_values[i]));
  }
  int mid = m / 2;
  if (mid < 2) mid = 2;
  if (mid + 2 >= m) mid = m - 3;
  d.dpp_fd = (-d.d_values[mid - 2] + 16 * d.d_values[mid - 1] - 30 * d.d_values[mid]
              + 16 * d.d_values[mid + 1] - d.d_values[mid + 2]) / (12 * dc * dc);

  const TravelingWave& w0 = branch[mid];
  double a0 = w0.a0 > 0 ? w0.a0 : w0.a;
  double rho0 = w0.rho0 > 0 ? w0.rho0 : w0.rho;
  double g1 = w0.params.gamma1, g2 = w0.params.gamma2;
  MatrixT mt = matrix_T(a0, rho0, g1, g2);
  double q = a0 * a0 + a0 * rho0 + rho0 * rho0;
  d.dpp_closed_form = g1 * g1 / (2.0 * M_PI * mt.detNumeric) * 6.0 * a0 * rho0 * rho0
                      / ((a0 + rho0) * (a0 - rho0) * (a0 - rho0) * q);
  FirstOrderCoefficients fc = first_order_coefficients(a0, rho0, g1, g2);
  d.dpp_closed_tmatrix = -g1 * (fc.a_c - fc.rho_c) + g2 * (fc.a_c + fc.rho_c);
  return d;
}

double orbital_distance(const FullState& U, const FullState& u, double s0) {
  const Grid& grid = U.surface.grid;
  double w = std::max(1.0, grid.L / 16.0);
  double lo = s0 - w, hi = s0 + w;
  auto f = [&](double s) {
    return incrementNormX(grid, stateDifference(translate(U, s), u));
  };
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - gr * (hi - lo), dpt = lo + gr * (hi - lo);
  double fc = f(c), fd = f(dpt);
  for (int it = 0; it < 80 && (hi - lo) > 1e-12 * std::max(1.0, std::abs(s0)); ++it) {
    if (fc < fd) {
      hi = dpt;
      dpt = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = dpt;
      fc = fd;
      dpt = lo + gr * (hi - lo);
      fd = f(dpt);
    }
  }
  return std::min(fc, fd);
}

namespace {
FullState addIncrement(const FullState& u, double a, const StateIncrement& v) {
  FullState w = u;
  for (int i = 0; i < (int)w.surface.eta.size(); ++i) {
    w.surface.eta[i] += a * v.d_eta[i];
    w.surface.phi[i] += a * v.d_phi[i];
  }
  w.dipole.xbar += a * v.d_xbar;
  w.dipole.ybar += a * v.d_ybar;
  w.surface.phi = w.surface.grid.spectral().zeroMean(w.surface.phi);
  return w;
}
}  // namespace

GrowthReport instability_experiment(const TravelingWave& wave, const SpectrumReport& spectrum,
                                    PerturbationDirection direction, double amplitude, double T,
                                    double dt, unsigned seed) {
  const Grid& grid = wave.state.surface.grid;
  const Spectral& sp = grid.spectral();
  const int n = sp.n();

  StateIncrement dir;
  dir.d_eta.assign(n, 0.0);
  dir.d_phi.assign(n, 0.0);
  switch (direction) {
    case PerturbationDirection::ChiC:
      dir = spectrum.chi_c;
      break;
    case PerturbationDirection::Transverse: {
      Array etaP = sp.deriv(wave.state.surface.eta);
      Array phiP = sp.deriv(wave.state.surface.phi);
      for (double& x : etaP) x = -x;
      for (double& x : phiP) x = -x;
      dir.d_eta = etaP;
      dir.d_phi = phiP;
      dir.d_xbar = Vec2(1, 0);
      dir.d_ybar = Vec2(1, 0);
      break;
    }
    case PerturbationDirection::Random: {
      std::mt19937_64 rng(seed);
      std::normal_distribution<double> gauss(0.0, 1.0);
      int kMax = std::max(4, sp.n() / 12);
      Spectrum ce(sp.bins(), Cx(0, 0)), cp(sp.bins(), Cx(0, 0));
      for (int k = 1; k <= kMax; ++k) {
        double decay = std::exp(-3.0 * k / double(kMax));
        ce[k] = Cx(gauss(rng), gauss(rng)) * decay;
        cp[k] = Cx(gauss(rng), gauss(rng)) * decay;
      }
      dir.d_eta = sp.ifft(ce);
      dir.d_phi = sp.zeroMean(sp.ifft(cp));
      dir.d_xbar = Vec2(gauss(rng), gauss(rng));
      dir.d_ybar = Vec2(gauss(rng), gauss(rng));
      break;
    }
  }
  double nrm = incrementNormX(grid, dir);
  if (nrm == 0) throw ConfigError("instability_experiment: zero perturbation direction");
  for (double& x : dir.d_eta) x /= nrm;
  for (double& x : dir.d_phi) x /= nrm;
  dir.d_xbar = dir.d_xbar / nrm;
  dir.d_ybar = dir.d_ybar / nrm;

  FullState u = addIncrement(wave.state, amplitude, dir);

  GrowthReport rep;
  rep.amplitude = amplitude;
  double sBest = 0.0;
  double d0 = orbital_distance(wave.state, u, sBest);
  rep.times.push_back(0.0);
  rep.orbitalDistance.push_back(d0);

  const int chunkSteps = 20;
  double t = 0.0;
  EvolveOptions opts;
  opts.dt = dt;
  opts.T = chunkSteps * dt;
  opts.order = wave.dnoOrder;
  double cross2 = -1;
  while (t < T) {
    Trajectory chunk = evolve(u, opts);
    u = chunk.final;
    if (chunk.breach) {
      rep.breached = true;
      t += chunk.breach->time;
      rep.times.push_back(t);
      rep.orbitalDistance.push_back(orbital_distance(wave.state, u, sBest + wave.c * t));
      break;
    }
    t += opts.T;
    double s0 = sBest + wave.c * chunkSteps * dt;
    double dist = orbital_distance(wave.state, u, s0);
    sBest = s0;
    rep.times.push_back(t);
    rep.orbitalDistance.push_back(dist);
    if (amplitude > 0) {
      if (cross2 < 0 && dist >= 2 * amplitude) cross2 = t;
      if (rep.crossTime10x < 0 && dist >= 10 * amplitude) {
        rep.crossTime10x = t;
        break;
      }
    }
  }
  double dmax = 0;
  for (double v : rep.orbitalDistance) dmax = std::max(dmax, v);
  rep.growthFactor = amplitude > 0 ? dmax / amplitude : dmax;
  if (cross2 > 0 && rep.crossTime10x > cross2)
    rep.efoldTime = (rep.crossTime10x - cross2) / std::log(5.0);
  return rep;
}

}  // namespace dipolewave

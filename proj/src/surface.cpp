#include "dipolewave/surface.hpp"

#include <cmath>

#include "dipolewave/errors.hpp"

namespace dipolewave {

Grid::Grid(int N, double L) : N(N), L(L), sp(std::make_shared<Spectral>(N, L)) {
  if (N < 64) throw ConfigError("Grid: N must be >= 64");
}

SurfaceState::SurfaceState(Grid g, Array e, Array p) : grid(g), eta(std::move(e)), phi(std::move(p)) {
  if ((int)eta.size() != grid.N || (int)phi.size() != grid.N)
    throw ConfigError("SurfaceState: array sizes must match the grid");
}

void SurfaceState::validate(double decayTol) const {
  const Spectral& sp = grid.spectral();
  double m = std::abs(sp.mean(phi));
  double scale = sp.supNorm(phi);
  if (scale > 0 && m > 1e-12 * scale) throw NonZeroMean("SurfaceState: phi must have zero mean");
  double etaMax = sp.supNorm(eta);
  if (etaMax > 0) {
    double ends = std::max(std::abs(eta.front()), std::abs(eta[grid.N - 1]));
    if (ends > decayTol * etaMax)
      throw ConfigError("SurfaceState: eta does not decay at the domain ends");
  }
}

namespace {

void requireZeroMean(const Spectral& sp, const Array& f, const char* who) {
  double m = std::abs(sp.mean(f));
  double scale = sp.l2Norm(f);
  if (scale > 0 && m > 1e-12 * std::max(1.0, scale)) throw NonZeroMean(std::string(who) + ": input must have zero mean");
}

// Powers eta^m / m!, dealiased, computed once.
std::vector<Array> etaPowers(const Spectral& sp, const Array& eta, int order) {
  std::vector<Array> pw(order + 1);
  pw[0] = Array(sp.n(), 1.0);
  if (order >= 1) pw[1] = sp.dealias(eta);
  for (int m = 2; m <= order; ++m) {
    Array p(sp.n());
    for (int i = 0; i < sp.n(); ++i) p[i] = pw[m - 1][i] * pw[1][i] / m;
    pw[m] = sp.dealias(p);
  }
  return pw;
}

}  // namespace

Array dno_apply(const SurfaceState& state, const Array& f, int order) {
  const Spectral& sp = state.grid.spectral();
  if (order < 0) throw ConfigError("dno_apply: order must be >= 0");
  requireZeroMean(sp, f, "dno_apply");
  Array etaPrime = sp.deriv(state.eta);
  if (sp.supNorm(etaPrime) >= 0.5)
    throw ExpansionDiverged("dno_apply: ||eta'||_inf exceeds the expansion guard 0.5");

  auto pw = etaPowers(sp, state.eta, order);
  Array f0 = sp.dealias(sp.zeroMean(f));
  Array df = sp.deriv(f0);

  // Homogeneous terms u_n = G_n(eta) f via the recursion
  //   u_0 = |D| f,
  //   u_n = -d1 |D|^{n-1} [(eta^n/n!) f'] - sum_{j<n} |D|^{n-j} [(eta^{n-j}/(n-j)!) u_j],
  // the transpose of the Taylor recursion about G(0) = |D| (the terms are
  // symmetric, so both forms define the same truncation).
  std::vector<Array> u(order + 1);
  u[0] = sp.absD(f0, 1.0);
  Array result = u[0];
  double prev = sp.l2Norm(result);
  double scale = std::max(prev, 1e-300);
  for (int n = 1; n <= order; ++n) {
    Array t = sp.prod(pw[n], df);
    t = sp.absD(t, double(n - 1));
    t = sp.deriv(t);
    for (double& v : t) v = -v;
    for (int j = 0; j < n; ++j) {
      Array inner = sp.prod(pw[n - j], u[j]);
      inner = sp.absD(inner, double(n - j));
      for (int i = 0; i < sp.n(); ++i) t[i] -= inner[i];
    }
    u[n] = t;
    double tn = sp.l2Norm(t);
    if (n >= 2 && tn > 2.0 * prev && tn > 1e-9 * scale)
      throw ExpansionDiverged("dno_apply: expansion terms no longer decrease");
    for (int i = 0; i < sp.n(); ++i) result[i] += t[i];
    prev = std::max(tn, 1e-300);
  }
  return sp.zeroMean(result);
}

Array dno_inverse(const SurfaceState& state, const Array& g, int order, double tol, int maxIter) {
  const Spectral& sp = state.grid.spectral();
  requireZeroMean(sp, g, "dno_inverse");
  Array b = sp.zeroMean(g);
  double bNorm = sp.l2Norm(b);
  if (bNorm == 0) return Array(sp.n(), 0.0);

  // PCG for the SPD operator G(eta) with preconditioner |D|^{-1}.
  Array x(sp.n(), 0.0);
  Array r = b;
  Array z = sp.absD(r, -1.0);
  Array p = z;
  double rz = sp.inner(r, z);
  for (int it = 0; it < maxIter; ++it) {
    Array Ap = dno_apply(state, p, order);
    double pAp = sp.inner(p, Ap);
    if (!(pAp > 0)) throw NoConvergence("dno_inverse: lost positivity in CG");
    double alpha = rz / pAp;
    for (int i = 0; i < sp.n(); ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    if (sp.l2Norm(r) <= tol * bNorm) return sp.zeroMean(x);
    z = sp.absD(r, -1.0);
    double rzNew = sp.inner(r, z);
    double beta = rzNew / rz;
    rz = rzNew;
    for (int i = 0; i < sp.n(); ++i) p[i] = z[i] + beta * p[i];
  }
  throw NoConvergence("dno_inverse: CG did not reach tolerance");
}

SurfaceDerivatives surface_derivatives(const SurfaceState& state, const PlanarField& F) {
  const Spectral& sp = state.grid.spectral();
  Array etaPrime = sp.deriv(state.eta);
  SurfaceDerivatives d;
  d.perp.resize(sp.n());
  d.top.resize(sp.n());
  for (int i = 0; i < sp.n(); ++i) {
    Vec2 x(sp.node(i), state.eta[i]);
    FieldSample s = F(x);
    d.perp[i] = -etaPrime[i] * s.gradient.x + s.gradient.y;
    d.top[i] = s.gradient.x + etaPrime[i] * s.gradient.y;
  }
  return d;
}

Array curvature(const Grid& grid, const Array& eta) {
  const Spectral& sp = grid.spectral();
  Array ep = sp.deriv(eta);
  Array epp = sp.deriv(eta, 2);
  Array k(sp.n());
  for (int i = 0; i < sp.n(); ++i) {
    double j = std::sqrt(1.0 + ep[i] * ep[i]);
    k[i] = -epp[i] / (j * j * j);
  }
  return k;
}

VelocityTrace velocity_trace(const SurfaceState& state, int order) {
  const Spectral& sp = state.grid.spectral();
  Array gphi = dno_apply(state, state.phi, order);
  Array phiPrime = sp.deriv(state.phi);
  Array etaPrime = sp.deriv(state.eta);
  VelocityTrace v;
  v.a1.resize(sp.n());
  v.a2.resize(sp.n());
  for (int i = 0; i < sp.n(); ++i) {
    double j2 = 1.0 + etaPrime[i] * etaPrime[i];
    v.a1[i] = (phiPrime[i] - etaPrime[i] * gphi[i]) / j2;
    v.a2[i] = (etaPrime[i] * phiPrime[i] + gphi[i]) / j2;
  }
  return v;
}

HarmonicExtension::HarmonicExtension(const SurfaceState& state, const Array& trace, int order) {
  const Spectral& sp = state.grid.spectral();
  sp_ = &sp;
  requireZeroMean(sp, trace, "HarmonicExtension");
  auto pw = etaPowers(sp, state.eta, order);
  // Invert f = sum_{m=0..M} (eta^m/m!) |D|^m a order by order:
  // a = sum a_n with a_0 = f, a_n = -sum_{m=1..n} (eta^m/m!) |D|^m a_{n-m}.
  std::vector<Array> terms(order + 1);
  terms[0] = sp.dealias(sp.zeroMean(trace));
  Array a = terms[0];
  for (int n = 1; n <= order; ++n) {
    Array acc(sp.n(), 0.0);
    for (int m = 1; m <= n; ++m) {
      Array t = sp.absD(terms[n - m], double(m));
      t = sp.prod(pw[m], t);
      for (int i = 0; i < sp.n(); ++i) acc[i] -= t[i];
    }
    terms[n] = acc;
    for (int i = 0; i < sp.n(); ++i) a[i] += acc[i];
  }
  coeff_ = sp.fft(a);
  sp.dealiasInPlace(coeff_);
}

double HarmonicExtension::value(Vec2 x) const {
  const Spectral& sp = *sp_;
  double xp = x.x + sp.L();
  double v = 0.0;
  for (int k = 1; k < sp.bins(); ++k) {
    double kk = sp.wavenumber(k);
    double w = (k == sp.n() / 2) ? 1.0 : 2.0;
    Cx e = std::exp(Cx(0.0, kk * xp)) * std::exp(kk * x.y);
    v += w * (coeff_[k] * e).real();
  }
  return v;
}

Vec2 HarmonicExtension::gradient(Vec2 x) const {
  const Spectral& sp = *sp_;
  double xp = x.x + sp.L();
  Vec2 g;
  for (int k = 1; k < sp.bins(); ++k) {
    double kk = sp.wavenumber(k);
    double w = (k == sp.n() / 2) ? 1.0 : 2.0;
    Cx e = std::exp(Cx(0.0, kk * xp)) * std::exp(kk * x.y);
    Cx ck = coeff_[k];
    g.x += w * (ck * e * Cx(0.0, kk)).real();
    g.y += w * (ck * e * kk).real();
  }
  return g;
}

}  // namespace dipolewave

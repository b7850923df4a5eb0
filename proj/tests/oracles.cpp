#include "oracles.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <stdexcept>

namespace dipolewave::oracles {

namespace {

// One FD solve at horizontal resolution n (a multiple of grid.N) and vertical
// resolution Ns. Returns G f restricted to the original grid nodes.
Array laplaceDnoSingle(const Grid& grid, const Array& etaIn, const Array& fIn, int n, int Ns,
                       double depth) {
  const int N0 = grid.N;
  const int refine = n / N0;
  const double L = grid.L;
  const double hx = 2.0 * L / n;

  // sample eta, f on the fine grid through the band-limited interpolant
  const Spectral& sp0 = grid.spectral();
  Spectrum ce = sp0.fft(etaIn), cf = sp0.fft(fIn);
  Array eta(n), f(n);
  for (int i = 0; i < n; ++i) {
    double x = -L + i * hx;
    eta[i] = sp0.evaluate(ce, x);
    f[i] = sp0.evaluate(cf, x);
  }

  // FD derivatives of eta (periodic)
  Array etaP(n), etaPP(n);
  for (int i = 0; i < n; ++i) {
    int ip = (i + 1) % n, im = (i + n - 1) % n;
    etaP[i] = (eta[ip] - eta[im]) / (2 * hx);
    etaPP[i] = (eta[ip] - 2 * eta[i] + eta[im]) / (hx * hx);
  }

  // vertical stretch: x2 = eta - (eta + depth) Sigma(s), Sigma = sinh(bs)/sinh(b)
  const double beta = 6.0;
  auto Sig = [&](double s) { return std::sinh(beta * s) / std::sinh(beta); };
  auto SigP = [&](double s) { return beta * std::cosh(beta * s) / std::sinh(beta); };
  auto SigPP = [&](double s) { return beta * beta * std::sinh(beta * s) / std::sinh(beta); };

  const double ds = 1.0 / Ns;
  auto idx = [&](int i, int m) { return (m - 1) * n + i; };  // unknown rows m=1..Ns
  const int rows = n * Ns;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(rows * 9);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows);

  for (int m = 1; m <= Ns; ++m) {
    double s = m * ds;
    double sig = Sig(s), sigP = SigP(s), sigPP = SigPP(s);
    for (int i = 0; i < n; ++i) {
      double H = eta[i] + depth;
      double sx = etaP[i] * (1.0 - sig) / (H * sigP);
      double sz = -1.0 / (H * sigP);
      double dxsx = (1.0 - sig) * (etaPP[i] * H - etaP[i] * etaP[i]) / (H * H * sigP);
      double dssx = -etaP[i] * (sigP * sigP + (1.0 - sig) * sigPP) / (H * sigP * sigP);
      double dssz = sigPP / (H * sigP * sigP);
      double cs = dxsx + sx * dssx + sz * dssz;
      double cxx = 1.0;
      double cxs = 2.0 * sx;
      double css = sx * sx + sz * sz;

      int ip = (i + 1) % n, im = (i + n - 1) % n;
      auto add = [&](int ii, int mm, double v) {
        if (mm == 0) {
          rhs[idx(i, m)] -= v * f[ii];  // Dirichlet surface row
        } else {
          int mEff = mm;
          if (mm == Ns + 1) mEff = Ns - 1;  // Neumann bottom ghost
          trip.emplace_back(idx(i, m), idx(ii, mEff), v);
        }
      };
      // cxx f_xx
      add(ip, m, cxx / (hx * hx));
      add(im, m, cxx / (hx * hx));
      add(i, m, -2.0 * cxx / (hx * hx));
      // css f_ss
      add(i, m + 1, css / (ds * ds));
      add(i, m - 1, css / (ds * ds));
      add(i, m, -2.0 * css / (ds * ds));
      // cxs f_xs
      add(ip, m + 1, cxs / (4 * hx * ds));
      add(im, m - 1, cxs / (4 * hx * ds));
      add(ip, m - 1, -cxs / (4 * hx * ds));
      add(im, m + 1, -cxs / (4 * hx * ds));
      // cs f_s
      add(i, m + 1, cs / (2 * ds));
      add(i, m - 1, -cs / (2 * ds));
    }
  }

  Eigen::SparseMatrix<double> A(rows, rows);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
  if (lu.info() != Eigen::Success) throw std::runtime_error("laplace oracle: factorization failed");
  Eigen::VectorXd sol = lu.solve(rhs);

  // G f = -eta' (f_x + s_x f_s) + s_z f_s at s = 0
  Array out(N0);
  for (int i0 = 0; i0 < N0; ++i0) {
    int i = i0 * refine;
    int ip = (i + 1) % n, im = (i + n - 1) % n;
    double H = eta[i] + depth;
    double sigP0 = SigP(0.0);
    double sx0 = etaP[i] / (H * sigP0);
    double sz0 = -1.0 / (H * sigP0);
    double fx = (f[ip] - f[im]) / (2 * hx);
    double fs = (-3.0 * f[i] + 4.0 * sol[idx(i, 1)] - sol[idx(i, 2)]) / (2 * ds);
    out[i0] = -etaP[i] * (fx + sx0 * fs) + sz0 * fs;
  }
  return out;
}

}  // namespace

Array laplaceDno(const Grid& grid, const Array& eta, const Array& f, int Ns, double depthFactor,
                 bool richardson) {
  double depth = depthFactor * grid.L;
  Array coarse = laplaceDnoSingle(grid, eta, f, grid.N, Ns, depth);
  if (!richardson) return coarse;
  Array fine = laplaceDnoSingle(grid, eta, f, 2 * grid.N, 2 * Ns, depth);
  Array out(grid.N);
  for (int i = 0; i < grid.N; ++i) out[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
  return out;
}

double lineIntegral(const std::function<Vec2(Vec2)>& field, Vec2 a, Vec2 b, int panels) {
  // 4-point Gauss-Legendre per panel
  static const double gx[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                               0.8611363115940526};
  static const double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                               0.3478548451374538};
  Vec2 d = (b - a) / double(panels);
  double total = 0;
  for (int p = 0; p < panels; ++p) {
    Vec2 p0 = a + d * double(p);
    for (int q = 0; q < 4; ++q) {
      Vec2 x = p0 + d * (0.5 * (gx[q] + 1.0));
      total += gw[q] * 0.5 * field(x).dot(d);
    }
  }
  return total;
}

double centralDerivative(const std::function<double(double)>& f, double x, double h) {
  return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

double centralSecondDerivative(const std::function<double(double)>& f, double x, double h) {
  return (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h) - f(x + 2 * h)) / (12 * h * h);
}

double fdLaplacian(const std::function<double(Vec2)>& f, Vec2 x, double h) {
  return (f({x.x + h, x.y}) + f({x.x - h, x.y}) + f({x.x, x.y + h}) + f({x.x, x.y - h}) -
          4.0 * f(x)) / (h * h);
}

}  // namespace dipolewave::oracles

#include "dipolewave/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <stdexcept>

namespace dipolewave {

namespace {
std::mutex& plannerMutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct Spectral::Plans {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  ~Plans() {
    std::lock_guard<std::mutex> lock(plannerMutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

Spectral::Spectral(int n, double L) : n_(n), L_(L), kPiOverL_(M_PI / L) {
  if (n < 8 || (n & (n - 1)) != 0) throw std::invalid_argument("Spectral: n must be a power of two >= 8");
  if (!(L > 0)) throw std::invalid_argument("Spectral: L must be positive");
  plans_ = std::make_shared<Plans>();
  std::lock_guard<std::mutex> lock(plannerMutex());
  Array in(n);
  std::vector<Cx> out(n / 2 + 1);
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans_->fwd = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()), flags);
  plans_->bwd = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(out.data()), in.data(), flags);
}

Array Spectral::nodes() const {
  Array x(n_);
  for (int i = 0; i < n_; ++i) x[i] = node(i);
  return x;
}

Spectrum Spectral::fft(const Array& f) const {
  if ((int)f.size() != n_) throw std::invalid_argument("fft: size mismatch");
  Array in = f;
  Spectrum out(bins());
  fftw_execute_dft_r2c(plans_->fwd, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  double s = 1.0 / n_;
  for (auto& c : out) c *= s;
  return out;
}

Array Spectral::ifft(const Spectrum& c) const {
  if ((int)c.size() != bins()) throw std::invalid_argument("ifft: size mismatch");
  Spectrum in = c;
  Array out(n_);
  fftw_execute_dft_c2r(plans_->bwd, reinterpret_cast<fftw_complex*>(in.data()), out.data());
  return out;
}

Array Spectral::deriv(const Array& f, int order) const {
  Spectrum c = fft(f);
  for (int k = 0; k < bins(); ++k) {
    Cx ik(0.0, wavenumber(k));
    Cx m = std::pow(ik, order);
    if (k == n_ / 2 && (order % 2) == 1) m = 0.0;  // odd derivative kills Nyquist
    c[k] *= m;
  }
  return ifft(c);
}

Array Spectral::absD(const Array& f, double p) const {
  Spectrum c = fft(f);
  c[0] = 0.0;
  for (int k = 1; k < bins(); ++k) c[k] *= std::pow(wavenumber(k), p);
  return ifft(c);
}

Array Spectral::applyMultiplier(const Array& f, const std::function<double(double)>& m) const {
  Spectrum c = fft(f);
  for (int k = 0; k < bins(); ++k) c[k] *= m(wavenumber(k));
  return ifft(c);
}

Array Spectral::antideriv(const Array& f) const {
  Spectrum c = fft(f);
  c[0] = 0.0;
  for (int k = 1; k < bins(); ++k) c[k] /= Cx(0.0, wavenumber(k));
  if (n_ % 2 == 0) c[n_ / 2] = 0.0;
  return ifft(c);
}

Array Spectral::shift(const Array& f, double s) const {
  Spectrum c = fft(f);
  for (int k = 0; k < bins(); ++k) c[k] *= std::exp(Cx(0.0, -wavenumber(k) * s));
  if (n_ % 2 == 0) c[n_ / 2] = Cx(c[n_ / 2].real(), 0.0);
  return ifft(c);
}

void Spectral::dealiasInPlace(Spectrum& c) const {
  int cut = n_ / 3;
  for (int k = cut + 1; k < (int)c.size(); ++k) c[k] = 0.0;
}

Array Spectral::dealias(const Array& f) const {
  Spectrum c = fft(f);
  dealiasInPlace(c);
  return ifft(c);
}

double Spectral::mean(const Array& f) const {
  double s = 0;
  for (double v : f) s += v;
  return s / n_;
}

Array Spectral::zeroMean(const Array& f) const {
  double m = mean(f);
  Array g = f;
  for (double& v : g) v -= m;
  return g;
}

double Spectral::inner(const Array& f, const Array& g) const {
  double s = 0;
  for (int i = 0; i < n_; ++i) s += f[i] * g[i];
  return s * h();
}

double Spectral::integral(const Array& f) const {
  double s = 0;
  for (double v : f) s += v;
  return s * h();
}

double Spectral::supNorm(const Array& f) const {
  double s = 0;
  for (double v : f) s = std::max(s, std::abs(v));
  return s;
}

double Spectral::l2Norm(const Array& f) const { return std::sqrt(inner(f, f)); }

Array Spectral::prod(const Array& f, const Array& g) const {
  Array p(n_);
  for (int i = 0; i < n_; ++i) p[i] = f[i] * g[i];
  return dealias(p);
}

double Spectral::evaluate(const Spectrum& c, double x) const {
  // interpolant anchored at the grid origin x0 = -L
  double xp = x + L_;
  double v = c[0].real();
  for (int k = 1; k < bins(); ++k) {
    double kk = wavenumber(k);
    Cx e = std::exp(Cx(0.0, kk * xp));
    double w = (k == n_ / 2) ? 1.0 : 2.0;
    v += w * (c[k] * e).real();
  }
  return v;
}

}  // namespace dipolewave

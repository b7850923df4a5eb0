#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <vector>

namespace dipolewave {

using Array = std::vector<double>;
using Cx = std::complex<double>;
using Spectrum = std::vector<Cx>;  // rfft bins 0..n/2

// Spectral toolbox on the periodic domain [-L, L) with n equispaced nodes.
// Coefficients follow f_j = sum_{k=0..n/2} Re/Im convention of a normalized
// rfft: f = c_0 + 2*sum_{k=1..n/2-1} Re(c_k e^{i k pi x'/L}) + Nyquist term,
// where multipliers act on the physical wavenumber kappa_k = k*pi/L.
class Spectral {
 public:
  Spectral(int n, double L);

  int n() const { return n_; }
  int bins() const { return n_ / 2 + 1; }
  double L() const { return L_; }
  double h() const { return 2.0 * L_ / n_; }
  double node(int i) const { return -L_ + i * h(); }
  Array nodes() const;
  double wavenumber(int k) const { return k * kPiOverL_; }
  double maxWavenumber() const { return wavenumber(n_ / 2); }

  Spectrum fft(const Array& f) const;
  Array ifft(const Spectrum& c) const;

  Array deriv(const Array& f, int order = 1) const;
  // |D|^p on nonzero modes; the mean is annihilated for p > 0 and for the
  // pseudo-inverse (p < 0) alike.
  Array absD(const Array& f, double p = 1.0) const;
  Array applyMultiplier(const Array& f, const std::function<double(double)>& m) const;
  // antiderivative with zero mean (inverse of deriv on zero-mean input)
  Array antideriv(const Array& f) const;
  Array shift(const Array& f, double s) const;
  // zero all bins above 2/3 Nyquist (2/3-rule dealiasing)
  Array dealias(const Array& f) const;
  void dealiasInPlace(Spectrum& c) const;

  double mean(const Array& f) const;
  Array zeroMean(const Array& f) const;
  double inner(const Array& f, const Array& g) const;  // h * sum f g
  double integral(const Array& f) const;
  double supNorm(const Array& f) const;
  double l2Norm(const Array& f) const;

  // pointwise product with 2/3-rule truncation of the result
  Array prod(const Array& f, const Array& g) const;

  // Evaluate the band-limited interpolant at arbitrary x (used for
  // non-commensurate translation checks and orbital distances).
  double evaluate(const Spectrum& c, double x) const;

 private:
  int n_;
  double L_;
  double kPiOverL_;
  struct Plans;
  std::shared_ptr<Plans> plans_;
};

}  // namespace dipolewave

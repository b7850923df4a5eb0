#pragma once

#include <array>
#include <vector>

#include "dipolewave/dynamics.hpp"
#include "dipolewave/steady.hpp"

namespace dipolewave {

// v = (eta, xbar, ybar): the state with the surface potential minimized out.
struct ReducedState {
  SurfaceState surface;  // phi slot unused
  DipoleConfig dipole;
};
struct ReducedIncrement {
  Array d_eta;
  Vec2 d_xbar, d_ybar;
};

ReducedState reduce(const FullState& u);

// phi_m = G(eta)^{-1} [ -c eta' - eps perp(Theta) ]
Array varphi_min(const ReducedState& v, double c, int order = kDefaultDnoOrder);

// b = a + eps (grad Theta)|_S - c e1 at phi = phi_m
struct RelativeVelocity {
  Array b1, b2;
};
RelativeVelocity relative_velocity_b(const ReducedState& v, double c, int order = kDefaultDnoOrder);

// State-dependent data shared by the L, A and H_c applications.
class AugmentedWorkspace {
 public:
  AugmentedWorkspace(const ReducedState& v, double c, int order = kDefaultDnoOrder,
                     double g = 1.0, double b = 1.0);

  Array operatorL(const ReducedIncrement& vdot) const;
  ReducedIncrement operatorA(const ReducedIncrement& vdot) const;
  CotangentVector hessian(const StateIncrement& udot) const;

  const Array& phiM() const { return phi_m_; }
  const RelativeVelocity& relVelocity() const { return bvel_; }
  const ReducedState& state() const { return v_; }
  double speed() const { return c_; }
  int order() const { return order_; }

 private:
  ReducedState v_;
  double c_, g_, b_;
  int order_;
  Array etaPrime_;
  Array phi_m_, gPhiM_, phiMPrime_;
  Array a1_, a2_;          // velocity trace of phi_m
  RelativeVelocity bvel_;  // relative velocity
  Array b2Prime_;
  Array xi1_, xi2_, zeta1_, zeta2_;
  Array perpXi_[2], perpZeta_[2];
  Array topXi_[2], topZeta_[2];
  Array ginvPerpXi_[2], ginvPerpZeta_[2];
  Array qXi_[2], qZeta_[2];  // (G^{-1} perp xi_j)' - top xi_j
  Mat2 A33_, A34_, A44_;
  friend struct AugmentedWorkspaceTestAccess;
  void assembleVortexBlocks();
};

// Leading-order 4x4 vortex-block matrix with its closed-form spectrum.
struct MatrixASmall {
  std::array<std::array<double, 4>, 4> matrix;  // includes the eps^2/4pi factor
  double alpha, beta, delta1, delta2;
  std::array<double, 4> closedFormEigenvalues;  // without the eps^2/4pi factor
  double certificateLhs;           // alpha^2+alpha(delta1+delta2)+delta1 delta2-beta^2
  double certificatePrinted;       // 2(a+rho) g1^4 / ((a-rho)(a^2+a rho+rho^2)^2)
  double certificateClosedForm;    // 3 g1^4 (a^2-a rho+rho^2)(a^4-a^2 rho^2+rho^4) / ((a-rho)^4 (...)^3)
};
MatrixASmall matrix_A_small(double a, double rho, double gamma1, double gamma2, double epsilon);

struct SpectrumReport {
  int negatives = 0;
  int near_zeros = 0;
  double min_positive = 0;
  double mu_c_sq = 0;
  double zero_tol = 0;
  double translation_correlation = 0;
  std::vector<double> eigenvalues;  // ascending
  StateIncrement chi_c;             // unit (X-norm) eigenvector of -mu_c^2
  int dimension = 0;
};

// Discretize I^{-1} H_c on the Fourier basis plus the vortex coordinates,
// symmetrize, eigensolve in the I-weighted inner product.
SpectrumReport spectrum_report(const TravelingWave& wave, double zero_tol = -1.0, int threads = 1);

struct BranchDiagnostics {
  std::vector<double> c_values, d_values, P_values, E_values;
  double dpp_closed_form = 0;      // paper's printed closed form
  double dpp_closed_tmatrix = 0;   // -g1 (a_c - rho_c) + g2 (a_c + rho_c)
  double dpp_fd = 0;
  double dprime_max_error = 0;     // max |d'(c) + P| over interior stencil points
};
BranchDiagnostics moment_of_instability(const std::vector<TravelingWave>& branch);

enum class PerturbationDirection { ChiC, Transverse, Random };

struct GrowthReport {
  std::vector<double> times, orbitalDistance;
  double amplitude = 0;
  double growthFactor = 0;   // max distance / amplitude
  double crossTime10x = -1;  // first time distance >= 10 * amplitude
  double efoldTime = 0;
  bool breached = false;
};

GrowthReport instability_experiment(const TravelingWave& wave, const SpectrumReport& spectrum,
                                    PerturbationDirection direction, double amplitude, double T,
                                    double dt, unsigned seed = 1);

// inf_s || T(s) U - u ||_X via golden-section search seeded at s0.
double orbital_distance(const FullState& U, const FullState& u, double s0);

}  // namespace dipolewave

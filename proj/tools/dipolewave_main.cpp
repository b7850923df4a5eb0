#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>

#include "dipolewave/config.hpp"
#include "dipolewave/errors.hpp"
#include "dipolewave/io.hpp"
#include "dipolewave/stability.hpp"

using namespace dipolewave;
namespace fs = std::filesystem;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

int pickPoint(int requested, int count) {
  if (count <= 0) throw ConfigError("branch is empty");
  int p = requested < 0 ? count / 2 : requested;
  if (p >= count) throw ConfigError("branch point index out of range");
  return p;
}

std::vector<TravelingWave> loadBranch(const std::string& outDir) {
  int count = branchSize(outDir);
  if (count == 0) throw ConfigError("no branch files under " + outDir + "; run solve first");
  std::vector<TravelingWave> branch;
  for (int i = 0; i < count; ++i) branch.push_back(readBranchPoint(outDir, i));
  return branch;
}

int cmdSolve(const RunConfig& cfg, const std::string& outDir, bool verbose) {
  Timer timer;
  std::vector<TravelingWave> branch = solve_branch(cfg.steadyParams(), cfg.a0, cfg.rho0,
                                                   cfg.schedule(), cfg.makeGrid(), cfg.M, cfg.threads);
  writeBranch(outDir, cfg, branch, timer.seconds());
  if (verbose)
    for (const auto& w : branch)
      std::printf("c=%.8g a=%.8g rho=%.8g residual=%.3g\n", w.c, w.a, w.rho, w.residual_norm);
  std::printf("solve: %zu branch points -> %s (%.2f s)\n", branch.size(), outDir.c_str(), timer.seconds());
  return 0;
}

int cmdSpectrum(const RunConfig& cfg, const std::string& outDir, bool verbose) {
  Timer timer;
  int count = branchSize(outDir);
  int p = pickPoint(cfg.spectrumPoint, count);
  TravelingWave wave = readBranchPoint(outDir, p);
  SpectrumReport rep = spectrum_report(wave, cfg.zeroTol, cfg.threads);
  writeSpectrumJson(outDir + "/spectrum.json", cfg, rep, p);
  writeManifest(outDir + "/spectrum_manifest.json", cfg, "spectrum", timer.seconds());
  std::printf("spectrum: negatives=%d near_zeros=%d mu_c^2=%.6g min_positive=%.6g corr=%.6f\n",
              rep.negatives, rep.near_zeros, rep.mu_c_sq, rep.min_positive,
              rep.translation_correlation);
  if (verbose)
    for (size_t i = 0; i < rep.eigenvalues.size() && i < 8; ++i)
      std::printf("  lambda[%zu] = %.9g\n", i, rep.eigenvalues[i]);
  return 0;
}

int cmdMoment(const RunConfig& cfg, const std::string& outDir, bool) {
  Timer timer;
  BranchDiagnostics d = moment_of_instability(loadBranch(outDir));
  writeMomentJson(outDir + "/moment.json", cfg, d);
  writeManifest(outDir + "/moment_manifest.json", cfg, "moment", timer.seconds());
  std::printf("moment: d''_fd=%.6g d''_closed(printed)=%.6g d''_closed(T-matrix)=%.6g d'err=%.3g\n",
              d.dpp_fd, d.dpp_closed_form, d.dpp_closed_tmatrix, d.dprime_max_error);
  return 0;
}

int cmdEvolve(const RunConfig& cfg, const std::string& outDir, bool) {
  Timer timer;
  int count = branchSize(outDir);
  int p = pickPoint(cfg.evolvePoint, count);
  TravelingWave wave = readBranchPoint(outDir, p);
  EvolveOptions opts;
  opts.dt = cfg.dt;
  opts.T = cfg.T;
  opts.order = cfg.M;
  opts.snapshotStride = cfg.snapshotStride;
  Trajectory traj = evolve(wave.state, opts);
  writeTrajectoryCsv(outDir + "/trajectory.csv", cfg, traj);
  if (cfg.snapshotStride > 0) writeSnapshots(outDir + "/snapshots", cfg, traj);
  writeManifest(outDir + "/evolve_manifest.json", cfg, "evolve", timer.seconds());
  double driftE = 0, driftP = 0;
  for (size_t i = 0; i < traj.E.size(); ++i) {
    driftE = std::max(driftE, std::abs(traj.E[i] - traj.E[0]));
    driftP = std::max(driftP, std::abs(traj.P[i] - traj.P[0]));
  }
  std::printf("evolve: %zu steps, |dE|=%.3g |dP|=%.3g%s\n", traj.t.size() - 1, driftE, driftP,
              traj.breach ? " [breach]" : "");
  return 0;
}

int cmdPerturb(const RunConfig& cfg, const std::string& outDir, bool) {
  Timer timer;
  int count = branchSize(outDir);
  int p = pickPoint(cfg.spectrumPoint, count);
  TravelingWave wave = readBranchPoint(outDir, p);
  std::string spectrumPath = outDir + "/spectrum.json";
  if (!fs::exists(spectrumPath))
    throw ConfigError("spectrum.json not found; run spectrum before perturb");
  SpectrumReport rep = readSpectrumJson(spectrumPath, wave.state.surface.grid);
  PerturbationDirection dir = PerturbationDirection::ChiC;
  if (cfg.direction == "transverse") dir = PerturbationDirection::Transverse;
  if (cfg.direction == "random") dir = PerturbationDirection::Random;
  GrowthReport growth = instability_experiment(wave, rep, dir, cfg.amplitude, cfg.perturbT,
                                               cfg.perturbDt, cfg.seed);
  writeGrowthJson(outDir + "/growth.json", cfg, growth);
  writeManifest(outDir + "/perturb_manifest.json", cfg, "perturb", timer.seconds());
  std::printf("perturb(%s): growth=%.3gx cross10x=%.4g efold=%.4g%s\n", cfg.direction.c_str(),
              growth.growthFactor, growth.crossTime10x, growth.efoldTime,
              growth.breached ? " [breach]" : "");
  return 0;
}

int cmdSelftest(const RunConfig& cfg, const std::string&, bool verbose) {
  int failures = 0;
  auto check = [&](const char* name, bool ok) {
    std::printf("%s %s\n", ok ? "[PASS]" : "[FAIL]", name);
    if (!ok) ++failures;
  };

  Grid grid(128, 20.0);
  const Spectral& sp = grid.spectral();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss;

  // DNO self-adjointness and positivity on a random small surface
  Array eta(sp.n()), f(sp.n()), g(sp.n());
  for (int i = 0; i < sp.n(); ++i) {
    double x = sp.node(i);
    eta[i] = 0.03 * std::exp(-x * x / 8.0) * std::cos(0.7 * x);
    f[i] = std::exp(-x * x / 10.0) * std::sin(0.9 * x + 0.3);
    g[i] = std::exp(-x * x / 12.0) * std::cos(1.3 * x);
  }
  SurfaceState st(grid, eta, Array(sp.n(), 0.0));
  f = sp.zeroMean(f);
  g = sp.zeroMean(g);
  Array Gf = dno_apply(st, f, cfg.M), Gg = dno_apply(st, g, cfg.M);
  double asym = std::abs(sp.inner(Gf, g) - sp.inner(f, Gg));
  check("dno self-adjoint", asym <= 1e-9 * sp.l2Norm(f) * sp.l2Norm(g));
  check("dno positive", sp.inner(Gf, f) >= 0);

  // Cauchy-Riemann for the dipole potentials
  DipoleConfig cfgD;
  cfgD.xbar = Vec2(0.3, -1.0);
  cfgD.ybar = Vec2(-0.2, -2.5);
  cfgD.gamma1 = 1.0;
  cfgD.gamma2 = 1.3;
  cfgD.epsilon = 0.05;
  double crErr = 0;
  for (int t = 0; t < 50; ++t) {
    Vec2 x(4.0 * gauss(rng), 0.5 + 0.3 * std::abs(gauss(rng)));
    FieldSample th = thetaField(x, cfgD);
    FieldSample ga = gammaField(x, cfgD);
    crErr = std::max(crErr, (th.gradient - rot90(ga.gradient)).norm());
  }
  check("grad Theta = perp grad Gamma", crErr < 1e-12);

  // skew-adjointness of J at a random state
  FullState u;
  u.surface = st;
  u.surface.phi = f;
  u.dipole = cfgD;
  CotangentVector w1, w2;
  w1.d_eta = g;
  w1.d_phi = sp.zeroMean(Gf);
  w1.d_xbar = Vec2(0.3, -0.1);
  w1.d_ybar = Vec2(0.2, 0.4);
  w2.d_eta = sp.deriv(f);
  w2.d_phi = sp.zeroMean(eta);
  w2.d_xbar = Vec2(-0.2, 0.5);
  w2.d_ybar = Vec2(0.1, -0.3);
  StateIncrement Jw1 = poisson_apply(u, w1);
  StateIncrement Jw2 = poisson_apply(u, w2);
  auto pair = [&](const CotangentVector& a, const StateIncrement& b) {
    return sp.inner(a.d_eta, b.d_eta) + sp.inner(a.d_phi, b.d_phi) + a.d_xbar.dot(b.d_xbar) +
           a.d_ybar.dot(b.d_ybar);
  };
  double skew = std::abs(pair(w2, Jw1) + pair(w1, Jw2));
  check("J skew-adjoint", skew <= 1e-10 * (1.0 + std::abs(pair(w2, Jw1))));

  // closed forms at the reference point
  double g2 = compatibility_gamma2(2.0, 1.0, 1.0);
  check("compatibility 9/7", std::abs(g2 - 9.0 / 7.0) < 1e-14);
  MatrixT mt = matrix_T(2.0, 1.0, 1.0, g2);
  check("det T matches closed form",
        std::abs(mt.detNumeric - mt.detClosedForm) < 1e-12 * std::abs(mt.detClosedForm));

  if (verbose) std::printf("selftest done\n");
  return failures == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-dipole capillary-gravity wave laboratory"};
  app.require_subcommand(1);

  std::string configPath, outDir = "out";
  int threadsOverride = -1;
  bool verbose = false;
  app.add_option("--config", configPath, "configuration file (JSON, // comments allowed)");
  app.add_option("--out", outDir, "output directory");
  app.add_option("--threads", threadsOverride, "worker threads");
  app.add_flag("--verbose", verbose, "chatty output");

  auto* solve = app.add_subcommand("solve", "solve the traveling-wave branch");
  auto* spectrum = app.add_subcommand("spectrum", "eigenvalue signature of the augmented Hessian");
  auto* moment = app.add_subcommand("moment", "moment of instability d(c) along the branch");
  auto* evolveCmd = app.add_subcommand("evolve", "time-integrate a branch point");
  auto* perturb = app.add_subcommand("perturb", "perturbation growth experiment");
  auto* selftest = app.add_subcommand("selftest", "run the built-in invariant checks");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg;
    if (!configPath.empty()) cfg = loadConfig(configPath);
    else cfg.validate();
    if (threadsOverride > 0) cfg.threads = threadsOverride;

    if (solve->parsed()) return cmdSolve(cfg, outDir, verbose);
    if (spectrum->parsed()) return cmdSpectrum(cfg, outDir, verbose);
    if (moment->parsed()) return cmdMoment(cfg, outDir, verbose);
    if (evolveCmd->parsed()) return cmdEvolve(cfg, outDir, verbose);
    if (perturb->parsed()) return cmdPerturb(cfg, outDir, verbose);
    if (selftest->parsed()) return cmdSelftest(cfg, outDir, verbose);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 1;
}

#include "dipolewave/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "dipolewave/errors.hpp"

namespace dipolewave {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[32];
  snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json arrayToJson(const Array& a) {
  json j = json::array();
  for (double v : a) j.push_back(v);
  return j;
}

Array arrayFromJson(const json& j) {
  Array a;
  for (const auto& v : j) a.push_back(v.get<double>());
  return a;
}

void writeFile(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << content;
}

json readJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  json j;
  in >> j;
  return j;
}

}  // namespace

void writeManifest(const std::string& path, const RunConfig& cfg, const std::string& command,
                   double elapsedSeconds) {
  json j;
  j["version"] = kArtifactVersion;
  j["command"] = command;
  j["config"] = json::parse(cfg.canonicalJson());
  j["config_hash"] = cfg.hash();
  j["elapsed_seconds"] = elapsedSeconds;
  writeFile(path, j.dump(2) + "\n");
}

void writeBranch(const std::string& outDir, const RunConfig& cfg,
                 const std::vector<TravelingWave>& branch, double elapsedSeconds) {
  fs::create_directories(outDir);
  std::string csv = "# " + std::string(kArtifactVersion) + " config=" + cfg.hash() + "\n";
  csv += "c,a,rho,residual,eta_sup,E,P\n";
  for (const auto& w : branch) {
    double E = energy(w.state, w.dnoOrder);
    double P = momentum(w.state);
    double etaSup = w.state.surface.grid.spectral().supNorm(w.state.surface.eta);
    csv += fmt(w.c) + "," + fmt(w.a) + "," + fmt(w.rho) + "," + fmt(w.residual_norm) + "," +
           fmt(etaSup) + "," + fmt(E) + "," + fmt(P) + "\n";
  }
  writeFile(outDir + "/branch.csv", csv);

  for (size_t i = 0; i < branch.size(); ++i) {
    const TravelingWave& w = branch[i];
    json j;
    j["version"] = kArtifactVersion;
    j["config_hash"] = cfg.hash();
    j["index"] = i;
    j["c"] = w.c;
    j["a"] = w.a;
    j["rho"] = w.rho;
    j["a0"] = w.a0;
    j["rho0"] = w.rho0;
    j["residual_norm"] = w.residual_norm;
    j["dno_order"] = w.dnoOrder;
    j["params"] = {{"epsilon", w.params.epsilon}, {"c_t", w.params.c_t},
                   {"gamma1", w.params.gamma1}, {"gamma2", w.params.gamma2},
                   {"b", w.params.b}, {"g", w.params.g}};
    j["grid"] = {{"N", w.state.surface.grid.N}, {"L", w.state.surface.grid.L}};
    j["eta"] = arrayToJson(w.state.surface.eta);
    j["phi"] = arrayToJson(w.state.surface.phi);
    j["eta_t"] = arrayToJson(w.scaled.eta_t);
    j["psi_t"] = arrayToJson(w.scaled.psi_t);
    char name[64];
    snprintf(name, sizeof name, "%s/point_%03zu.json", outDir.c_str(), i);
    writeFile(name, j.dump() + "\n");
  }
  writeManifest(outDir + "/manifest.json", cfg, "solve", elapsedSeconds);
}

int branchSize(const std::string& outDir) {
  int n = 0;
  while (true) {
    char name[64];
    snprintf(name, sizeof name, "%s/point_%03d.json", outDir.c_str(), n);
    if (!fs::exists(name)) break;
    ++n;
  }
  return n;
}

TravelingWave readBranchPoint(const std::string& outDir, int index) {
  char name[64];
  snprintf(name, sizeof name, "%s/point_%03d.json", outDir.c_str(), index);
  json j = readJsonFile(name);
  TravelingWave w;
  w.c = j["c"];
  w.a = j["a"];
  w.rho = j["rho"];
  w.a0 = j["a0"];
  w.rho0 = j["rho0"];
  w.residual_norm = j["residual_norm"];
  w.dnoOrder = j["dno_order"];
  w.params.epsilon = j["params"]["epsilon"];
  w.params.c_t = j["params"]["c_t"];
  w.params.gamma1 = j["params"]["gamma1"];
  w.params.gamma2 = j["params"]["gamma2"];
  w.params.b = j["params"]["b"];
  w.params.g = j["params"]["g"];
  Grid grid(j["grid"]["N"].get<int>(), j["grid"]["L"].get<double>());
  w.state.surface = SurfaceState(grid, arrayFromJson(j["eta"]), arrayFromJson(j["phi"]));
  w.scaled.eta_t = arrayFromJson(j["eta_t"]);
  w.scaled.psi_t = arrayFromJson(j["psi_t"]);
  w.scaled.a = w.a;
  w.scaled.rho = w.rho;
  w.state.dipole.xbar = Vec2(0, -w.a + w.rho);
  w.state.dipole.ybar = Vec2(0, -w.a - w.rho);
  w.state.dipole.gamma1 = w.params.gamma1;
  w.state.dipole.gamma2 = w.params.gamma2;
  w.state.dipole.epsilon = w.params.epsilon;
  return w;
}

void writeTrajectoryCsv(const std::string& path, const RunConfig& cfg, const Trajectory& traj) {
  std::string csv = "# " + std::string(kArtifactVersion) + " config=" + cfg.hash() + "\n";
  csv += "t,E,P,xbar1,xbar2,ybar1,ybar2,eta_sup,min_separation\n";
  for (size_t i = 0; i < traj.t.size(); ++i) {
    csv += fmt(traj.t[i]) + "," + fmt(traj.E[i]) + "," + fmt(traj.P[i]) + "," +
           fmt(traj.xbar[i].x) + "," + fmt(traj.xbar[i].y) + "," +
           fmt(traj.ybar[i].x) + "," + fmt(traj.ybar[i].y) + "," +
           fmt(traj.etaSup[i]) + "," + fmt(traj.minSeparation[i]) + "\n";
  }
  writeFile(path, csv);
}

void writeSnapshots(const std::string& outDir, const RunConfig& cfg, const Trajectory& traj) {
  fs::create_directories(outDir);
  json manifest;
  manifest["version"] = kArtifactVersion;
  manifest["config_hash"] = cfg.hash();
  manifest["count"] = traj.snapshots.size();
  manifest["breached"] = traj.breach.has_value();
  if (traj.breach) {
    manifest["breach_time"] = traj.breach->time;
    manifest["breach_separation"] = traj.breach->separation;
  }
  json list = json::array();
  for (size_t i = 0; i < traj.snapshots.size(); ++i) {
    const auto& [t, u] = traj.snapshots[i];
    json j;
    j["t"] = t;
    j["grid"] = {{"N", u.surface.grid.N}, {"L", u.surface.grid.L}};
    j["eta"] = arrayToJson(u.surface.eta);
    j["phi"] = arrayToJson(u.surface.phi);
    j["xbar"] = {u.dipole.xbar.x, u.dipole.xbar.y};
    j["ybar"] = {u.dipole.ybar.x, u.dipole.ybar.y};
    char name[64];
    snprintf(name, sizeof name, "snapshot_%05zu.json", i);
    writeFile(outDir + "/" + name, j.dump() + "\n");
    list.push_back({{"file", name}, {"t", t}});
  }
  manifest["snapshots"] = list;
  writeFile(outDir + "/snapshots.json", manifest.dump(2) + "\n");
}

void writeSpectrumJson(const std::string& path, const RunConfig& cfg, const SpectrumReport& rep,
                       int pointIndex) {
  json j;
  j["version"] = kArtifactVersion;
  j["config_hash"] = cfg.hash();
  j["point"] = pointIndex;
  j["negatives"] = rep.negatives;
  j["near_zeros"] = rep.near_zeros;
  j["min_positive"] = rep.min_positive;
  j["mu_c_sq"] = rep.mu_c_sq;
  j["zero_tol"] = rep.zero_tol;
  j["translation_correlation"] = rep.translation_correlation;
  j["dimension"] = rep.dimension;
  j["chi_c"] = {{"eta", arrayToJson(rep.chi_c.d_eta)},
                {"phi", arrayToJson(rep.chi_c.d_phi)},
                {"xbar", {rep.chi_c.d_xbar.x, rep.chi_c.d_xbar.y}},
                {"ybar", {rep.chi_c.d_ybar.x, rep.chi_c.d_ybar.y}}};
  writeFile(path, j.dump() + "\n");
}

SpectrumReport readSpectrumJson(const std::string& path, const Grid&) {
  json j = readJsonFile(path);
  SpectrumReport rep;
  rep.negatives = j["negatives"];
  rep.near_zeros = j["near_zeros"];
  rep.min_positive = j["min_positive"];
  rep.mu_c_sq = j["mu_c_sq"];
  rep.zero_tol = j["zero_tol"];
  rep.translation_correlation = j["translation_correlation"];
  rep.dimension = j["dimension"];
  rep.chi_c.d_eta = arrayFromJson(j["chi_c"]["eta"]);
  rep.chi_c.d_phi = arrayFromJson(j["chi_c"]["phi"]);
  rep.chi_c.d_xbar = Vec2(j["chi_c"]["xbar"][0], j["chi_c"]["xbar"][1]);
  rep.chi_c.d_ybar = Vec2(j["chi_c"]["ybar"][0], j["chi_c"]["ybar"][1]);
  return rep;
}

void writeMomentJson(const std::string& path, const RunConfig& cfg, const BranchDiagnostics& d) {
  json j;
  j["version"] = kArtifactVersion;
  j["config_hash"] = cfg.hash();
  j["c_values"] = arrayToJson(d.c_values);
  j["d_values"] = arrayToJson(d.d_values);
  j["P_values"] = arrayToJson(d.P_values);
  j["E_values"] = arrayToJson(d.E_values);
  j["dpp_closed_form"] = d.dpp_closed_form;
  j["dpp_closed_tmatrix"] = d.dpp_closed_tmatrix;
  j["dpp_fd"] = d.dpp_fd;
  j["dprime_max_error"] = d.dprime_max_error;
  writeFile(path, j.dump(2) + "\n");
}

void writeGrowthJson(const std::string& path, const RunConfig& cfg, const GrowthReport& rep) {
  json j;
  j["version"] = kArtifactVersion;
  j["config_hash"] = cfg.hash();
  j["amplitude"] = rep.amplitude;
  j["growth_factor"] = rep.growthFactor;
  j["cross_time_10x"] = rep.crossTime10x;
  j["efold_time"] = rep.efoldTime;
  j["breached"] = rep.breached;
  j["times"] = arrayToJson(rep.times);
  j["orbital_distance"] = arrayToJson(rep.orbitalDistance);
  writeFile(path, j.dump(2) + "\n");
}

}  // namespace dipolewave

#include "dipolewave/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

#include "dipolewave/errors.hpp"

namespace dipolewave {

using nlohmann::json;

double RunConfig::gamma2Effective() const {
  return gamma2 > 0 ? gamma2 : compatibility_gamma2(a0, rho0, gamma1);
}

double RunConfig::LEffective() const {
  if (L > 0) return L;
  // resolve the vortex-depth trace scale (a0 - rho0) to ~e^{-15} within the
  // dealiased band: kcut (a0 - rho0) = pi N (a0 - rho0) / (3 L) >= 15
  return M_PI * N * (a0 - rho0) / 45.0;
}

Grid RunConfig::makeGrid() const { return Grid(N, LEffective()); }

SteadyParams RunConfig::steadyParams() const {
  SteadyParams p;
  p.epsilon = epsilon;
  p.gamma1 = gamma1;
  p.gamma2 = gamma2Effective();
  p.b = b;
  p.g = g;
  return p;
}

ContinuationSchedule RunConfig::schedule() const {
  ContinuationSchedule s;
  s.epsilonSteps = epsilonSteps;
  s.tol = newtonTol;
  s.maxNewtonIterations = maxNewtonIterations;
  s.cTildeOffsets.clear();
  if (cPoints == 1) {
    s.cTildeOffsets.push_back(0.0);
  } else {
    for (int i = 0; i < cPoints; ++i)
      s.cTildeOffsets.push_back(-cSpan + 2.0 * cSpan * i / (cPoints - 1));
  }
  return s;
}

void RunConfig::validate() const {
  if (!(rho0 > 0) || !(rho0 < a0)) throw ConfigError("config: require 0 < rho0 < a0");
  if (!(gamma1 > 0)) throw ConfigError("config: gamma1 must be positive");
  if (!(b > 0) || !(g > 0)) throw ConfigError("config: b and g must be positive");
  if (N < 64 || (N & (N - 1)) != 0) throw ConfigError("config: N must be a power of two >= 64");
  if (M < 0 || M > 24) throw ConfigError("config: M out of range");
  if (!(dt > 0) || !(T > 0)) throw ConfigError("config: dt and T must be positive");
  if (cPoints < 1) throw ConfigError("config: cPoints must be >= 1");
  if (!(cSpan >= 0)) throw ConfigError("config: cSpan must be nonnegative");
  if (threads < 1) throw ConfigError("config: threads must be >= 1");
  if (direction != "chi_c" && direction != "transverse" && direction != "random")
    throw ConfigError("config: direction must be chi_c | transverse | random");
  // downstream guards, surfaced at load time
  double le = LEffective();
  if (!(le > 0)) throw ConfigError("config: L must be positive");
  double kmax = M_PI * N / (2.0 * le);
  if (dt * std::sqrt(b * kmax * kmax * kmax + g * kmax) > 2.5)
    throw ConfigError("config: dt violates the capillary dispersion stability guard");
  compatibility_gamma2(a0, rho0, gamma1);  // throws DegenerateGeometry on bad geometry
}

namespace {
json toJson(const RunConfig& c) {
  json j;
  j["geometry"] = {{"a0", c.a0}, {"rho0", c.rho0}};
  j["strengths"] = {{"gamma1", c.gamma1}};
  if (c.gamma2 > 0) j["strengths"]["gamma2"] = c.gamma2;
  j["epsilon"] = c.epsilon;
  j["b"] = c.b;
  j["g"] = c.g;
  j["grid"] = {{"N", c.N}, {"M", c.M}};
  if (c.L > 0) j["grid"]["L"] = c.L;
  j["solver"] = {{"newton_tol", c.newtonTol},
                 {"max_newton_iterations", c.maxNewtonIterations}};
  j["schedule"] = {{"epsilon_steps", c.epsilonSteps}, {"c_points", c.cPoints}, {"c_span", c.cSpan}};
  j["evolve"] = {{"dt", c.dt}, {"T", c.T}, {"snapshot_stride", c.snapshotStride}, {"point", c.evolvePoint}};
  j["spectrum"] = {{"zero_tol", c.zeroTol}, {"point", c.spectrumPoint}};
  j["experiment"] = {{"direction", c.direction}, {"amplitude", c.amplitude},
                     {"T", c.perturbT}, {"dt", c.perturbDt}};
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  return j;
}
}  // namespace

RunConfig parseConfig(const std::string& text) {
  json j;
  try {
    j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  RunConfig c;
  auto get = [&](const json& obj, const char* key, auto& out) {
    if (obj.contains(key)) {
      try {
        out = obj.at(key).get<std::decay_t<decltype(out)>>();
      } catch (const json::exception& e) {
        throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
      }
    }
  };
  if (j.contains("geometry")) {
    get(j["geometry"], "a0", c.a0);
    get(j["geometry"], "rho0", c.rho0);
  }
  if (j.contains("strengths")) {
    get(j["strengths"], "gamma1", c.gamma1);
    get(j["strengths"], "gamma2", c.gamma2);
  }
  get(j, "epsilon", c.epsilon);
  get(j, "b", c.b);
  get(j, "g", c.g);
  if (j.contains("grid")) {
    get(j["grid"], "N", c.N);
    get(j["grid"], "L", c.L);
    get(j["grid"], "M", c.M);
  }
  if (j.contains("solver")) {
    get(j["solver"], "newton_tol", c.newtonTol);
    get(j["solver"], "max_newton_iterations", c.maxNewtonIterations);
  }
  if (j.contains("schedule")) {
    get(j["schedule"], "epsilon_steps", c.epsilonSteps);
    get(j["schedule"], "c_points", c.cPoints);
    get(j["schedule"], "c_span", c.cSpan);
  }
  if (j.contains("evolve")) {
    get(j["evolve"], "dt", c.dt);
    get(j["evolve"], "T", c.T);
    get(j["evolve"], "snapshot_stride", c.snapshotStride);
    get(j["evolve"], "point", c.evolvePoint);
  }
  if (j.contains("spectrum")) {
    get(j["spectrum"], "zero_tol", c.zeroTol);
    get(j["spectrum"], "point", c.spectrumPoint);
  }
  if (j.contains("experiment")) {
    get(j["experiment"], "direction", c.direction);
    get(j["experiment"], "amplitude", c.amplitude);
    get(j["experiment"], "T", c.perturbT);
    get(j["experiment"], "dt", c.perturbDt);
  }
  get(j, "seed", c.seed);
  get(j, "threads", c.threads);
  c.validate();
  return c;
}

RunConfig loadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parseConfig(ss.str());
}

std::string RunConfig::canonicalJson() const { return toJson(*this).dump(2); }

std::string RunConfig::hash() const {
  std::string s = toJson(*this).dump();
  uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[20];
  snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
  return buf;
}

}  // namespace dipolewave

#pragma once

#include <string>
#include <vector>

#include "dipolewave/config.hpp"
#include "dipolewave/dynamics.hpp"
#include "dipolewave/stability.hpp"
#include "dipolewave/steady.hpp"

namespace dipolewave {

inline constexpr const char* kArtifactVersion = "dipolewave 0.1.0";

// branch.csv + per-point state files + manifest.json in outDir
void writeBranch(const std::string& outDir, const RunConfig& cfg,
                 const std::vector<TravelingWave>& branch, double elapsedSeconds);

// Reload a branch point written by writeBranch.
TravelingWave readBranchPoint(const std::string& outDir, int index);
int branchSize(const std::string& outDir);

void writeTrajectoryCsv(const std::string& path, const RunConfig& cfg, const Trajectory& traj);
void writeSnapshots(const std::string& outDir, const RunConfig& cfg, const Trajectory& traj);

void writeSpectrumJson(const std::string& path, const RunConfig& cfg, const SpectrumReport& rep,
                       int pointIndex);
SpectrumReport readSpectrumJson(const std::string& path, const Grid& grid);

void writeMomentJson(const std::string& path, const RunConfig& cfg, const BranchDiagnostics& d);
void writeGrowthJson(const std::string& path, const RunConfig& cfg, const GrowthReport& rep);

void writeManifest(const std::string& path, const RunConfig& cfg, const std::string& command,
                   double elapsedSeconds);

}  // namespace dipolewave

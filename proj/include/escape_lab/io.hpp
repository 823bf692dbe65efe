#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "escape_lab/landscape.hpp"
#include "escape_lab/optimizer.hpp"
#include "escape_lab/regions.hpp"

namespace escape_lab {

// %.17g: enough digits to round-trip any double exactly.
std::string fmt_double(double v);

// step,x0..x{d-1},f,grad_norm
std::string trajectory_csv(const Trajectory& traj);
Trajectory trajectory_from_csv(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Everything needed to re-run a command bit-identically. Carries no
// timestamps, so identical runs produce identical manifests.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;  // arguments after the program name
  nlohmann::json config;
  std::uint64_t master_seed = 0;
  std::vector<std::string> artifacts;
  std::string version;
};

nlohmann::json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

// Writes <artifact_path>.manifest.json next to the artifact.
void write_manifest(const RunManifest& m, const std::string& artifact_path);

// Comma-separated numbers; surrounding spaces allowed, anything else rejected.
std::vector<double> parse_doubles(const std::string& text);
Vector parse_vector(const std::string& text);

// "step:factor,step:factor"
std::vector<ScheduleEntry> parse_schedule(const std::string& text);

// JSON object, bare id, or "id:p1,p2,..."
LandscapeSpec parse_landscape_spec(const std::string& text);

// JSON object or "lo,hi" (a 1-D interval)
Region parse_region(const std::string& text);

}  // namespace escape_lab

#pragma once

#include <string>

#include <json.hpp>

#include "eikplan/continuation.hpp"
#include "eikplan/problem.hpp"

namespace eikplan {

/// Mesh construction settings. base_nx/base_ny <= 0 means "derive from the
/// domain aspect ratio" (smallest integer grid with near-square cells).
struct MeshConfig {
  int base_nx = -1;
  int base_ny = -1;
  int refine = 7;
};

/// Everything a solve needs, as read from a JSON scenario file.
struct RunConfig {
  ProblemSpec problem;
  MeshConfig mesh;
  ContinuationConfig continuation;
};

/// Parses a scenario from JSON. Unknown keys raise ConfigError so typos do
/// not silently fall back to defaults. Accepts both bare scenarios and run
/// manifests (objects with a "resolved_config" member).
RunConfig config_from_json(const nlohmann::json& j);

/// Reads and parses a scenario file; throws IoError / ConfigError.
RunConfig load_config(const std::string& path);

/// Serializes a config with every field resolved and explicit, suitable for
/// embedding in a run manifest and re-reading via config_from_json.
nlohmann::json to_json(const RunConfig& cfg);

/// Builds the mesh a config describes: base rectangle grid plus uniform
/// refinements, with goal/depot vertex sets marked.
TriMesh build_mesh(const RunConfig& cfg);

}  // namespace eikplan

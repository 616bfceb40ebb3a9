#pragma once

// Shared fixtures for the test suite: the three reference scenarios and a
// few process-spawning utilities for exercising the command-line binary.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "eikplan/config.hpp"
#include "eikplan/field.hpp"
#include "eikplan/mesh.hpp"
#include "eikplan/problem.hpp"

namespace testing {

using namespace eikplan;

// Breakdown scenario on [0,2]x[0,1]: unit speed in mode 1, crawl speed in
// mode 2, a gaussian breakdown-rate bump near (1,0), goal = depot = point
// near the right edge.
inline ProblemSpec road_spec() {
  ProblemSpec s;
  s.length = 2.0;
  s.width = 1.0;
  s.f1 = CoefficientField::constant(1.0);
  s.f2 = CoefficientField::constant(0.2);
  s.k1 = CoefficientField::constant(1.0);
  s.k2 = CoefficientField::constant(1.0);
  s.lambda = CoefficientField::constant(1.0);
  s.phi1 = CoefficientField::gaussian_bump(7.0, {1.0, 0.0}, {5.0, 5.0});
  s.phi2 = CoefficientField::constant(3.0);
  s.repair = CoefficientField::constant(1.0);
  s.goal = Region::disc({1.9, 0.5}, 0.0);
  s.depot = Region::disc({1.9, 0.5}, 0.0);
  return s;
}

// Decoupled distance problem: u1 must converge to Euclidean distance to the
// goal point.
inline ProblemSpec distance_spec() {
  ProblemSpec s = road_spec();
  s.f2 = CoefficientField::constant(1.0);
  s.lambda = CoefficientField::constant(0.0);
  s.phi1 = CoefficientField::constant(0.0);
  s.phi2 = CoefficientField::constant(0.0);
  s.repair = CoefficientField::constant(0.0);
  return s;
}

// Both equations identical: u1 == u2 exactly at every iteration.
inline ProblemSpec symmetric_spec() {
  ProblemSpec s = road_spec();
  s.f2 = CoefficientField::constant(1.0);
  s.phi1 = CoefficientField::constant(1.0);
  s.phi2 = CoefficientField::constant(1.0);
  s.repair = CoefficientField::constant(0.0);
  return s;
}

inline TriMesh marked_mesh(const ProblemSpec& spec, int refine) {
  TriMesh mesh = build_rectangle_mesh(spec.length, spec.width, 2, 1);
  for (int i = 0; i < refine; ++i) mesh = refine_uniform(mesh);
  return mark_regions(std::move(mesh), spec);
}

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the CLI with the given argument string, capturing exit code and both
// streams. Uses the shell; callers quote their own arguments if needed.
inline CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const std::string base = "/tmp/eikplan_cli_" + std::to_string(counter++);
  const std::string out_path = base + ".out";
  const std::string err_path = base + ".err";
  const std::string cmd = std::string(EIKPLAN_CLI_PATH) + " " + args + " > " +
                          out_path + " 2> " + err_path;
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return r;
}

inline std::string config_path(const std::string& name) {
  return std::string(EIKPLAN_CONFIG_DIR) + "/" + name;
}

// Fresh scratch directory under /tmp for a test's output files.
inline std::string scratch_dir(const std::string& tag) {
  static int counter = 0;
  const std::string dir =
      "/tmp/eikplan_test_" + tag + "_" + std::to_string(counter++);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing

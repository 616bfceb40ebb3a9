// Command-line front end. One binary, subcommand style:
//
//   eikplan solve <scenario.json> <out_dir> [overrides]
//   eikplan trace <solution_dir> <x> <y> [--mode 1|2]
//   eikplan mc <solution_dir> <x> <y> [--n N] [--seed S] [--threads T]
//   eikplan aubry <scenario.json> [--tol T]
//   eikplan verify-1d [--candidate smooth|min|max] [--shift C] [--at X --value V]
//
// Exit codes are stable: 0 success, 1 usage/config error, 2 non-convergence,
// 3 negative verdict (nonempty degenerate set, failed candidate check).

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "eikplan/config.hpp"
#include "eikplan/continuation.hpp"
#include "eikplan/errors.hpp"
#include "eikplan/mc.hpp"
#include "eikplan/mesh.hpp"
#include "eikplan/postprocess.hpp"
#include "eikplan/problem.hpp"
#include "eikplan/types.hpp"
#include "eikplan/viscosity1d.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace eikplan;

constexpr const char* kVersion = "0.1.0";

std::string fmt(Real v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// Write-then-rename so a crash never leaves a truncated file behind.
void write_text_atomic(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw IoError("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

json load_manifest(const fs::path& solution_dir) {
  const fs::path path = solution_dir / "manifest.json";
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::parse_error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

int run_solve(const std::string& config_path, const std::string& out_dir,
              RunConfig cfg, bool vtk) {
  const auto t0 = std::chrono::steady_clock::now();
  const TriMesh mesh = build_mesh(cfg);
  const double mesh_seconds = seconds_since(t0);

  const auto t1 = std::chrono::steady_clock::now();
  const SolutionPair sol = run_continuation(mesh, cfg.problem, cfg.continuation);
  const double solve_seconds = seconds_since(t1);

  const fs::path dir(out_dir);
  fs::create_directories(dir);

  // The manifest goes first, atomically, so any later output is always
  // accompanied by the exact configuration that produced it. Feeding the
  // manifest back into `solve` reproduces the run.
  json manifest;
  manifest["tool"] = "eikplan";
  manifest["version"] = kVersion;
  manifest["command"] = "solve";
  manifest["inputs"] = json::array({fs::absolute(config_path).string()});
  manifest["out_dir"] = fs::absolute(dir).string();
  manifest["resolved_config"] = to_json(cfg);
  manifest["timings_seconds"] = {{"mesh", mesh_seconds},
                                 {"solve", solve_seconds}};
  manifest["result"] = {{"converged", sol.converged},
                        {"final_epsilon", sol.final_epsilon},
                        {"outer_steps", sol.history.size()},
                        {"message", sol.message},
                        {"warnings", sol.warnings}};
  write_text_atomic(dir / "manifest.json", manifest.dump(2) + "\n");

  export_field(mesh, {&sol.u1}, {"u1"}, ExportFormat::Csv,
               (dir / "u1.csv").string());
  export_field(mesh, {&sol.u2}, {"u2"}, ExportFormat::Csv,
               (dir / "u2.csv").string());
  export_history_csv(sol.history, (dir / "history.csv").string());
  if (vtk)
    export_field(mesh, {&sol.u1, &sol.u2}, {"u1", "u2"},
                 ExportFormat::VtkLegacy, (dir / "solution.vtk").string());

  for (const std::string& w : sol.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << sol.message << " (final epsilon " << fmt(sol.final_epsilon)
            << ", " << sol.history.size() << " outer steps, "
            << mesh.n_vertices() << " vertices)\n";
  return sol.converged ? 0 : 2;
}

int run_trace(const std::string& solution_dir, double x, double y, int mode,
              double step_override, const std::string& out_override) {
  const fs::path dir(solution_dir);
  const RunConfig cfg = config_from_json(load_manifest(dir));
  if (x < 0 || x > cfg.problem.length || y < 0 || y > cfg.problem.width)
    throw ConfigError("start (" + fmt(x) + ", " + fmt(y) +
                      ") lies outside the domain");

  const TriMesh mesh = build_mesh(cfg);
  const bool nominal = mode == 1;
  const Vector u =
      read_field_csv((dir / (nominal ? "u1.csv" : "u2.csv")).string(), &mesh);
  const std::vector<Index>& targets =
      nominal ? mesh.goal_vertices : mesh.depot_vertices;
  const Real step = step_override > 0 ? step_override : mesh.max_h() / 2;

  const Trajectory traj =
      trace_trajectory(u, mesh, Vector2(x, y), step, targets, 100000, 1e-10,
                       {&cfg.problem.phi1, &cfg.problem.phi2});

  const fs::path out_dir = out_override.empty() ? dir : fs::path(out_override);
  fs::create_directories(out_dir);
  const fs::path csv_path = out_dir / "trajectory.csv";
  std::ofstream csv(csv_path, std::ios::binary | std::ios::trunc);
  csv << "x,y\n";
  for (const Vector2& p : traj.points)
    csv << fmt(p.x()) << "," << fmt(p.y()) << "\n";
  if (!csv) throw IoError("cannot write " + csv_path.string());

  const json summary = {{"points", traj.points.size()},
                        {"arc_length", traj.arc_length},
                        {"reached_target", traj.reached_goal},
                        {"step", traj.step_size},
                        {"integral_phi1", traj.line_integrals[0]},
                        {"integral_phi2", traj.line_integrals[1]}};
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int run_mc(const std::string& solution_dir, double x, double y, int mode,
           const McConfig& mc_cfg) {
  const fs::path dir(solution_dir);
  const json manifest = load_manifest(dir);
  if (manifest.contains("result") &&
      manifest["result"].value("converged", true) == false)
    throw ConfigError("solution in " + solution_dir +
                      " did not converge; refusing to simulate against it");

  const RunConfig cfg = config_from_json(manifest);
  const TriMesh mesh = build_mesh(cfg);
  const Vector u1 = read_field_csv((dir / "u1.csv").string(), &mesh);
  const Vector u2 = read_field_csv((dir / "u2.csv").string(), &mesh);

  const McEstimate est =
      simulate_cost(mesh, cfg.problem, u1, u2, Vector2(x, y), mode, mc_cfg);
  std::cout << "x,y,mean,se,n_samples,censored_fraction\n"
            << fmt(x) << "," << fmt(y) << "," << fmt(est.mean) << ","
            << fmt(est.standard_error) << "," << est.n_samples << ","
            << fmt(est.censored_fraction) << "\n";
  return 0;
}

int run_aubry(const RunConfig& cfg, double tol) {
  const TriMesh mesh = build_mesh(cfg);
  const AubryReport rep = aubry_set(cfg.problem, mesh, tol);

  json witnesses = json::array();
  for (const Index v : rep.witnesses) {
    const Vector2& p = mesh.vertices[static_cast<std::size_t>(v)];
    witnesses.push_back({p.x(), p.y()});
  }
  const json out = {{"is_empty", rep.is_empty},
                    {"min1", rep.min1},
                    {"min2", rep.min2},
                    {"tolerance", rep.tolerance},
                    {"n_witnesses", rep.witnesses.size()},
                    {"witnesses", witnesses}};
  std::cout << out.dump(2) << "\n";
  return rep.is_empty ? 0 : 3;
}

int run_verify_1d(const std::string& candidate, double shift, int grid_n,
                  double tol,
                  const std::optional<std::pair<double, double>>& pin) {
  Candidate1D cand;
  if (candidate == "smooth") {
    cand = example_candidates({kSmoothCandidate}).front();
  } else if (candidate == "min") {
    cand = example_candidates({shift}).front();
  } else {
    if (!(shift > 0 && shift < 1))
      throw ParameterError("shift must lie in (0, 1), got " + fmt(shift));
    cand.u1 = max_of(Piece::down_parabola(-1, 1),
                     Piece::up_parabola_shift(shift, -1, 1));
    cand.u2 = cand.u1;
    cand.name = "max-family C=" + fmt(shift);
  }

  ViscosityReport rep = check_viscosity(
      cand, [](Real t) { return 2 * std::abs(t); }, grid_n, tol);
  bool pass = rep.verdict == Verdict::IsSolution;
  if (pin) {
    for (const BoundaryVerdict& b :
         check_boundary(cand, {{pin->first, pin->second}}, tol)) {
      rep.boundary.push_back(b);
      if (!b.passed) {
        pass = false;
        if (rep.verdict == Verdict::IsSolution)
          rep.verdict = Verdict::FailsBoundary;
      }
    }
  }

  const char* verdict = rep.verdict == Verdict::IsSolution ? "is-solution"
                        : rep.verdict == Verdict::FailsEquation
                            ? "fails-equation"
                            : "fails-boundary";
  json kinks = json::array();
  for (const KinkVerdict& k : rep.kinks)
    kinks.push_back({{"component", k.component},
                     {"x", k.x},
                     {"concave", k.concave},
                     {"worst_excess", k.worst_excess},
                     {"passed", k.passed}});
  json boundary = json::array();
  for (const BoundaryVerdict& b : rep.boundary)
    boundary.push_back({{"component", b.component},
                        {"x", b.x},
                        {"value", b.value},
                        {"required", b.required},
                        {"passed", b.passed}});
  const json out = {{"candidate", cand.name},
                    {"verdict", verdict},
                    {"max_smooth_residual", rep.max_smooth_residual},
                    {"kinks", kinks},
                    {"boundary", boundary},
                    {"detail", rep.detail}};
  std::cout << out.dump(2) << "\n";
  return pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Value functions for path planning with random breakdowns: coupled "
      "eikonal solver, descent tracer, and Monte Carlo cross-check"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string config_path, out_dir;
  int refine = 0;
  double epsilon0 = 0, ratio = 0, theta = 0;
  bool no_flux = false, vtk = false;
  CLI::App* solve =
      app.add_subcommand("solve", "Run the viscosity continuation solver");
  solve->add_option("config", config_path,
                    "Scenario JSON (a previous run manifest also works)")
      ->required();
  solve->add_option("out_dir", out_dir, "Output directory, created if missing")
      ->required();
  CLI::Option* o_refine =
      solve->add_option("--refine", refine, "Override the refinement level")
          ->check(CLI::NonNegativeNumber);
  CLI::Option* o_epsilon0 =
      solve->add_option("--epsilon0", epsilon0, "Override starting viscosity");
  CLI::Option* o_ratio =
      solve->add_option("--ratio", ratio, "Override viscosity decay ratio");
  CLI::Option* o_theta = solve->add_option(
      "--theta", theta, "Override streamline-diffusion strength");
  solve->add_flag("--no-boundary-flux-term", no_flux,
                  "Assemble without the viscous boundary flux correction");
  solve->add_flag("--vtk", vtk, "Also write solution.vtk");

  std::string trace_dir, trace_out;
  double tx = 0, ty = 0, trace_step = 0;
  int trace_mode = 1;
  CLI::App* trace = app.add_subcommand(
      "trace", "Trace a steepest-descent path through a saved solution");
  trace->add_option("solution_dir", trace_dir, "Directory written by solve")
      ->required();
  trace->add_option("x", tx, "Start x")->required();
  trace->add_option("y", ty, "Start y")->required();
  trace->add_option("--mode", trace_mode,
                    "1 follows u1 to the goal, 2 follows u2 to the depot")
      ->check(CLI::IsMember({1, 2}));
  trace->add_option("--step", trace_step,
                    "Step length (default: half the mesh size)");
  trace->add_option("--out", trace_out,
                    "Output directory (default: solution_dir)");

  std::string mc_dir;
  double mx = 0, my = 0;
  int mc_mode = 1;
  McConfig mc_cfg;
  CLI::App* mc = app.add_subcommand(
      "mc", "Monte Carlo estimate of the expected cost from a point");
  mc->add_option("solution_dir", mc_dir, "Directory written by solve")
      ->required();
  mc->add_option("x", mx, "Start x")->required();
  mc->add_option("y", my, "Start y")->required();
  mc->add_option("--mode", mc_mode, "Starting mode")
      ->check(CLI::IsMember({1, 2}));
  mc->add_option("--n", mc_cfg.n_samples, "Sample count")
      ->check(CLI::PositiveNumber);
  mc->add_option("--seed", mc_cfg.seed, "RNG seed");
  mc->add_option("--dt", mc_cfg.dt,
                 "Time step (default: mesh size over twice the top speed)");
  mc->add_option("--max-time", mc_cfg.max_time, "Censoring horizon");
  mc->add_option("--capture-radius", mc_cfg.capture_radius,
                 "Goal/depot capture radius override");
  mc->add_option("--threads", mc_cfg.threads,
                 "Worker threads (the estimate is identical for any count)")
      ->check(CLI::PositiveNumber);

  std::string aubry_config;
  int aubry_refine = 0;
  double aubry_tol = 1e-8;
  CLI::App* aubry = app.add_subcommand(
      "aubry", "Report where both right-hand sides vanish (degenerate set)");
  aubry->add_option("config", aubry_config, "Scenario JSON")->required();
  CLI::Option* o_aubry_refine =
      aubry->add_option("--refine", aubry_refine, "Override refinement level")
          ->check(CLI::NonNegativeNumber);
  aubry->add_option("--tol", aubry_tol, "Vanishing tolerance");

  std::string candidate = "min";
  double shift = 0.5, pin_at = 0, pin_value = 0;
  int grid_n = 100;
  double tol_1d = 1e-9;
  CLI::App* verify = app.add_subcommand(
      "verify-1d",
      "Check a piecewise-quadratic candidate for |u'| + u_i - u_j = 2|x| on "
      "(-1, 1) in the viscosity sense");
  verify->add_option("--candidate", candidate,
                     "smooth: 1-x^2; min: min(1-x^2, x^2-C); max: the "
                     "max of the same pair")
      ->check(CLI::IsMember({"smooth", "min", "max"}));
  verify->add_option("--shift", shift, "Family parameter C in (0, 1)");
  verify->add_option("--grid-n", grid_n, "Sample points per smooth piece")
      ->check(CLI::PositiveNumber);
  verify->add_option("--tol", tol_1d, "Acceptance slack");
  CLI::Option* o_at =
      verify->add_option("--at", pin_at, "Pin a point value: location");
  CLI::Option* o_value = verify->add_option("--value", pin_value,
                                            "Pin a point value: required value");
  o_at->needs(o_value);
  o_value->needs(o_at);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*solve) {
      RunConfig cfg = load_config(config_path);
      if (*o_refine) cfg.mesh.refine = refine;
      if (*o_epsilon0) cfg.continuation.epsilon0 = epsilon0;
      if (*o_ratio) cfg.continuation.ratio = ratio;
      if (*o_theta) cfg.continuation.theta = theta;
      if (no_flux) cfg.continuation.boundary_flux_term = false;
      return run_solve(config_path, out_dir, std::move(cfg), vtk);
    }
    if (*trace) return run_trace(trace_dir, tx, ty, trace_mode, trace_step, trace_out);
    if (*mc) return run_mc(mc_dir, mx, my, mc_mode, mc_cfg);
    if (*aubry) {
      RunConfig cfg = load_config(aubry_config);
      if (*o_aubry_refine) cfg.mesh.refine = aubry_refine;
      return run_aubry(cfg, aubry_tol);
    }
    std::optional<std::pair<double, double>> pin;
    if (*o_at) pin = std::pair<double, double>(pin_at, pin_value);
    return run_verify_1d(candidate, shift, grid_n, tol_1d, pin);
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InitializationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

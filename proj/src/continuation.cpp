#include "eikplan/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "eikplan/errors.hpp"
#include "internal/format.hpp"

namespace eikplan {

namespace {

// The constraint rows say exactly this; enforcing them on the iterate keeps
// the pinned values independent of the linear solver's tolerance.
void enforce_constraints(Vector& x, const TriMesh& mesh,
                         const ProblemSpec& spec) {
  const Index n = mesh.n_vertices();
  for (Index v : mesh.goal_vertices) x[v] = 0;
  for (Index v : mesh.depot_vertices)
    x[n + v] = x[v] + spec.repair(mesh.vertices[static_cast<std::size_t>(v)]);
}

std::vector<Real> epsilon_schedule(const ContinuationConfig& cfg, Real eps_min,
                                   bool& reached_min) {
  if (!(cfg.epsilon0 > 0) || !(cfg.ratio > 0) || cfg.ratio >= 1)
    throw ConfigError("continuation: need epsilon0 > 0 and 0 < ratio < 1");
  std::vector<Real> sched;
  Real e = cfg.epsilon0;
  reached_min = false;
  while (static_cast<int>(sched.size()) < cfg.max_outer) {
    sched.push_back(e);
    if (e <= eps_min) {
      reached_min = true;
      break;
    }
    e = std::max(e * cfg.ratio, eps_min);
  }
  return sched;
}

SolveOptions solver_options(const ContinuationConfig& cfg) {
  SolveOptions opts;
  opts.tol = cfg.linear_tol;
  opts.max_iter = cfg.linear_max_iter;
  return opts;
}

}  // namespace

Vector initial_guess(const TriMesh& mesh, const ProblemSpec& spec,
                     const ContinuationConfig& cfg) {
  if (mesh.goal_vertices.empty() || mesh.depot_vertices.empty())
    throw InitializationError("mesh has no marked goal/depot vertices");
  StabilizationParams stab;
  stab.theta = cfg.theta;
  stab.epsilon = cfg.epsilon0;
  stab.grad_floor = cfg.grad_floor;
  // Without transport the retained boundary flux makes the pure-diffusion
  // operator lose coercivity, so the startup system always drops it.
  stab.boundary_flux_term = false;
  const auto z = zero_beta(mesh);
  const BlockSystem sys = assemble_forms(mesh, spec, z, z, stab);
  auto [x, stats] = solve(sys.matrix, sys.rhs, solver_options(cfg));
  if (!x.allFinite())
    throw InitializationError("startup solve produced non-finite values");
  if (!stats.converged)
    throw InitializationError(
        "startup solve did not converge (relative residual " +
        internal::fmt_real(stats.final_relative_residual) + ")");
  enforce_constraints(x, mesh, spec);
  return x;
}

SolutionPair run_continuation(const TriMesh& mesh, const ProblemSpec& spec,
                              const ContinuationConfig& cfg) {
  SolutionPair out;
  out.warnings = validate_problem(spec, mesh);
  const Index n = mesh.n_vertices();

  // A nonempty Aubry set means interior data would be needed for uniqueness;
  // the sweep still runs, but the result is only one admissible solution.
  const AubryReport aubry = aubry_set(spec, mesh, 1e-8);
  if (!aubry.is_empty)
    out.warnings.push_back(
        "Aubry set is nonempty (min1=" + internal::fmt_real(aubry.min1) +
        ", min2=" + internal::fmt_real(aubry.min2) +
        "): solution may not be unique");

  const Real eps_min =
      cfg.epsilon_min > 0 ? cfg.epsilon_min : mesh.max_h();
  bool reached_min = false;
  const std::vector<Real> sched = epsilon_schedule(cfg, eps_min, reached_min);
  if (!reached_min)
    out.warnings.push_back(
        "viscosity schedule truncated by max_outer before reaching its floor");

  const SolveOptions lin_opts = solver_options(cfg);
  Vector x = initial_guess(mesh, spec, cfg);

  bool last_inner_converged = false;
  for (std::size_t outer = 0; outer < sched.size(); ++outer) {
    StepRecord rec;
    rec.outer_step = static_cast<int>(outer);
    rec.epsilon = sched[outer];

    StabilizationParams stab;
    stab.theta = cfg.theta;
    stab.epsilon = sched[outer];
    stab.grad_floor = cfg.grad_floor;
    stab.boundary_flux_term = cfg.boundary_flux_term;

    last_inner_converged = false;
    for (int it = 0; it < cfg.max_inner; ++it) {
      const auto beta1 = compute_beta(x.head(n), mesh, cfg.grad_floor);
      const auto beta2 = compute_beta(x.tail(n), mesh, cfg.grad_floor);
      const BlockSystem sys = assemble_forms(mesh, spec, beta1, beta2, stab);
      auto [xnew, stats] = solve(sys.matrix, sys.rhs, lin_opts, &x);
      if (!xnew.allFinite())
        throw DivergenceError("iterate turned non-finite at eps=" +
                              internal::fmt_real(sched[outer]));
      enforce_constraints(xnew, mesh, spec);
      if (!stats.converged) {
        // Abort the sweep but hand back everything gathered so far.
        out.u1 = x.head(n);
        out.u2 = x.tail(n);
        out.final_epsilon = sched[outer];
        out.converged = false;
        out.message = "linear solver stalled at relative residual " +
                      internal::fmt_real(stats.final_relative_residual) +
                      " (eps=" + internal::fmt_real(sched[outer]) +
                      ", method " + stats.method + ")";
        rec.inner_iters = it + 1;
        rec.lin_iters = stats.iterations;
        rec.lin_residual = stats.final_relative_residual;
        out.history.push_back(std::move(rec));
        return out;
      }

      const Real scale = xnew.cwiseAbs().maxCoeff();
      const Real change =
          (xnew - x).cwiseAbs().maxCoeff() / (scale + Real(1e-30));
      x = std::move(xnew);

      rec.inner_iters = it + 1;
      rec.sup_change = change;
      rec.lin_iters = stats.iterations;
      rec.lin_residual = stats.final_relative_residual;
      rec.inner_changes.push_back(change);
      if (change < cfg.inner_tol) {
        last_inner_converged = true;
        break;
      }
    }

    rec.goal_violation = 0;
    for (Index v : mesh.goal_vertices)
      rec.goal_violation = std::max(rec.goal_violation, std::abs(x[v]));
    rec.depot_violation = 0;
    for (Index v : mesh.depot_vertices)
      rec.depot_violation = std::max(
          rec.depot_violation,
          std::abs(x[n + v] - x[v] -
                   spec.repair(mesh.vertices[static_cast<std::size_t>(v)])));
    rec.mode_gap = (x.head(n) - x.tail(n)).cwiseAbs().maxCoeff();
    out.history.push_back(std::move(rec));
  }

  out.u1 = x.head(n);
  out.u2 = x.tail(n);
  out.final_epsilon = sched.back();
  out.converged = reached_min && last_inner_converged;
  if (out.converged)
    out.message = "converged";
  else if (!reached_min)
    out.message = "stopped before the viscosity floor (max_outer)";
  else
    out.message = "inner iteration did not settle at the final viscosity";
  return out;
}

void export_history_csv(const std::vector<StepRecord>& history,
                        const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "outer_step,epsilon,inner_iters,sup_change,lin_iters,lin_residual\n";
  for (const StepRecord& r : history)
    out << r.outer_step << ',' << internal::fmt_real(r.epsilon) << ','
        << r.inner_iters << ',' << internal::fmt_real(r.sup_change) << ','
        << r.lin_iters << ',' << internal::fmt_real(r.lin_residual) << '\n';
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace eikplan

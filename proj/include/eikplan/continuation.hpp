#pragma once

#include <string>
#include <vector>

#include "eikplan/assembly.hpp"
#include "eikplan/mesh.hpp"
#include "eikplan/problem.hpp"
#include "eikplan/sparse.hpp"
#include "eikplan/types.hpp"

namespace eikplan {

/// Controls the vanishing-viscosity sweep and the inner relinearization
/// loop. epsilon_min <= 0 means "resolve to the mesh size" (max element
/// diameter). linear_* settings are forwarded to the sparse solver.
struct ContinuationConfig {
  Real epsilon0 = 1.0;
  Real ratio = 0.5;
  Real epsilon_min = 0.0;  // <= 0: use mesh.max_h()
  Real inner_tol = 1e-6;   // relative sup-norm change between inner iterates
  int max_inner = 20;
  int max_outer = 50;
  Real theta = 1.0;
  Real grad_floor = 1e-10;
  bool boundary_flux_term = true;
  Real linear_tol = 1e-10;
  int linear_max_iter = 1000;
};

/// One row of the convergence history: an outer (viscosity) step with the
/// inner-loop summary for that epsilon.
struct StepRecord {
  int outer_step = 0;
  Real epsilon = 0;
  int inner_iters = 0;
  Real sup_change = 0;              // last inner relative sup-norm change
  int lin_iters = 0;                // last linear solve iterations
  Real lin_residual = 0;            // last linear solve relative residual
  std::vector<Real> inner_changes;  // all inner changes, in order
  Real goal_violation = 0;          // max |u1| over goal vertices
  Real depot_violation = 0;         // max |u2 - u1 - R| over depot vertices
  Real mode_gap = 0;                // sup |u1 - u2| at the end of the step
};

/// Result of a continuation run: the two value fields plus diagnostics.
struct SolutionPair {
  Vector u1;
  Vector u2;
  Real final_epsilon = 0;
  std::vector<StepRecord> history;
  bool converged = false;
  std::string message;
  std::vector<std::string> warnings;
};

/// Pure diffusion-reaction solve (beta = 0) at epsilon0 used to start the
/// sweep. Always assembles without the boundary flux term, which keeps the
/// startup system uniformly nonsingular.
Vector initial_guess(const TriMesh& mesh, const ProblemSpec& spec,
                     const ContinuationConfig& cfg);

/// Runs the full sweep: for each epsilon in the geometric schedule, iterate
/// freeze-direction / solve until the relative sup-norm change drops below
/// inner_tol. Throws on assembly or solver breakdown; non-convergence of the
/// inner loop at the final epsilon is reported via converged/message instead.
SolutionPair run_continuation(const TriMesh& mesh, const ProblemSpec& spec,
                              const ContinuationConfig& cfg);

/// Writes one CSV row per outer step (plus header) mirroring StepRecord.
void export_history_csv(const std::vector<StepRecord>& history,
                        const std::string& path);

}  // namespace eikplan

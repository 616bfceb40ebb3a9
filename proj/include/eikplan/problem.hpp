#pragma once

#include <string>
#include <vector>

#include "eikplan/field.hpp"
#include "eikplan/mesh.hpp"
#include "eikplan/types.hpp"

namespace eikplan {

/// Two-mode path-planning problem on [0,L]x[0,S].
///
/// f1, f2      speeds in the two operating modes
/// k1, k2      running costs
/// lambda      total-breakdown rate while in mode 1
/// phi1        rate of switching mode 1 -> mode 2 (partial breakdown)
/// phi2        rate of switching mode 2 -> mode 1 (total breakdown)
/// repair      repair cost R
struct ProblemSpec {
  Real length = 0;  ///< L
  Real width = 0;   ///< S

  CoefficientField f1, f2, k1, k2, lambda, phi1, phi2, repair;

  Region goal;
  Region depot;

  Real speed_floor = 1e-6;  ///< solvability guard: f1, f2 >= speed_floor
};

/// Vertex-sampled diagnostic of the set where both k1 + lambda*R and
/// k2 + phi2*R vanish. The set is empty iff either expression stays
/// above the tolerance everywhere.
struct AubryReport {
  Real min1 = 0;  ///< min over vertices of k1 + lambda * R
  Real min2 = 0;  ///< min over vertices of k2 + phi2 * R
  Real tolerance = 0;
  bool is_empty = true;
  std::vector<Index> witnesses;  ///< vertices where both expressions <= tol
};

AubryReport aubry_set(const ProblemSpec& spec, const TriMesh& mesh, Real tol);

/// Hard validation (throws ConfigError) of coefficient sign constraints and
/// the speed floor on mesh vertices; returns soft warnings (zero coupling).
std::vector<std::string> validate_problem(const ProblemSpec& spec,
                                          const TriMesh& mesh);

inline TriMesh mark_regions(TriMesh mesh, const ProblemSpec& spec) {
  return mark_regions(std::move(mesh), spec.goal, spec.depot);
}

}  // namespace eikplan

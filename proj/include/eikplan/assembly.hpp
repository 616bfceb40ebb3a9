#pragma once

#include <utility>
#include <vector>

#include "eikplan/mesh.hpp"
#include "eikplan/problem.hpp"
#include "eikplan/sparse.hpp"
#include "eikplan/types.hpp"

namespace eikplan {

/// Parameters of the stabilized discretization for one linear solve.
///
/// theta               streamline-diffusion constant
/// epsilon             current artificial viscosity
/// grad_floor          regularization added to |grad u| when normalizing
/// boundary_flux_term  keep the -eps (grad u . n, w) boundary integral that
///                     integration by parts leaves on the outer boundary;
///                     switching it off yields the natural-boundary form
struct StabilizationParams {
  Real theta = 1.0;
  Real epsilon = 1.0;
  Real grad_floor = 1e-10;
  bool boundary_flux_term = true;
};

/// Per-element constant gradient of a P1 field and its normalized transport
/// direction beta = g / (|g| + grad_floor).
struct ElementGradientField {
  std::vector<Vector2> raw;
  std::vector<Vector2> beta;
};

ElementGradientField compute_beta(const Vector& u_prev, const TriMesh& mesh,
                                  Real grad_floor);

/// All-zero direction field (pure reaction-diffusion assembly).
ElementGradientField zero_beta(const TriMesh& mesh);

enum class ConstraintType { U1ZeroOnGoal, U2LinkedOnDepot };

/// Coupled 2N-by-2N linear system for one relinearization step. Unknowns
/// 0..N-1 are the mode-1 nodal values, N..2N-1 the mode-2 values.
/// Goal rows pin u1 to zero; depot rows tie u2 to u1 + R.
struct BlockSystem {
  CsrMatrix matrix;
  Vector rhs;
  std::vector<std::pair<Index, ConstraintType>> constrained_rows;
};

/// Assembles the streamline-diffusion block system for the linearized
/// two-mode equations. Coefficients are frozen at element centroids; P1
/// products use exact element formulas. Throws AssemblyError when a
/// coefficient evaluates non-finite.
BlockSystem assemble_forms(const TriMesh& mesh, const ProblemSpec& spec,
                           const ElementGradientField& beta1,
                           const ElementGradientField& beta2,
                           const StabilizationParams& stab);

}  // namespace eikplan

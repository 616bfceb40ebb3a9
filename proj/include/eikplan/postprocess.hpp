#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eikplan/field.hpp"
#include "eikplan/mesh.hpp"
#include "eikplan/problem.hpp"
#include "eikplan/types.hpp"

namespace eikplan {

/// Per-element residuals of the two coupled first-order equations, evaluated
/// with element-constant gradients and centroid coefficients, plus summary
/// statistics over interior elements (no vertex on the outer boundary or in
/// a constrained region).
struct ResidualField {
  std::vector<Real> r1;
  std::vector<Real> r2;
  Real median_interior = 0;  // median over interior elems of max(|r1|,|r2|)
  Real max_interior = 0;
  Real median_interior_r1 = 0;
  Real median_interior_r2 = 0;
  std::size_t n_interior = 0;
};

ResidualField eikonal_residual(const TriMesh& mesh, const ProblemSpec& spec,
                               const Vector& u1, const Vector& u2);

/// Gradient-descent path through a P1 field. line_integrals[i] holds the
/// midpoint-rule integral of the i-th requested coefficient along the path.
struct Trajectory {
  std::vector<Vector2> points;
  Real arc_length = 0;
  bool reached_goal = false;
  Real step_size = 0;
  std::vector<Real> line_integrals;
};

/// Follows -grad u from start at the given step until a target vertex set is
/// entered (Euclidean distance to some target vertex below step), the domain
/// is left, the gradient vanishes, or max_steps runs out. Advances with a
/// midpoint (RK2) rule on the normalized descent direction.
Trajectory trace_trajectory(const Vector& u, const TriMesh& mesh,
                            const Vector2& start, Real step,
                            const std::vector<Index>& targets,
                            int max_steps = 100000, Real grad_floor = 1e-10,
                            const std::vector<const CoefficientField*>&
                                integrands = {});

/// Midpoint-rule line integral of a coefficient along a polyline.
Real line_integral(const CoefficientField& field,
                   const std::vector<Vector2>& points);

enum class ExportFormat { Csv, VtkLegacy };

/// Writes nodal fields as "x,y,<name>" CSV (exactly one field per file) or
/// as a legacy VTK unstructured grid with point data (one file, any number
/// of fields). Values use a fixed 17-significant-digit decimal form so
/// repeated runs are byte-identical.
void export_field(const TriMesh& mesh, const std::vector<const Vector*>& fields,
                  const std::vector<std::string>& names, ExportFormat format,
                  const std::string& path);

/// Reads back an "x,y,value" CSV written by export_field; verifies the
/// coordinates match the mesh to 1e-12 when a mesh is given.
Vector read_field_csv(const std::string& path,
                      const TriMesh* mesh = nullptr);

}  // namespace eikplan

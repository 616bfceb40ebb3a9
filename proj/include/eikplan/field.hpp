#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "eikplan/mesh.hpp"
#include "eikplan/types.hpp"

namespace eikplan {

enum class FieldKind { Constant, GaussianBump, NodalGrid };

/// Spatial coefficient field over the rectangle. Three kinds:
///   constant        value everywhere
///   gaussian-bump   amplitude * exp(-dx (x-cx)^2 - dy (y-cy)^2)
///   nodal-grid      P1 interpolation of per-vertex values on a mesh
struct CoefficientField {
  FieldKind kind = FieldKind::Constant;

  Real value = 0;

  Real amplitude = 0;
  Vector2 center = Vector2::Zero();
  Vector2 decay = Vector2::Zero();

  std::shared_ptr<const TriMesh> grid_mesh;
  Vector nodal;
  std::shared_ptr<const PointLocator> locator;  // built by nodal_grid()

  static CoefficientField constant(Real v);
  static CoefficientField gaussian_bump(Real amplitude, const Vector2& center,
                                        const Vector2& decay);
  static CoefficientField nodal_grid(std::shared_ptr<const TriMesh> mesh,
                                     Vector values);

  /// Point evaluation. Nodal-grid fields throw OutOfDomainError for points
  /// outside their mesh (points within 1e-12 of the domain are clamped).
  Real operator()(const Vector2& p) const;

  /// Fast path used by assembly: nodal-grid fields evaluated at the centroid
  /// of triangle t of their own mesh reduce to a vertex average.
  Real at_centroid(const TriMesh& mesh, Index t) const;
};

std::vector<Real> eval_field(const CoefficientField& field,
                             std::span<const Vector2> points);

}  // namespace eikplan

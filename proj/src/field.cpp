#include "eikplan/field.hpp"

#include <cmath>
#include <utility>

#include "eikplan/errors.hpp"

namespace eikplan {

CoefficientField CoefficientField::constant(Real v) {
  CoefficientField f;
  f.kind = FieldKind::Constant;
  f.value = v;
  return f;
}

CoefficientField CoefficientField::gaussian_bump(Real amplitude,
                                                 const Vector2& center,
                                                 const Vector2& decay) {
  CoefficientField f;
  f.kind = FieldKind::GaussianBump;
  f.amplitude = amplitude;
  f.center = center;
  f.decay = decay;
  return f;
}

CoefficientField CoefficientField::nodal_grid(
    std::shared_ptr<const TriMesh> mesh, Vector values) {
  if (!mesh) throw ConfigError("nodal field: null mesh");
  if (values.size() != mesh->n_vertices())
    throw ConfigError("nodal field: value count does not match vertex count");
  CoefficientField f;
  f.kind = FieldKind::NodalGrid;
  f.locator = std::make_shared<PointLocator>(*mesh);
  f.grid_mesh = std::move(mesh);
  f.nodal = std::move(values);
  return f;
}

namespace {

// Barycentric coordinates of p in triangle t (no clipping).
std::array<Real, 3> barycentric(const TriMesh& mesh, Index t,
                                const Vector2& p) {
  const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
  const Vector2& p0 = mesh.vertices[static_cast<std::size_t>(tri[0])];
  const Vector2& p1 = mesh.vertices[static_cast<std::size_t>(tri[1])];
  const Vector2& p2 = mesh.vertices[static_cast<std::size_t>(tri[2])];
  const Real a2 = 2 * mesh.signed_area(t);
  const Real l0 = ((p1.x() - p.x()) * (p2.y() - p.y()) -
                   (p2.x() - p.x()) * (p1.y() - p.y())) / a2;
  const Real l1 = ((p2.x() - p.x()) * (p0.y() - p.y()) -
                   (p0.x() - p.x()) * (p2.y() - p.y())) / a2;
  return {l0, l1, 1 - l0 - l1};
}

}  // namespace

Real CoefficientField::operator()(const Vector2& p) const {
  switch (kind) {
    case FieldKind::Constant:
      return value;
    case FieldKind::GaussianBump: {
      const Real dx = p.x() - center.x();
      const Real dy = p.y() - center.y();
      return amplitude * std::exp(-decay.x() * dx * dx - decay.y() * dy * dy);
    }
    case FieldKind::NodalGrid: {
      Vector2 q = p;
      const Real clamp_tol = 1e-12;
      if (q.x() > -clamp_tol && q.x() < 0) q.x() = 0;
      if (q.y() > -clamp_tol && q.y() < 0) q.y() = 0;
      if (q.x() < grid_mesh->length + clamp_tol && q.x() > grid_mesh->length)
        q.x() = grid_mesh->length;
      if (q.y() < grid_mesh->width + clamp_tol && q.y() > grid_mesh->width)
        q.y() = grid_mesh->width;
      const Index t = locator->locate(q);
      if (t < 0) throw OutOfDomainError("nodal field evaluated outside its grid");
      const auto lam = barycentric(*grid_mesh, t, q);
      const auto& tri = grid_mesh->triangles[static_cast<std::size_t>(t)];
      return lam[0] * nodal[tri[0]] + lam[1] * nodal[tri[1]] +
             lam[2] * nodal[tri[2]];
    }
  }
  throw ConfigError("coefficient field: unknown kind");
}

Real CoefficientField::at_centroid(const TriMesh& mesh, Index t) const {
  if (kind == FieldKind::NodalGrid && grid_mesh.get() == &mesh) {
    const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
    return (nodal[tri[0]] + nodal[tri[1]] + nodal[tri[2]]) / Real(3);
  }
  return (*this)(mesh.centroid(t));
}

std::vector<Real> eval_field(const CoefficientField& field,
                             std::span<const Vector2> points) {
  std::vector<Real> out;
  out.reserve(points.size());
  for (const Vector2& p : points) out.push_back(field(p));
  return out;
}

}  // namespace eikplan

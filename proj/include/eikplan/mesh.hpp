#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "eikplan/types.hpp"

namespace eikplan {

struct BoundaryEdge {
  Index a = -1;        ///< first endpoint (vertex index)
  Index b = -1;        ///< second endpoint
  Index triangle = -1; ///< owning triangle
  Vector2 normal = Vector2::Zero();  ///< outward unit normal
  Real length = 0;
};

/// Region descriptor: a disc (center + radius) or an explicit vertex list.
/// A nonpositive disc radius means "resolve to 1.5 * max element size".
struct Region {
  enum class Kind { Disc, VertexList };
  Kind kind = Kind::Disc;
  Vector2 center = Vector2::Zero();
  Real radius = 0;
  std::vector<Index> vertices;

  static Region disc(const Vector2& center, Real radius = 0) {
    Region r;
    r.kind = Kind::Disc;
    r.center = center;
    r.radius = radius;
    return r;
  }
  static Region vertex_list(std::vector<Index> verts) {
    Region r;
    r.kind = Kind::VertexList;
    r.vertices = std::move(verts);
    return r;
  }
};

/// Conforming triangulation of the rectangle [0,L]x[0,S].
///
/// Triangles are counterclockwise. Vertex markers record membership in the
/// outer boundary and in the discrete goal/depot sets once mark_regions has
/// run. Meshes are immutable after construction; refinement returns a new
/// mesh.
struct TriMesh {
  std::vector<Vector2> vertices;
  std::vector<std::array<Index, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;

  std::vector<std::uint8_t> on_outer_boundary;  // per vertex
  std::vector<std::uint8_t> in_goal;            // per vertex
  std::vector<std::uint8_t> in_depot;           // per vertex
  std::vector<Index> goal_vertices;             // sorted
  std::vector<Index> depot_vertices;            // sorted

  std::vector<Real> elem_h;  ///< longest edge per triangle
  int refinement_level = 0;
  Real length = 0;  ///< L
  Real width = 0;   ///< S

  Index n_vertices() const { return static_cast<Index>(vertices.size()); }
  Index n_triangles() const { return static_cast<Index>(triangles.size()); }

  Real signed_area(Index t) const {
    const auto& tri = triangles[static_cast<std::size_t>(t)];
    const Vector2& p0 = vertices[static_cast<std::size_t>(tri[0])];
    const Vector2& p1 = vertices[static_cast<std::size_t>(tri[1])];
    const Vector2& p2 = vertices[static_cast<std::size_t>(tri[2])];
    return Real(0.5) * ((p1.x() - p0.x()) * (p2.y() - p0.y()) -
                        (p2.x() - p0.x()) * (p1.y() - p0.y()));
  }
  Vector2 centroid(Index t) const {
    const auto& tri = triangles[static_cast<std::size_t>(t)];
    return (vertices[static_cast<std::size_t>(tri[0])] +
            vertices[static_cast<std::size_t>(tri[1])] +
            vertices[static_cast<std::size_t>(tri[2])]) / Real(3);
  }
  Real max_h() const;
  Real total_area() const;
};

/// Structured grid of nx-by-ny cells, each split into two triangles by the
/// diagonal from lower-left to upper-right.
TriMesh build_rectangle_mesh(Real L, Real S, int nx, int ny);

/// Splits every triangle into four by connecting edge midpoints.
TriMesh refine_uniform(const TriMesh& mesh);

/// Effective radius of a disc region on this mesh (auto = 1.5 * max_h).
Real resolved_radius(const Region& region, const TriMesh& mesh);

/// Marks goal/depot vertex sets and the outer boundary. Throws RegionError
/// if either region captures no vertex.
TriMesh mark_regions(TriMesh mesh, const Region& goal, const Region& depot);

/// Gradients of the three P1 shape functions on triangle t.
std::array<Vector2, 3> shape_gradients(const TriMesh& mesh, Index t);

/// Gradient of the P1 interpolant of nodal values u on triangle t.
Vector2 element_gradient(const TriMesh& mesh, Index t, const Vector& u);

/// Legacy-VTK ASCII dump (POINTS / CELLS / CELL_TYPES, triangle type 5).
void write_vtk_mesh(const TriMesh& mesh, const std::string& path);

/// Uniform-bucket point-to-triangle lookup. Ties on shared edges resolve to
/// the smallest triangle index.
class PointLocator {
 public:
  explicit PointLocator(const TriMesh& mesh);

  /// Index of a triangle containing p, or -1 if p lies outside the mesh
  /// (beyond a small tolerance).
  Index locate(const Vector2& p) const;

 private:
  const TriMesh* mesh_;
  int nx_ = 0, ny_ = 0;
  Real inv_dx_ = 0, inv_dy_ = 0;
  std::vector<std::vector<Index>> buckets_;
};

}  // namespace eikplan

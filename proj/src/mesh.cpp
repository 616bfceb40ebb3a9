#include "eikplan/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <utility>

#include "eikplan/errors.hpp"
#include "internal/format.hpp"

namespace eikplan {

namespace {

Real edge_length(const TriMesh& m, Index a, Index b) {
  return (m.vertices[static_cast<std::size_t>(a)] -
          m.vertices[static_cast<std::size_t>(b)]).norm();
}

// Recomputes everything derivable from vertices + triangles: boundary
// edges with outward normals, per-element sizes, outer-boundary markers.
void finalize(TriMesh& m) {
  const std::size_t nt = m.triangles.size();
  m.elem_h.assign(nt, 0);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tri = m.triangles[t];
    m.elem_h[t] = std::max({edge_length(m, tri[0], tri[1]),
                            edge_length(m, tri[1], tri[2]),
                            edge_length(m, tri[2], tri[0])});
    if (m.signed_area(static_cast<Index>(t)) <= 0)
      throw BuildError("mesh: triangle " + std::to_string(t) +
                       " is degenerate or clockwise");
  }

  // Edges seen once belong to the boundary; keep the orientation the owning
  // triangle gave them so the outward normal is a quarter turn clockwise.
  std::map<std::pair<Index, Index>, std::pair<int, BoundaryEdge>> edges;
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tri = m.triangles[t];
    for (int e = 0; e < 3; ++e) {
      const Index a = tri[e];
      const Index b = tri[(e + 1) % 3];
      auto key = std::minmax(a, b);
      auto& slot = edges[{key.first, key.second}];
      ++slot.first;
      slot.second.a = a;
      slot.second.b = b;
      slot.second.triangle = static_cast<Index>(t);
    }
  }
  m.boundary_edges.clear();
  m.on_outer_boundary.assign(m.vertices.size(), 0);
  for (auto& [key, slot] : edges) {
    if (slot.first != 1) continue;
    BoundaryEdge be = slot.second;
    const Vector2 d = m.vertices[static_cast<std::size_t>(be.b)] -
                      m.vertices[static_cast<std::size_t>(be.a)];
    be.length = d.norm();
    be.normal = Vector2(d.y(), -d.x()) / be.length;
    m.boundary_edges.push_back(be);
    m.on_outer_boundary[static_cast<std::size_t>(be.a)] = 1;
    m.on_outer_boundary[static_cast<std::size_t>(be.b)] = 1;
  }

  m.in_goal.assign(m.vertices.size(), 0);
  m.in_depot.assign(m.vertices.size(), 0);
  m.goal_vertices.clear();
  m.depot_vertices.clear();
}

}  // namespace

Real TriMesh::max_h() const {
  Real h = 0;
  for (Real e : elem_h) h = std::max(h, e);
  return h;
}

Real TriMesh::total_area() const {
  Real a = 0;
  for (Index t = 0; t < n_triangles(); ++t) a += signed_area(t);
  return a;
}

TriMesh build_rectangle_mesh(Real L, Real S, int nx, int ny) {
  if (!(L > 0) || !(S > 0)) throw DomainError("mesh: domain sides must be positive");
  if (nx < 1 || ny < 1) throw BuildError("mesh: need at least one cell per side");

  TriMesh m;
  m.length = L;
  m.width = S;
  m.vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.vertices.emplace_back(L * i / nx, S * j / ny);

  auto vid = [nx](int i, int j) { return static_cast<Index>(j * (nx + 1) + i); };
  m.triangles.reserve(static_cast<std::size_t>(2 * nx * ny));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Index v00 = vid(i, j), v10 = vid(i + 1, j);
      const Index v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      m.triangles.push_back({v00, v10, v11});
      m.triangles.push_back({v00, v11, v01});
    }

  finalize(m);
  return m;
}

TriMesh refine_uniform(const TriMesh& mesh) {
  TriMesh m;
  m.length = mesh.length;
  m.width = mesh.width;
  m.refinement_level = mesh.refinement_level + 1;
  m.vertices = mesh.vertices;  // parents keep their indices

  std::map<std::pair<Index, Index>, Index> midpoint;
  auto mid = [&](Index a, Index b) {
    auto key = std::minmax(a, b);
    auto it = midpoint.find({key.first, key.second});
    if (it != midpoint.end()) return it->second;
    const Index id = static_cast<Index>(m.vertices.size());
    m.vertices.push_back((mesh.vertices[static_cast<std::size_t>(a)] +
                          mesh.vertices[static_cast<std::size_t>(b)]) / 2);
    midpoint.emplace(std::make_pair(key.first, key.second), id);
    return id;
  };

  m.triangles.reserve(mesh.triangles.size() * 4);
  for (const auto& tri : mesh.triangles) {
    const Index m01 = mid(tri[0], tri[1]);
    const Index m12 = mid(tri[1], tri[2]);
    const Index m20 = mid(tri[2], tri[0]);
    m.triangles.push_back({tri[0], m01, m20});
    m.triangles.push_back({tri[1], m12, m01});
    m.triangles.push_back({tri[2], m20, m12});
    m.triangles.push_back({m01, m12, m20});
  }

  finalize(m);
  return m;
}

Real resolved_radius(const Region& region, const TriMesh& mesh) {
  if (region.kind == Region::Kind::Disc && region.radius > 0)
    return region.radius;
  return Real(1.5) * mesh.max_h();
}

TriMesh mark_regions(TriMesh mesh, const Region& goal, const Region& depot) {
  auto mark = [&mesh](const Region& r, std::vector<std::uint8_t>& mask,
                      std::vector<Index>& list, const char* what) {
    mask.assign(mesh.vertices.size(), 0);
    list.clear();
    if (r.kind == Region::Kind::Disc) {
      const Real rad = resolved_radius(r, mesh);
      for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
        if ((mesh.vertices[v] - r.center).norm() <= rad) {
          mask[v] = 1;
          list.push_back(static_cast<Index>(v));
        }
    } else {
      for (Index v : r.vertices) {
        if (v < 0 || v >= mesh.n_vertices())
          throw RegionError(std::string(what) + " region: vertex index out of range");
        if (!mask[static_cast<std::size_t>(v)]) {
          mask[static_cast<std::size_t>(v)] = 1;
          list.push_back(v);
        }
      }
      std::sort(list.begin(), list.end());
    }
    if (list.empty())
      throw RegionError(std::string(what) +
                        " region captures no mesh vertex; enlarge it or refine");
  };
  mark(goal, mesh.in_goal, mesh.goal_vertices, "goal");
  mark(depot, mesh.in_depot, mesh.depot_vertices, "depot");
  return mesh;
}

std::array<Vector2, 3> shape_gradients(const TriMesh& mesh, Index t) {
  const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
  const Real inv2a = 1 / (2 * mesh.signed_area(t));
  std::array<Vector2, 3> g;
  for (int i = 0; i < 3; ++i) {
    const Vector2 opp =
        mesh.vertices[static_cast<std::size_t>(tri[(i + 2) % 3])] -
        mesh.vertices[static_cast<std::size_t>(tri[(i + 1) % 3])];
    g[static_cast<std::size_t>(i)] = Vector2(-opp.y(), opp.x()) * inv2a;
  }
  return g;
}

Vector2 element_gradient(const TriMesh& mesh, Index t, const Vector& u) {
  const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
  const auto g = shape_gradients(mesh, t);
  return u[tri[0]] * g[0] + u[tri[1]] * g[1] + u[tri[2]] * g[2];
}

void write_vtk_mesh(const TriMesh& mesh, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "# vtk DataFile Version 3.0\ntriangulation\nASCII\n"
      << "DATASET UNSTRUCTURED_GRID\n"
      << "POINTS " << mesh.n_vertices() << " double\n";
  for (const Vector2& p : mesh.vertices)
    out << internal::fmt_real(p.x()) << ' ' << internal::fmt_real(p.y())
        << " 0\n";
  out << "CELLS " << mesh.n_triangles() << ' ' << 4 * mesh.n_triangles()
      << '\n';
  for (const auto& tri : mesh.triangles)
    out << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  out << "CELL_TYPES " << mesh.n_triangles() << '\n';
  for (Index t = 0; t < mesh.n_triangles(); ++t) out << "5\n";
  if (!out) throw IoError("failed writing " + path);
}

PointLocator::PointLocator(const TriMesh& mesh) : mesh_(&mesh) {
  const int n = std::max(1, static_cast<int>(std::sqrt(
                                static_cast<double>(mesh.n_triangles()) / 2)));
  nx_ = n;
  ny_ = std::max(1, static_cast<int>(n * mesh.width / mesh.length));
  inv_dx_ = nx_ / mesh.length;
  inv_dy_ = ny_ / mesh.width;
  buckets_.assign(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_),
                  {});
  auto cell_of = [this](Real x, Real inv, int n_cells) {
    int c = static_cast<int>(std::floor(x * inv));
    return std::clamp(c, 0, n_cells - 1);
  };
  for (Index t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
    Real x0 = mesh.length, x1 = 0, y0 = mesh.width, y1 = 0;
    for (Index v : tri) {
      const Vector2& p = mesh.vertices[static_cast<std::size_t>(v)];
      x0 = std::min(x0, p.x());
      x1 = std::max(x1, p.x());
      y0 = std::min(y0, p.y());
      y1 = std::max(y1, p.y());
    }
    for (int j = cell_of(y0, inv_dy_, ny_); j <= cell_of(y1, inv_dy_, ny_); ++j)
      for (int i = cell_of(x0, inv_dx_, nx_); i <= cell_of(x1, inv_dx_, nx_);
           ++i)
        buckets_[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) +
                 static_cast<std::size_t>(i)]
            .push_back(t);
  }
}

Index PointLocator::locate(const Vector2& p) const {
  const TriMesh& m = *mesh_;
  if (p.x() < -1e-12 || p.y() < -1e-12 || p.x() > m.length + 1e-12 ||
      p.y() > m.width + 1e-12)
    return -1;
  const int i = std::clamp(static_cast<int>(std::floor(p.x() * inv_dx_)), 0,
                           nx_ - 1);
  const int j = std::clamp(static_cast<int>(std::floor(p.y() * inv_dy_)), 0,
                           ny_ - 1);
  const auto& bucket =
      buckets_[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) +
               static_cast<std::size_t>(i)];
  // Bucket lists are built in ascending triangle order, so the first hit is
  // the smallest containing index (stable tie-breaking on shared edges).
  for (Index t : bucket) {
    const auto& tri = m.triangles[static_cast<std::size_t>(t)];
    const Vector2& p0 = m.vertices[static_cast<std::size_t>(tri[0])];
    const Vector2& p1 = m.vertices[static_cast<std::size_t>(tri[1])];
    const Vector2& p2 = m.vertices[static_cast<std::size_t>(tri[2])];
    const Real a2 = 2 * m.signed_area(t);
    const Real l0 = ((p1.x() - p.x()) * (p2.y() - p.y()) -
                     (p2.x() - p.x()) * (p1.y() - p.y())) / a2;
    const Real l1 = ((p2.x() - p.x()) * (p0.y() - p.y()) -
                     (p0.x() - p.x()) * (p2.y() - p.y())) / a2;
    const Real l2 = 1 - l0 - l1;
    const Real tol = -1e-10;
    if (l0 >= tol && l1 >= tol && l2 >= tol) return t;
  }
  return -1;
}

}  // namespace eikplan

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "eikplan/errors.hpp"
#include "eikplan/mesh.hpp"
#include "helpers.hpp"

using namespace eikplan;

namespace {

// Conformity: interior edges shared by exactly two triangles with opposite
// orientation, boundary edges by exactly one.
void check_conforming(const TriMesh& mesh) {
  std::map<std::pair<Index, Index>, int> directed;
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k) {
      const Index a = t[static_cast<std::size_t>(k)];
      const Index b = t[static_cast<std::size_t>((k + 1) % 3)];
      ++directed[{a, b}];
    }
  int boundary = 0;
  for (const auto& [edge, count] : directed) {
    REQUIRE(count == 1);  // a directed edge never repeats
    const auto rev = directed.find({edge.second, edge.first});
    if (rev == directed.end())
      ++boundary;
    else
      REQUIRE(rev->second == 1);
  }
  CHECK(boundary == static_cast<int>(mesh.boundary_edges.size()));
}

}  // namespace

TEST_CASE("base rectangle counts") {
  const TriMesh mesh = build_rectangle_mesh(2.0, 1.0, 2, 1);
  CHECK(mesh.n_vertices() == 6);
  CHECK(mesh.n_triangles() == 4);
  check_conforming(mesh);
}

TEST_CASE("structured grid matching seven refinements of the 2x1 base") {
  const TriMesh mesh = build_rectangle_mesh(2.0, 1.0, 256, 128);
  CHECK(mesh.n_vertices() == 33153);
  CHECK(mesh.n_triangles() == 65536);
}

TEST_CASE("unit square splits into two half-area triangles") {
  const TriMesh mesh = build_rectangle_mesh(1.0, 1.0, 1, 1);
  REQUIRE(mesh.n_triangles() == 2);
  CHECK(mesh.signed_area(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mesh.signed_area(1) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("nonpositive domain is rejected") {
  CHECK_THROWS_AS(build_rectangle_mesh(0.0, 1.0, 1, 1), DomainError);
  CHECK_THROWS_AS(build_rectangle_mesh(2.0, -1.0, 1, 1), DomainError);
}

TEST_CASE("uniform refinement quadruples triangles and halves h") {
  const TriMesh coarse = build_rectangle_mesh(2.0, 1.0, 2, 1);
  const TriMesh fine = refine_uniform(coarse);
  CHECK(fine.n_triangles() == 16);
  CHECK(fine.refinement_level == coarse.refinement_level + 1);
  CHECK(fine.max_h() == doctest::Approx(0.5 * coarse.max_h()).epsilon(1e-15));
  CHECK(fine.total_area() == doctest::Approx(coarse.total_area()).epsilon(1e-12));
  check_conforming(fine);

  SUBCASE("orientation preserved through repeated refinement") {
    TriMesh mesh = fine;
    for (int i = 0; i < 3; ++i) {
      mesh = refine_uniform(mesh);
      for (Index t = 0; t < mesh.n_triangles(); ++t)
        REQUIRE(mesh.signed_area(t) > 0);
    }
    CHECK(mesh.total_area() == doctest::Approx(2.0).epsilon(1e-12));
    check_conforming(mesh);
  }
}

TEST_CASE("euler relation holds on the refined rectangle") {
  TriMesh mesh = build_rectangle_mesh(2.0, 1.0, 2, 1);
  mesh = refine_uniform(refine_uniform(mesh));
  std::set<std::pair<Index, Index>> edges;
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k) {
      const Index a = t[static_cast<std::size_t>(k)];
      const Index b = t[static_cast<std::size_t>((k + 1) % 3)];
      edges.insert(std::minmax(a, b));
    }
  const long v = mesh.n_vertices();
  const long e = static_cast<long>(edges.size());
  const long f = mesh.n_triangles();
  CHECK(v - e + f == 1);
}

TEST_CASE("boundary edges form one closed outward-facing loop") {
  TriMesh mesh = refine_uniform(build_rectangle_mesh(2.0, 1.0, 2, 1));
  std::map<Index, Index> next;
  for (const BoundaryEdge& e : mesh.boundary_edges) {
    CHECK(next.emplace(e.a, e.b).second);  // each start vertex used once
    // Outward normal: stepping off the midpoint leaves the rectangle.
    const Vector2 mid =
        0.5 * (mesh.vertices[static_cast<std::size_t>(e.a)] +
               mesh.vertices[static_cast<std::size_t>(e.b)]);
    const Vector2 outside = mid + 1e-6 * e.normal;
    const bool left = outside.x() < 0 || outside.x() > mesh.length ||
                      outside.y() < 0 || outside.y() > mesh.width;
    CHECK(left);
    CHECK(e.normal.norm() == doctest::Approx(1.0).epsilon(1e-14));
  }
  // Single closed loop covering every boundary vertex exactly once.
  const Index start = mesh.boundary_edges.front().a;
  Index cur = start;
  std::size_t steps = 0;
  do {
    cur = next.at(cur);
    ++steps;
    REQUIRE(steps <= mesh.boundary_edges.size());
  } while (cur != start);
  CHECK(steps == mesh.boundary_edges.size());
}

TEST_CASE("region marking on the breakdown scenario") {
  const ProblemSpec spec = testing::road_spec();
  const TriMesh mesh = testing::marked_mesh(spec, 4);
  REQUIRE_FALSE(mesh.goal_vertices.empty());
  REQUIRE_FALSE(mesh.depot_vertices.empty());
  CHECK(mesh.goal_vertices == mesh.depot_vertices);  // coinciding discs

  // The vertex nearest the center is marked.
  Index nearest = 0;
  Real best = 1e30;
  for (Index v = 0; v < mesh.n_vertices(); ++v) {
    const Real d = (mesh.vertices[static_cast<std::size_t>(v)] -
                    Vector2(1.9, 0.5))
                       .norm();
    if (d < best) {
      best = d;
      nearest = v;
    }
  }
  CHECK(std::binary_search(mesh.goal_vertices.begin(),
                           mesh.goal_vertices.end(), nearest));
}

TEST_CASE("marking fails when the disc captures nothing") {
  ProblemSpec spec = testing::road_spec();
  spec.goal = Region::disc({5.0, 5.0}, 0.01);  // far outside
  TriMesh mesh = build_rectangle_mesh(spec.length, spec.width, 2, 1);
  mesh = refine_uniform(mesh);
  CHECK_THROWS_AS(mark_regions(std::move(mesh), spec), RegionError);
}

TEST_CASE("marked vertices persist as a superset under refinement") {
  ProblemSpec spec = testing::road_spec();
  spec.goal = Region::disc({1.9, 0.5}, 0.2);  // fixed radius, not mesh-tied
  spec.depot = spec.goal;
  const TriMesh coarse = testing::marked_mesh(spec, 3);
  const TriMesh fine = testing::marked_mesh(spec, 4);
  // Coarse vertices keep their indices under midpoint refinement.
  for (const Index v : coarse.goal_vertices)
    CHECK(std::binary_search(fine.goal_vertices.begin(),
                             fine.goal_vertices.end(), v));
}

TEST_CASE("point location returns the lowest-index containing triangle") {
  const TriMesh mesh = refine_uniform(build_rectangle_mesh(2.0, 1.0, 2, 1));
  const PointLocator locator(mesh);

  // A strictly interior point of some triangle: locate agrees with direct
  // containment scan.
  const Vector2 p(0.31, 0.44);
  const Index found = locator.locate(p);
  REQUIRE(found >= 0);
  Index first_hit = -1;
  for (Index t = 0; t < mesh.n_triangles() && first_hit < 0; ++t) {
    const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
    const Vector2 a = mesh.vertices[static_cast<std::size_t>(tri[0])];
    const Vector2 b = mesh.vertices[static_cast<std::size_t>(tri[1])];
    const Vector2 c = mesh.vertices[static_cast<std::size_t>(tri[2])];
    const Real area = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
    const Real w0 = ((b - p).x() * (c - p).y() - (b - p).y() * (c - p).x()) / area;
    const Real w1 = ((c - p).x() * (a - p).y() - (c - p).y() * (a - p).x()) / area;
    const Real w2 = 1 - w0 - w1;
    if (w0 >= 0 && w1 >= 0 && w2 >= 0) first_hit = t;
  }
  CHECK(found == first_hit);

  SUBCASE("vertices and edges resolve to the smallest incident triangle") {
    // A shared vertex belongs to several triangles; ties break low.
    const Vector2 shared = mesh.vertices[4];
    const Index t = locator.locate(shared);
    REQUIRE(t >= 0);
    Index lowest = -1;
    for (Index k = 0; k < mesh.n_triangles() && lowest < 0; ++k) {
      const auto& tri = mesh.triangles[static_cast<std::size_t>(k)];
      for (int j = 0; j < 3; ++j) {
        const Vector2& q =
            mesh.vertices[static_cast<std::size_t>(tri[static_cast<std::size_t>(j)])];
        if ((q - shared).norm() == 0) {
          lowest = k;
          break;
        }
      }
    }
    CHECK(t == lowest);
  }
  SUBCASE("outside points are reported") {
    CHECK(locator.locate({-0.5, 0.5}) < 0);
    CHECK(locator.locate({2.5, 0.5}) < 0);
  }
}

TEST_CASE("element shape gradients sum to zero and recover linears") {
  const TriMesh mesh = build_rectangle_mesh(1.0, 1.0, 1, 1);
  for (Index t = 0; t < mesh.n_triangles(); ++t) {
    const auto g = shape_gradients(mesh, t);
    CHECK((g[0] + g[1] + g[2]).norm() == doctest::Approx(0.0).epsilon(1e-14));
  }
  // Nodal values of u(x,y) = 3x + 4y - 1 reproduce the exact gradient.
  Vector u(mesh.n_vertices());
  for (Index v = 0; v < mesh.n_vertices(); ++v) {
    const Vector2& p = mesh.vertices[static_cast<std::size_t>(v)];
    u[v] = 3 * p.x() + 4 * p.y() - 1;
  }
  for (Index t = 0; t < mesh.n_triangles(); ++t) {
    const Vector2 g = element_gradient(mesh, t, u);
    CHECK(g.x() == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(g.y() == doctest::Approx(4.0).epsilon(1e-13));
  }
}

TEST_CASE("legacy vtk dump carries the right counts") {
  const TriMesh mesh = refine_uniform(build_rectangle_mesh(2.0, 1.0, 2, 1));
  const std::string path = testing::scratch_dir("vtk") + ".vtk";
  write_vtk_mesh(mesh, path);
  const std::string text = testing::slurp(path);
  CHECK(text.find("POINTS 15 double") != std::string::npos);
  CHECK(text.find("CELLS 16") != std::string::npos);
  CHECK(text.find("CELL_TYPES 16") != std::string::npos);
  std::remove(path.c_str());
}

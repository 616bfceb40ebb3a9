#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "eikplan/errors.hpp"
#include "eikplan/postprocess.hpp"
#include "helpers.hpp"

using namespace eikplan;

namespace {

Vector distance_to(const TriMesh& mesh, const Vector2& p) {
  Vector u(mesh.n_vertices());
  for (Index v = 0; v < mesh.n_vertices(); ++v)
    u[v] = (mesh.vertices[static_cast<std::size_t>(v)] - p).norm();
  return u;
}

}  // namespace

TEST_CASE("equation residuals on hand-checkable fields") {
  const ProblemSpec spec = testing::distance_spec();  // K = 1, unit speed
  const TriMesh mesh = testing::marked_mesh(spec, 3);
  const Vector zero = Vector::Zero(mesh.n_vertices());

  SUBCASE("flat zero field misses the running cost by exactly one") {
    const ResidualField res = eikonal_residual(mesh, spec, zero, zero);
    REQUIRE(res.r1.size() == mesh.triangles.size());
    for (std::size_t t = 0; t < res.r1.size(); ++t) {
      CHECK(res.r1[t] == -1.0);
      CHECK(res.r2[t] == -1.0);
    }
    CHECK(res.median_interior == 1.0);
    CHECK(res.max_interior == 1.0);
  }

  SUBCASE("interior statistics skip boundary and region elements") {
    const ResidualField res = eikonal_residual(mesh, spec, zero, zero);
    CHECK(res.n_interior > 0);
    CHECK(res.n_interior < mesh.triangles.size());
    std::size_t expected = 0;
    for (const auto& tri : mesh.triangles) {
      bool interior = true;
      for (Index v : tri)
        if (mesh.on_outer_boundary[static_cast<std::size_t>(v)] ||
            mesh.in_goal[static_cast<std::size_t>(v)] ||
            mesh.in_depot[static_cast<std::size_t>(v)])
          interior = false;
      if (interior) ++expected;
    }
    CHECK(res.n_interior == expected);
  }

  SUBCASE("size mismatch is rejected") {
    CHECK_THROWS_AS(eikonal_residual(mesh, spec, Vector::Zero(3), zero),
                    ParameterError);
  }
}

TEST_CASE("identical modes silence the coupling term") {
  ProblemSpec coupled = testing::distance_spec();
  coupled.phi1 = CoefficientField::constant(5.0);
  coupled.phi2 = CoefficientField::constant(2.0);
  const ProblemSpec plain = testing::distance_spec();
  const TriMesh mesh = testing::marked_mesh(plain, 3);

  Vector u(mesh.n_vertices());
  std::mt19937 gen(5);
  std::uniform_real_distribution<Real> val(-1.0, 1.0);
  for (Index v = 0; v < mesh.n_vertices(); ++v) u[v] = val(gen);

  const ResidualField with = eikonal_residual(mesh, coupled, u, u);
  const ResidualField without = eikonal_residual(mesh, plain, u, u);
  for (std::size_t t = 0; t < with.r1.size(); ++t) {
    CHECK(with.r1[t] == without.r1[t]);
    CHECK(with.r2[t] == without.r2[t]);
  }
}

TEST_CASE("exact distance field almost solves the decoupled equation") {
  const ProblemSpec spec = testing::distance_spec();
  const TriMesh mesh = testing::marked_mesh(spec, 5);
  REQUIRE_FALSE(mesh.goal_vertices.empty());
  const Vector2 gv =
      mesh.vertices[static_cast<std::size_t>(mesh.goal_vertices[0])];
  const Vector u = distance_to(mesh, gv);
  const ResidualField res = eikonal_residual(mesh, spec, u, u);
  for (Real r : res.r1) CHECK(std::isfinite(r));
  // |grad dist| = 1 exactly; P1 interpolation spoils it only near the cone
  // tip, which the median shrugs off.
  CHECK(res.median_interior <= 0.05);
  CHECK(res.median_interior_r1 <= 0.05);
}

TEST_CASE("gradient descent follows the distance cone to its tip") {
  const ProblemSpec spec = testing::distance_spec();
  const TriMesh mesh = testing::marked_mesh(spec, 5);
  // A single target vertex keeps the capture point unambiguous; the marked
  // goal region would stop the trace at whichever member it brushes first.
  Index tip = 0;
  Real best = (mesh.vertices[0] - Vector2(1.9, 0.5)).norm();
  for (Index v = 1; v < mesh.n_vertices(); ++v) {
    const Real d =
        (mesh.vertices[static_cast<std::size_t>(v)] - Vector2(1.9, 0.5)).norm();
    if (d < best) {
      best = d;
      tip = v;
    }
  }
  const std::vector<Index> targets = {tip};
  const Vector2 gv = mesh.vertices[static_cast<std::size_t>(tip)];
  const Vector u = distance_to(mesh, gv);
  const Real step = 0.01;
  const Vector2 start(0.9, 0.5);

  const Trajectory traj = trace_trajectory(u, mesh, start, step, targets);

  SUBCASE("reaches the goal along a nearly straight segment") {
    CHECK(traj.reached_goal);
    CHECK(traj.step_size == step);
    const Real exact = (gv - start).norm();
    CHECK(std::abs(traj.arc_length - exact) <= 2 * step);
    for (const Vector2& p : traj.points) CHECK(std::abs(p.y() - 0.5) <= 0.05);
    CHECK(traj.points.back().x() > gv.x() - 2 * step);
  }

  SUBCASE("step bound and domain containment hold pointwise") {
    REQUIRE(traj.points.size() >= 2);
    for (std::size_t i = 0; i + 1 < traj.points.size(); ++i) {
      CHECK((traj.points[i + 1] - traj.points[i]).norm() <=
            step * (1 + 1e-6));
    }
    for (const Vector2& p : traj.points) {
      CHECK(p.x() >= 0.0);
      CHECK(p.x() <= mesh.length);
      CHECK(p.y() >= 0.0);
      CHECK(p.y() <= mesh.width);
    }
  }

  SUBCASE("two traces agree bit for bit") {
    const Trajectory again =
        trace_trajectory(u, mesh, start, step, targets);
    REQUIRE(again.points.size() == traj.points.size());
    for (std::size_t i = 0; i < traj.points.size(); ++i) {
      CHECK(again.points[i].x() == traj.points[i].x());
      CHECK(again.points[i].y() == traj.points[i].y());
    }
    CHECK(again.arc_length == traj.arc_length);
  }

  SUBCASE("starting inside the target is a one-point trajectory") {
    const Trajectory at_goal =
        trace_trajectory(u, mesh, gv, step, targets);
    CHECK(at_goal.points.size() == 1);
    CHECK(at_goal.reached_goal);
    CHECK(at_goal.arc_length == 0.0);
  }

  SUBCASE("flat field stalls immediately and reports it") {
    const Vector flat = Vector::Constant(mesh.n_vertices(), 2.0);
    const Trajectory stuck =
        trace_trajectory(flat, mesh, start, step, targets);
    CHECK(stuck.points.size() == 1);
    CHECK_FALSE(stuck.reached_goal);
    CHECK(stuck.arc_length == 0.0);
  }

  SUBCASE("bad inputs are rejected") {
    CHECK_THROWS_AS(trace_trajectory(u, mesh, {2.5, 0.5}, step,
                                     targets),
                    OutOfDomainError);
    CHECK_THROWS_AS(trace_trajectory(u, mesh, start, 0.0,
                                     targets),
                    ParameterError);
    CHECK_THROWS_AS(trace_trajectory(Vector::Zero(3), mesh, start, step,
                                     targets),
                    ParameterError);
  }

  SUBCASE("a constant integrand integrates to the arc length") {
    const CoefficientField c = CoefficientField::constant(3.0);
    const Trajectory with_integral = trace_trajectory(
        u, mesh, start, step, targets, 100000, 1e-10, {&c});
    REQUIRE(with_integral.line_integrals.size() == 1);
    CHECK(with_integral.line_integrals[0] ==
          doctest::Approx(3.0 * with_integral.arc_length).epsilon(1e-12));
  }
}

TEST_CASE("midpoint line integral matches the closed form of a bump") {
  // integral of 7 exp(-5(x-1)^2 - 5 y^2) along y = 0.5 from x=0 to x=2:
  // 7 exp(-1.25) sqrt(pi/5) erf(sqrt(5))
  const CoefficientField bump =
      CoefficientField::gaussian_bump(7.0, {1.0, 0.0}, {5.0, 5.0});
  std::vector<Vector2> line;
  const int n = 2000;
  for (int i = 0; i <= n; ++i)
    line.emplace_back(2.0 * i / n, 0.5);
  const Real exact =
      7.0 * std::exp(-1.25) * std::sqrt(M_PI / 5.0) * std::erf(std::sqrt(5.0));
  CHECK(line_integral(bump, line) == doctest::Approx(exact).epsilon(1e-5));

  SUBCASE("degenerate polylines integrate to zero") {
    CHECK(line_integral(bump, {}) == 0.0);
    CHECK(line_integral(bump, {{1.0, 0.5}}) == 0.0);
  }
}

TEST_CASE("field export round-trips and stays byte-stable") {
  const TriMesh mesh = build_rectangle_mesh(2.0, 1.0, 2, 1);

  SUBCASE("CSV rows come out in vertex order") {
    Vector u(mesh.n_vertices());
    for (Index v = 0; v < mesh.n_vertices(); ++v) u[v] = v;
    const std::string path = testing::scratch_dir("csv") + ".csv";
    export_field(mesh, {&u}, {"u"}, ExportFormat::Csv, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "x,y,u");
    std::size_t rows = 0;
    while (std::getline(in, line))
      if (!line.empty()) ++rows;
    CHECK(rows == static_cast<std::size_t>(mesh.n_vertices()));
    const Vector back = read_field_csv(path, &mesh);
    for (Index v = 0; v < mesh.n_vertices(); ++v) CHECK(back[v] == u[v]);
    std::remove(path.c_str());
  }

  SUBCASE("awkward values survive the decimal round-trip exactly") {
    Vector u(mesh.n_vertices());
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<Real> val(-10.0, 10.0);
    for (Index v = 0; v < mesh.n_vertices(); ++v)
      u[v] = val(gen) / 3.0;  // force non-terminating decimals
    const std::string path = testing::scratch_dir("rt") + ".csv";
    export_field(mesh, {&u}, {"u"}, ExportFormat::Csv, path);
    const Vector back = read_field_csv(path, &mesh);
    REQUIRE(back.size() == u.size());
    for (Index v = 0; v < mesh.n_vertices(); ++v)
      CHECK(std::abs(back[v] - u[v]) <= 1e-12 * std::abs(u[v]));
    std::remove(path.c_str());
  }

  SUBCASE("identical inputs give identical bytes") {
    Vector u(mesh.n_vertices());
    for (Index v = 0; v < mesh.n_vertices(); ++v)
      u[v] = std::sin(static_cast<Real>(v));
    const std::string a = testing::scratch_dir("ba") + ".csv";
    const std::string b = testing::scratch_dir("bb") + ".csv";
    export_field(mesh, {&u}, {"u"}, ExportFormat::Csv, a);
    export_field(mesh, {&u}, {"u"}, ExportFormat::Csv, b);
    CHECK(testing::slurp(a) == testing::slurp(b));
    std::remove(a.c_str());
    std::remove(b.c_str());
  }

  SUBCASE("legacy VTK carries every requested field") {
    Vector u = Vector::Zero(mesh.n_vertices());
    Vector w = Vector::Ones(mesh.n_vertices());
    const std::string path = testing::scratch_dir("pvtk") + ".vtk";
    export_field(mesh, {&u, &w}, {"u1", "u2"}, ExportFormat::VtkLegacy, path);
    const std::string text = testing::slurp(path);
    CHECK(text.find("POINTS 6 double") != std::string::npos);
    CHECK(text.find("CELL_TYPES 4") != std::string::npos);
    CHECK(text.find("POINT_DATA 6") != std::string::npos);
    CHECK(text.find("SCALARS u1 double 1") != std::string::npos);
    CHECK(text.find("SCALARS u2 double 1") != std::string::npos);
    std::remove(path.c_str());
  }

  SUBCASE("CSV export takes exactly one field") {
    Vector u = Vector::Zero(mesh.n_vertices());
    Vector w = Vector::Zero(mesh.n_vertices());
    CHECK_THROWS_AS(export_field(mesh, {&u, &w}, {"a", "b"},
                                 ExportFormat::Csv, "/tmp/x.csv"),
                    ParameterError);
    CHECK_THROWS_AS(export_field(mesh, {&u}, {"a", "b"},
                                 ExportFormat::Csv, "/tmp/x.csv"),
                    ParameterError);
  }

  SUBCASE("reading against the wrong mesh is caught") {
    Vector u = Vector::Zero(mesh.n_vertices());
    const std::string path = testing::scratch_dir("wm") + ".csv";
    export_field(mesh, {&u}, {"u"}, ExportFormat::Csv, path);
    const TriMesh finer = refine_uniform(mesh);
    CHECK_THROWS_AS(read_field_csv(path, &finer), IoError);
    std::remove(path.c_str());
  }

  SUBCASE("unwritable paths raise an I/O error") {
    Vector u = Vector::Zero(mesh.n_vertices());
    CHECK_THROWS_AS(export_field(mesh, {&u}, {"u"}, ExportFormat::Csv,
                                 "/nonexistent_dir_zz/u.csv"),
                    IoError);
    CHECK_THROWS_AS(read_field_csv("/nonexistent_dir_zz/u.csv"), IoError);
  }
}

#include <doctest.h>

#include <cmath>
#include <memory>

#include "eikplan/errors.hpp"
#include "eikplan/field.hpp"
#include "eikplan/mesh.hpp"
#include "eikplan/problem.hpp"
#include "helpers.hpp"

using namespace eikplan;

TEST_CASE("constant field returns its value everywhere") {
  const CoefficientField f = CoefficientField::constant(1.0);
  CHECK(f({0.0, 0.0}) == 1.0);
  CHECK(f({1.7, 0.3}) == 1.0);
  CHECK(f({2.0, 1.0}) == 1.0);
}

TEST_CASE("gaussian bump attains its amplitude at the center") {
  const CoefficientField f =
      CoefficientField::gaussian_bump(7.0, {1.0, 0.0}, {5.0, 5.0});
  CHECK(f({1.0, 0.0}) == 7.0);
  // One unit from the center along x: 7 e^{-5}.
  CHECK(f({0.0, 0.0}) ==
        doctest::Approx(0.047165628993598269).epsilon(1e-15));
  CHECK(f({2.0, 0.0}) ==
        doctest::Approx(0.047165628993598269).epsilon(1e-15));
  // Monotone decay away from the center.
  CHECK(f({1.3, 0.0}) < f({1.2, 0.0}));
  CHECK(f({1.0, 0.4}) < f({1.0, 0.3}));
}

TEST_CASE("nodal grid interpolates vertex values linearly") {
  auto mesh = std::make_shared<TriMesh>(build_rectangle_mesh(2.0, 1.0, 2, 1));
  Vector values(mesh->n_vertices());
  for (Index v = 0; v < mesh->n_vertices(); ++v)
    values[v] = mesh->vertices[static_cast<std::size_t>(v)].x();
  const CoefficientField f = CoefficientField::nodal_grid(mesh, values);

  CHECK(f({0.0, 0.0}) == doctest::Approx(0.0));
  CHECK(f({2.0, 1.0}) == doctest::Approx(2.0));
  CHECK(f({0.7, 0.25}) == doctest::Approx(0.7));  // x is linear on every cell
  CHECK(f({1.3, 0.8}) == doctest::Approx(1.3));

  SUBCASE("points just outside are clamped, far outside rejected") {
    CHECK(f({2.0 + 1e-13, 0.5}) == doctest::Approx(2.0));
    CHECK_THROWS_AS(f({2.5, 0.5}), OutOfDomainError);
    CHECK_THROWS_AS(f({-0.1, 0.5}), OutOfDomainError);
  }
}

TEST_CASE("eval_field maps a batch of points") {
  const CoefficientField f =
      CoefficientField::gaussian_bump(7.0, {1.0, 0.0}, {5.0, 5.0});
  const std::vector<Vector2> pts = {{1.0, 0.0}, {0.0, 0.0}};
  const std::vector<Real> vals = eval_field(f, pts);
  REQUIRE(vals.size() == 2);
  CHECK(vals[0] == 7.0);
  CHECK(vals[1] == doctest::Approx(0.047165628993598269).epsilon(1e-15));
}

TEST_CASE("degenerate-set diagnostic on the breakdown scenario") {
  const ProblemSpec spec = testing::road_spec();
  const TriMesh mesh = testing::marked_mesh(spec, 3);
  const AubryReport rep = aubry_set(spec, mesh, 1e-8);
  // K1 + lambda R = 1 + 1 = 2 and K2 + phi2 R = 1 + 3 = 4 everywhere.
  CHECK(rep.min1 == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(rep.min2 == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(rep.is_empty);
  CHECK(rep.witnesses.empty());
}

TEST_CASE("one vanishing factor alone keeps the degenerate set empty") {
  ProblemSpec spec = testing::road_spec();
  spec.k1 = CoefficientField::constant(0.0);
  spec.lambda = CoefficientField::constant(0.0);  // K1 + lambda R == 0
  const TriMesh mesh = testing::marked_mesh(spec, 2);
  const AubryReport rep = aubry_set(spec, mesh, 1e-8);
  CHECK(rep.min1 == doctest::Approx(0.0));
  CHECK(rep.min2 == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(rep.is_empty);
}

TEST_CASE("both factors vanishing makes every vertex a witness") {
  ProblemSpec spec = testing::road_spec();
  spec.k1 = CoefficientField::constant(0.0);
  spec.k2 = CoefficientField::constant(0.0);
  spec.lambda = CoefficientField::constant(0.0);
  spec.repair = CoefficientField::constant(0.0);  // phi2 R == 0 too
  const TriMesh mesh = testing::marked_mesh(spec, 2);
  const AubryReport rep = aubry_set(spec, mesh, 1e-8);
  CHECK_FALSE(rep.is_empty);
  CHECK(rep.witnesses.size() ==
        static_cast<std::size_t>(mesh.n_vertices()));
}

TEST_CASE("raising K1 never turns an empty degenerate set nonempty") {
  ProblemSpec spec = testing::road_spec();
  const TriMesh mesh = testing::marked_mesh(spec, 2);
  const bool before = aubry_set(spec, mesh, 1e-8).is_empty;
  spec.k1 = CoefficientField::constant(5.0);
  const bool after = aubry_set(spec, mesh, 1e-8).is_empty;
  if (before) CHECK(after);
}

TEST_CASE("emptiness verdict is stable under refinement") {
  const ProblemSpec spec = testing::road_spec();
  for (int level = 1; level <= 4; ++level) {
    const TriMesh mesh = testing::marked_mesh(spec, level);
    CHECK(aubry_set(spec, mesh, 1e-8).is_empty);
  }
}

TEST_CASE("problem validation rejects broken setups") {
  const TriMesh mesh = testing::marked_mesh(testing::road_spec(), 2);

  SUBCASE("speed below the floor") {
    ProblemSpec spec = testing::road_spec();
    spec.f2 = CoefficientField::constant(0.0);
    CHECK_THROWS_AS(validate_problem(spec, mesh), ConfigError);
  }
  SUBCASE("negative coefficient") {
    ProblemSpec spec = testing::road_spec();
    spec.k1 = CoefficientField::constant(-1.0);
    CHECK_THROWS_AS(validate_problem(spec, mesh), ConfigError);
  }
  SUBCASE("nonpositive domain") {
    ProblemSpec spec = testing::road_spec();
    spec.width = 0.0;
    CHECK_THROWS_AS(validate_problem(spec, mesh), ConfigError);
  }
  SUBCASE("zero coupling is allowed but warned about") {
    const ProblemSpec spec = testing::distance_spec();
    const auto warnings = validate_problem(spec, mesh);
    CHECK(warnings.size() >= 2);  // phi1 == 0 and phi2 == 0
  }
  SUBCASE("clean setup returns no warnings") {
    CHECK(validate_problem(testing::road_spec(), mesh).empty());
  }
}

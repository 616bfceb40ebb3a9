#include "eikplan/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eikplan/errors.hpp"

namespace eikplan {

AubryReport aubry_set(const ProblemSpec& spec, const TriMesh& mesh, Real tol) {
  AubryReport rep;
  rep.tolerance = tol;
  rep.min1 = std::numeric_limits<Real>::infinity();
  rep.min2 = rep.min1;
  for (Index v = 0; v < mesh.n_vertices(); ++v) {
    const Vector2& p = mesh.vertices[static_cast<std::size_t>(v)];
    const Real r = spec.repair(p);
    const Real e1 = spec.k1(p) + spec.lambda(p) * r;
    const Real e2 = spec.k2(p) + spec.phi2(p) * r;
    rep.min1 = std::min(rep.min1, e1);
    rep.min2 = std::min(rep.min2, e2);
    if (e1 <= tol && e2 <= tol) rep.witnesses.push_back(v);
  }
  rep.is_empty = rep.min1 > tol || rep.min2 > tol;
  return rep;
}

std::vector<std::string> validate_problem(const ProblemSpec& spec,
                                          const TriMesh& mesh) {
  if (!(spec.speed_floor > 0))
    throw ConfigError("speed_floor must be positive");
  if (!(spec.length > 0) || !(spec.width > 0))
    throw ConfigError("domain sides must be positive");

  struct Check {
    const CoefficientField* field;
    const char* name;
    Real lower;
  };
  const Check checks[] = {
      {&spec.f1, "f1", spec.speed_floor}, {&spec.f2, "f2", spec.speed_floor},
      {&spec.k1, "K1", 0},                {&spec.k2, "K2", 0},
      {&spec.lambda, "lambda", 0},        {&spec.phi1, "phi1", 0},
      {&spec.phi2, "phi2", 0},            {&spec.repair, "R", 0},
  };
  Real max_phi1 = 0, max_phi2 = 0;
  for (Index v = 0; v < mesh.n_vertices(); ++v) {
    const Vector2& p = mesh.vertices[static_cast<std::size_t>(v)];
    for (const Check& c : checks) {
      const Real val = (*c.field)(p);
      if (!std::isfinite(val))
        throw ConfigError(std::string(c.name) + " is not finite at a vertex");
      if (val < c.lower)
        throw ConfigError(std::string(c.name) + " drops below " +
                          (c.lower > 0 ? "the speed floor" : "zero") +
                          " on the mesh");
    }
    max_phi1 = std::max(max_phi1, spec.phi1(p));
    max_phi2 = std::max(max_phi2, spec.phi2(p));
  }

  std::vector<std::string> warnings;
  if (max_phi1 == 0)
    warnings.push_back(
        "phi1 vanishes everywhere: mode 1 never breaks down, the system "
        "decouples");
  if (max_phi2 == 0)
    warnings.push_back(
        "phi2 vanishes everywhere: mode 2 never recovers outside the depot");
  auto inside = [&spec](const Vector2& c) {
    return c.x() >= 0 && c.x() <= spec.length && c.y() >= 0 &&
           c.y() <= spec.width;
  };
  if (spec.goal.kind == Region::Kind::Disc && !inside(spec.goal.center))
    warnings.push_back("goal center lies outside the domain");
  if (spec.depot.kind == Region::Kind::Disc && !inside(spec.depot.center))
    warnings.push_back("depot center lies outside the domain");
  return warnings;
}

}  // namespace eikplan

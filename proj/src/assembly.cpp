#include "eikplan/assembly.hpp"

#include <cmath>

#include "eikplan/errors.hpp"

namespace eikplan {

ElementGradientField compute_beta(const Vector& u_prev, const TriMesh& mesh,
                                  Real grad_floor) {
  if (u_prev.size() != mesh.n_vertices())
    throw AssemblyError("compute_beta: field size does not match mesh");
  ElementGradientField out;
  const std::size_t nt = mesh.triangles.size();
  out.raw.resize(nt);
  out.beta.resize(nt);
  // Scale the regularization with the field so direction extraction behaves
  // the same for u and c*u.
  const Real umax = u_prev.size() ? u_prev.cwiseAbs().maxCoeff() : Real(0);
  const Real delta = grad_floor * (umax / mesh.max_h() + 1);
  for (std::size_t t = 0; t < nt; ++t) {
    const Vector2 g = element_gradient(mesh, static_cast<Index>(t), u_prev);
    out.raw[t] = g;
    out.beta[t] = g / (g.norm() + delta);
  }
  return out;
}

ElementGradientField zero_beta(const TriMesh& mesh) {
  ElementGradientField out;
  out.raw.assign(mesh.triangles.size(), Vector2::Zero());
  out.beta.assign(mesh.triangles.size(), Vector2::Zero());
  return out;
}

BlockSystem assemble_forms(const TriMesh& mesh, const ProblemSpec& spec,
                           const ElementGradientField& beta1,
                           const ElementGradientField& beta2,
                           const StabilizationParams& stab) {
  const Index n = mesh.n_vertices();
  const std::size_t nt = mesh.triangles.size();
  if (beta1.beta.size() != nt || beta2.beta.size() != nt)
    throw AssemblyError("assemble_forms: direction field size mismatch");

  BlockSystem sys;
  sys.rhs = Vector::Zero(2 * n);

  // Constrained rows are skipped during volume/boundary assembly and written
  // as pure constraint equations afterwards.
  std::vector<std::uint8_t> constrained(static_cast<std::size_t>(2 * n), 0);
  for (Index v : mesh.goal_vertices) {
    constrained[static_cast<std::size_t>(v)] = 1;
    sys.constrained_rows.emplace_back(v, ConstraintType::U1ZeroOnGoal);
  }
  for (Index v : mesh.depot_vertices) {
    constrained[static_cast<std::size_t>(n + v)] = 1;
    sys.constrained_rows.emplace_back(n + v, ConstraintType::U2LinkedOnDepot);
  }

  std::vector<Triplet> trip;
  trip.reserve(nt * 40 + mesh.boundary_edges.size() * 36 +
               sys.constrained_rows.size() * 2);
  auto push = [&](Index row, Index col, Real val) {
    if (!constrained[static_cast<std::size_t>(row)])
      trip.push_back({row, col, val});
  };

  const Real eps = stab.epsilon;

  for (std::size_t t = 0; t < nt; ++t) {
    const Index ti = static_cast<Index>(t);
    const auto& tri = mesh.triangles[t];
    const Real area = mesh.signed_area(ti);
    const Real h = mesh.elem_h[t];
    const auto g = shape_gradients(mesh, ti);

    auto coeff = [&](const CoefficientField& field, const char* name) {
      const Real c = field.at_centroid(mesh, ti);
      if (!std::isfinite(c))
        throw AssemblyError("assemble_forms: non-finite coefficient " +
                            std::string(name) + " on element " +
                            std::to_string(t));
      return c;
    };
    const Real f1c = coeff(spec.f1, "f1");
    const Real f2c = coeff(spec.f2, "f2");
    const Real k1c = coeff(spec.k1, "k1");
    const Real k2c = coeff(spec.k2, "k2");
    const Real lamc = coeff(spec.lambda, "lambda");
    const Real phi1c = coeff(spec.phi1, "phi1");
    const Real phi2c = coeff(spec.phi2, "phi2");
    const Real rc = coeff(spec.repair, "repair");

    for (int mode = 0; mode < 2; ++mode) {
      const Vector2& beta = mode == 0 ? beta1.beta[t] : beta2.beta[t];
      const Real f = mode == 0 ? f1c : f2c;
      const Real phi = mode == 0 ? phi1c : phi2c;
      const Real rhs_c = mode == 0 ? k1c + lamc * rc : k2c + phi2c * rc;
      const Index self = mode == 0 ? 0 : n;
      const Index other = mode == 0 ? n : 0;

      const Real nu = 1 / std::sqrt(beta.squaredNorm() + 1);
      const Real s = stab.theta * h * nu;

      // K = eps I + s f beta beta^T: plain diffusion plus the advection
      // term hit by the streamline part of the test function.
      const Matrix2 K = eps * Matrix2::Identity() +
                        (s * f) * (beta * beta.transpose());

      std::array<Real, 3> bg;  // beta . grad(shape_i)
      for (int i = 0; i < 3; ++i)
        bg[static_cast<std::size_t>(i)] = beta.dot(g[static_cast<std::size_t>(i)]);

      for (int i = 0; i < 3; ++i) {
        const Index row = self + tri[static_cast<std::size_t>(i)];
        const Real test_stream = s * bg[static_cast<std::size_t>(i)];
        for (int j = 0; j < 3; ++j) {
          const Index col_self = self + tri[static_cast<std::size_t>(j)];
          const Index col_other = other + tri[static_cast<std::size_t>(j)];
          const Real mass =
              area / 12 * (i == j ? 2 : 1) + test_stream * area / 3;
          const Real a_entry =
              area * g[static_cast<std::size_t>(i)].dot(
                         K * g[static_cast<std::size_t>(j)]) +
              f * bg[static_cast<std::size_t>(j)] * area / 3 + phi * mass;
          push(row, col_self, a_entry);
          push(row, col_other, -phi * mass);
        }
        sys.rhs[row] += rhs_c * (area / 3 + test_stream * area);
      }
    }
  }

  if (stab.boundary_flux_term) {
    // Integration by parts leaves -eps (grad u . n, w) on the outer
    // boundary; the streamline part of w is element-constant on the edge.
    for (const BoundaryEdge& e : mesh.boundary_edges) {
      const auto& tri = mesh.triangles[static_cast<std::size_t>(e.triangle)];
      const auto g = shape_gradients(mesh, e.triangle);
      const Real h = mesh.elem_h[static_cast<std::size_t>(e.triangle)];
      for (int mode = 0; mode < 2; ++mode) {
        const Vector2& beta = mode == 0
                                  ? beta1.beta[static_cast<std::size_t>(e.triangle)]
                                  : beta2.beta[static_cast<std::size_t>(e.triangle)];
        const Index self = mode == 0 ? Index(0) : n;
        const Real nu = 1 / std::sqrt(beta.squaredNorm() + 1);
        const Real s = stab.theta * h * nu;
        for (int i = 0; i < 3; ++i) {
          const Index vi = tri[static_cast<std::size_t>(i)];
          const Real lin = (vi == e.a || vi == e.b) ? e.length / 2 : 0;
          const Real wgt =
              lin + s * beta.dot(g[static_cast<std::size_t>(i)]) * e.length;
          if (wgt == 0) continue;
          for (int j = 0; j < 3; ++j)
            push(self + vi, self + tri[static_cast<std::size_t>(j)],
                 -eps * e.normal.dot(g[static_cast<std::size_t>(j)]) * wgt);
        }
      }
    }
  }

  for (const auto& [row, type] : sys.constrained_rows) {
    trip.push_back({row, row, 1});
    if (type == ConstraintType::U2LinkedOnDepot) {
      const Index v = row - n;
      trip.push_back({row, v, -1});
      sys.rhs[row] = spec.repair(mesh.vertices[static_cast<std::size_t>(v)]);
    } else {
      sys.rhs[row] = 0;
    }
  }

  sys.matrix = CsrMatrix::from_triplets(2 * n, 2 * n, trip);
  return sys;
}

}  // namespace eikplan

#include "eikplan/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "eikplan/errors.hpp"
#include "internal/format.hpp"

namespace eikplan {

namespace {

Real median(std::vector<Real> v) {
  if (v.empty()) return 0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid),
                   v.end());
  Real m = v[mid];
  if (v.size() % 2 == 0) {
    const Real lo = *std::max_element(
        v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    m = (m + lo) / 2;
  }
  return m;
}

}  // namespace

ResidualField eikonal_residual(const TriMesh& mesh, const ProblemSpec& spec,
                               const Vector& u1, const Vector& u2) {
  if (u1.size() != mesh.n_vertices() || u2.size() != mesh.n_vertices())
    throw ParameterError("eikonal_residual: field size does not match mesh");
  ResidualField out;
  const std::size_t nt = mesh.triangles.size();
  out.r1.resize(nt);
  out.r2.resize(nt);
  std::vector<Real> int_max, int_r1, int_r2;
  for (std::size_t t = 0; t < nt; ++t) {
    const Index ti = static_cast<Index>(t);
    const auto& tri = mesh.triangles[t];
    const Vector2 g1 = element_gradient(mesh, ti, u1);
    const Vector2 g2 = element_gradient(mesh, ti, u2);
    const Real u1c = (u1[tri[0]] + u1[tri[1]] + u1[tri[2]]) / 3;
    const Real u2c = (u2[tri[0]] + u2[tri[1]] + u2[tri[2]]) / 3;
    const Real rc = spec.repair.at_centroid(mesh, ti);
    out.r1[t] = g1.norm() * spec.f1.at_centroid(mesh, ti) +
                spec.phi1.at_centroid(mesh, ti) * (u1c - u2c) -
                (spec.k1.at_centroid(mesh, ti) +
                 spec.lambda.at_centroid(mesh, ti) * rc);
    out.r2[t] = g2.norm() * spec.f2.at_centroid(mesh, ti) +
                spec.phi2.at_centroid(mesh, ti) * (u2c - u1c) -
                (spec.k2.at_centroid(mesh, ti) +
                 spec.phi2.at_centroid(mesh, ti) * rc);

    bool interior = true;
    for (Index v : tri)
      if (mesh.on_outer_boundary[static_cast<std::size_t>(v)] ||
          mesh.in_goal[static_cast<std::size_t>(v)] ||
          mesh.in_depot[static_cast<std::size_t>(v)])
        interior = false;
    if (interior) {
      int_max.push_back(std::max(std::abs(out.r1[t]), std::abs(out.r2[t])));
      int_r1.push_back(std::abs(out.r1[t]));
      int_r2.push_back(std::abs(out.r2[t]));
    }
  }
  out.n_interior = int_max.size();
  out.max_interior = int_max.empty()
                         ? 0
                         : *std::max_element(int_max.begin(), int_max.end());
  out.median_interior = median(std::move(int_max));
  out.median_interior_r1 = median(std::move(int_r1));
  out.median_interior_r2 = median(std::move(int_r2));
  return out;
}

Trajectory trace_trajectory(const Vector& u, const TriMesh& mesh,
                            const Vector2& start, Real step,
                            const std::vector<Index>& targets, int max_steps,
                            Real grad_floor,
                            const std::vector<const CoefficientField*>&
                                integrands) {
  if (u.size() != mesh.n_vertices())
    throw ParameterError("trace_trajectory: field size does not match mesh");
  if (!(step > 0)) throw ParameterError("trace_trajectory: step must be positive");
  const PointLocator locator(mesh);
  if (locator.locate(start) < 0)
    throw OutOfDomainError("trace_trajectory: start point outside the mesh");

  auto near_target = [&](const Vector2& p) {
    for (Index v : targets)
      if ((mesh.vertices[static_cast<std::size_t>(v)] - p).norm() <= step)
        return true;
    return false;
  };
  // Normalized descent direction, or zero on stagnation / outside points.
  auto direction = [&](const Vector2& p) -> Vector2 {
    const Index t = locator.locate(p);
    if (t < 0) return Vector2::Zero();
    const Vector2 g = element_gradient(mesh, t, u);
    const Real norm = g.norm();
    if (norm <= grad_floor) return Vector2::Zero();
    return -g / norm;
  };

  Trajectory traj;
  traj.step_size = step;
  traj.points.push_back(start);
  Vector2 p = start;
  if (near_target(p)) {
    traj.reached_goal = true;
  } else {
    for (int k = 0; k < max_steps; ++k) {
      const Vector2 d0 = direction(p);
      if (d0.isZero(0)) break;
      Vector2 mid = p + (step / 2) * d0;
      mid.x() = std::clamp(mid.x(), Real(0), mesh.length);
      mid.y() = std::clamp(mid.y(), Real(0), mesh.width);
      Vector2 d = direction(mid);  // midpoint rule
      if (d.isZero(0)) d = d0;
      Vector2 q = p + step * d;
      q.x() = std::clamp(q.x(), Real(0), mesh.length);  // stay in the domain
      q.y() = std::clamp(q.y(), Real(0), mesh.width);
      const Real advance = (q - p).norm();
      if (advance <= step * 1e-12) break;  // pinned against the boundary
      traj.arc_length += advance;
      p = q;
      traj.points.push_back(p);
      if (near_target(p)) {
        traj.reached_goal = true;
        break;
      }
    }
  }
  for (const CoefficientField* f : integrands)
    traj.line_integrals.push_back(f ? line_integral(*f, traj.points) : 0);
  return traj;
}

Real line_integral(const CoefficientField& field,
                   const std::vector<Vector2>& points) {
  Real sum = 0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const Vector2 mid = (points[i] + points[i + 1]) / 2;
    sum += field(mid) * (points[i + 1] - points[i]).norm();
  }
  return sum;
}

void export_field(const TriMesh& mesh, const std::vector<const Vector*>& fields,
                  const std::vector<std::string>& names, ExportFormat format,
                  const std::string& path) {
  if (fields.size() != names.size())
    throw ParameterError("export_field: one name per field required");
  for (const Vector* f : fields)
    if (!f || f->size() != mesh.n_vertices())
      throw ParameterError("export_field: field size does not match mesh");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");

  if (format == ExportFormat::Csv) {
    if (fields.size() != 1)
      throw ParameterError("export_field: CSV takes exactly one field");
    out << "x,y," << names[0] << '\n';
    for (Index v = 0; v < mesh.n_vertices(); ++v) {
      const Vector2& p = mesh.vertices[static_cast<std::size_t>(v)];
      out << internal::fmt_real(p.x()) << ',' << internal::fmt_real(p.y())
          << ',' << internal::fmt_real((*fields[0])[v]) << '\n';
    }
  } else {
    out << "# vtk DataFile Version 3.0\nvalue fields\nASCII\n"
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
    out << "POINT_DATA " << mesh.n_vertices() << '\n';
    for (std::size_t f = 0; f < fields.size(); ++f) {
      out << "SCALARS " << names[f] << " double 1\nLOOKUP_TABLE default\n";
      for (Index v = 0; v < mesh.n_vertices(); ++v)
        out << internal::fmt_real((*fields[f])[v]) << '\n';
    }
  }
  if (!out) throw IoError("failed writing " + path);
}

Vector read_field_csv(const std::string& path, const TriMesh* mesh) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file");
  std::vector<Real> xs, ys, vals;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    Real triple[3];
    for (int c = 0; c < 3; ++c) {
      if (!std::getline(row, cell, ','))
        throw IoError(path + ": malformed row '" + line + "'");
      triple[c] = std::strtod(cell.c_str(), nullptr);
    }
    xs.push_back(triple[0]);
    ys.push_back(triple[1]);
    vals.push_back(triple[2]);
  }
  if (mesh) {
    if (static_cast<Index>(vals.size()) != mesh->n_vertices())
      throw IoError(path + ": row count does not match mesh");
    for (std::size_t v = 0; v < vals.size(); ++v)
      if (std::abs(xs[v] - mesh->vertices[v].x()) > 1e-12 ||
          std::abs(ys[v] - mesh->vertices[v].y()) > 1e-12)
        throw IoError(path + ": vertex coordinates do not match mesh");
  }
  Vector out(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t v = 0; v < vals.size(); ++v)
    out[static_cast<Eigen::Index>(v)] = vals[v];
  return out;
}

}  // namespace eikplan

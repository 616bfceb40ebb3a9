#include "eikplan/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "eikplan/errors.hpp"

namespace eikplan {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key))
      throw ConfigError("unknown key \"" + key + "\" in " + where);
}

const json& require(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end())
    throw ConfigError("missing key \"" + std::string(key) + "\" in " + where);
  return *it;
}

Real number(const json& j, const std::string& where) {
  if (!j.is_number())
    throw ConfigError(where + " must be a number");
  return j.get<Real>();
}

Vector2 point2(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2)
    throw ConfigError(where + " must be a 2-element array");
  return {number(j[0], where + "[0]"), number(j[1], where + "[1]")};
}

CoefficientField parse_field(const json& j, const std::string& where) {
  if (!j.is_object())
    throw ConfigError(where + " must be an object with a \"kind\"");
  const std::string kind =
      require(j, "kind", where).get<std::string>();
  if (kind == "constant") {
    reject_unknown_keys(j, {"kind", "value"}, where);
    return CoefficientField::constant(
        number(require(j, "value", where), where + ".value"));
  }
  if (kind == "gaussian-bump") {
    reject_unknown_keys(j, {"kind", "amplitude", "center", "decay"}, where);
    return CoefficientField::gaussian_bump(
        number(require(j, "amplitude", where), where + ".amplitude"),
        point2(require(j, "center", where), where + ".center"),
        point2(require(j, "decay", where), where + ".decay"));
  }
  if (kind == "nodal-grid")
    throw ConfigError(where +
                      ": nodal-grid coefficients are constructed in code "
                      "against a concrete mesh, not read from files");
  throw ConfigError(where + ": unknown coefficient kind \"" + kind + "\"");
}

Region parse_region(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  if (j.contains("vertices")) {
    reject_unknown_keys(j, {"vertices"}, where);
    const json& v = j.at("vertices");
    if (!v.is_array()) throw ConfigError(where + ".vertices must be an array");
    std::vector<Index> verts;
    for (const auto& e : v) {
      if (!e.is_number_integer())
        throw ConfigError(where + ".vertices entries must be integers");
      verts.push_back(e.get<Index>());
    }
    return Region::vertex_list(std::move(verts));
  }
  reject_unknown_keys(j, {"center", "radius"}, where);
  const Vector2 center = point2(require(j, "center", where), where + ".center");
  Real radius = 0;
  if (j.contains("radius")) radius = number(j.at("radius"), where + ".radius");
  return Region::disc(center, radius);
}

json field_to_json(const CoefficientField& f) {
  switch (f.kind) {
    case FieldKind::Constant:
      return {{"kind", "constant"}, {"value", f.value}};
    case FieldKind::GaussianBump:
      return {{"kind", "gaussian-bump"},
              {"amplitude", f.amplitude},
              {"center", {f.center.x(), f.center.y()}},
              {"decay", {f.decay.x(), f.decay.y()}}};
    case FieldKind::NodalGrid: {
      json values = json::array();
      for (Eigen::Index i = 0; i < f.nodal.size(); ++i)
        values.push_back(f.nodal[i]);
      return {{"kind", "nodal-grid"}, {"values", std::move(values)}};
    }
  }
  throw ConfigError("unserializable coefficient kind");
}

json region_to_json(const Region& r) {
  if (r.kind == Region::Kind::VertexList) return {{"vertices", r.vertices}};
  return {{"center", {r.center.x(), r.center.y()}}, {"radius", r.radius}};
}

}  // namespace

RunConfig config_from_json(const json& root) {
  const json& j = root.contains("resolved_config")
                      ? root.at("resolved_config")  // run manifests work too
                      : root;
  if (!j.is_object()) throw ConfigError("config root must be an object");
  reject_unknown_keys(j,
                      {"domain", "coefficients", "goal", "depot", "speed_floor",
                       "mesh", "continuation"},
                      "config");

  RunConfig cfg;

  const json& dom = require(j, "domain", "config");
  reject_unknown_keys(dom, {"L", "S"}, "domain");
  cfg.problem.length = number(require(dom, "L", "domain"), "domain.L");
  cfg.problem.width = number(require(dom, "S", "domain"), "domain.S");

  const json& co = require(j, "coefficients", "config");
  reject_unknown_keys(
      co, {"f1", "f2", "K1", "K2", "lambda", "phi1", "phi2", "R"},
      "coefficients");
  cfg.problem.f1 = parse_field(require(co, "f1", "coefficients"), "f1");
  cfg.problem.f2 = parse_field(require(co, "f2", "coefficients"), "f2");
  cfg.problem.k1 = parse_field(require(co, "K1", "coefficients"), "K1");
  cfg.problem.k2 = parse_field(require(co, "K2", "coefficients"), "K2");
  cfg.problem.lambda =
      parse_field(require(co, "lambda", "coefficients"), "lambda");
  cfg.problem.phi1 = parse_field(require(co, "phi1", "coefficients"), "phi1");
  cfg.problem.phi2 = parse_field(require(co, "phi2", "coefficients"), "phi2");
  cfg.problem.repair = parse_field(require(co, "R", "coefficients"), "R");

  cfg.problem.goal = parse_region(require(j, "goal", "config"), "goal");
  cfg.problem.depot = parse_region(require(j, "depot", "config"), "depot");

  if (j.contains("speed_floor"))
    cfg.problem.speed_floor = number(j.at("speed_floor"), "speed_floor");

  if (j.contains("mesh")) {
    const json& m = j.at("mesh");
    reject_unknown_keys(m, {"base_nx", "base_ny", "refine"}, "mesh");
    if (m.contains("base_nx")) cfg.mesh.base_nx = m.at("base_nx").get<int>();
    if (m.contains("base_ny")) cfg.mesh.base_ny = m.at("base_ny").get<int>();
    if (m.contains("refine")) cfg.mesh.refine = m.at("refine").get<int>();
    if (cfg.mesh.refine < 0)
      throw ConfigError("mesh.refine must be nonnegative");
  }

  if (j.contains("continuation")) {
    const json& c = j.at("continuation");
    reject_unknown_keys(c,
                        {"epsilon0", "ratio", "epsilon_min", "inner_tol",
                         "max_inner", "max_outer", "theta", "grad_floor",
                         "boundary_flux_term", "linear_tol", "linear_max_iter"},
                        "continuation");
    ContinuationConfig& cc = cfg.continuation;
    if (c.contains("epsilon0"))
      cc.epsilon0 = number(c.at("epsilon0"), "continuation.epsilon0");
    if (c.contains("ratio"))
      cc.ratio = number(c.at("ratio"), "continuation.ratio");
    if (c.contains("epsilon_min"))
      cc.epsilon_min = number(c.at("epsilon_min"), "continuation.epsilon_min");
    if (c.contains("inner_tol"))
      cc.inner_tol = number(c.at("inner_tol"), "continuation.inner_tol");
    if (c.contains("max_inner")) cc.max_inner = c.at("max_inner").get<int>();
    if (c.contains("max_outer")) cc.max_outer = c.at("max_outer").get<int>();
    if (c.contains("theta"))
      cc.theta = number(c.at("theta"), "continuation.theta");
    if (c.contains("grad_floor"))
      cc.grad_floor = number(c.at("grad_floor"), "continuation.grad_floor");
    if (c.contains("boundary_flux_term")) {
      if (!c.at("boundary_flux_term").is_boolean())
        throw ConfigError("continuation.boundary_flux_term must be a boolean");
      cc.boundary_flux_term = c.at("boundary_flux_term").get<bool>();
    }
    if (c.contains("linear_tol"))
      cc.linear_tol = number(c.at("linear_tol"), "continuation.linear_tol");
    if (c.contains("linear_max_iter"))
      cc.linear_max_iter = c.at("linear_max_iter").get<int>();
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

json to_json(const RunConfig& cfg) {
  json j;
  j["domain"] = {{"L", cfg.problem.length}, {"S", cfg.problem.width}};
  j["coefficients"] = {{"f1", field_to_json(cfg.problem.f1)},
                       {"f2", field_to_json(cfg.problem.f2)},
                       {"K1", field_to_json(cfg.problem.k1)},
                       {"K2", field_to_json(cfg.problem.k2)},
                       {"lambda", field_to_json(cfg.problem.lambda)},
                       {"phi1", field_to_json(cfg.problem.phi1)},
                       {"phi2", field_to_json(cfg.problem.phi2)},
                       {"R", field_to_json(cfg.problem.repair)}};
  j["goal"] = region_to_json(cfg.problem.goal);
  j["depot"] = region_to_json(cfg.problem.depot);
  j["speed_floor"] = cfg.problem.speed_floor;
  j["mesh"] = {{"base_nx", cfg.mesh.base_nx},
               {"base_ny", cfg.mesh.base_ny},
               {"refine", cfg.mesh.refine}};
  j["continuation"] = {{"epsilon0", cfg.continuation.epsilon0},
                       {"ratio", cfg.continuation.ratio},
                       {"epsilon_min", cfg.continuation.epsilon_min},
                       {"inner_tol", cfg.continuation.inner_tol},
                       {"max_inner", cfg.continuation.max_inner},
                       {"max_outer", cfg.continuation.max_outer},
                       {"theta", cfg.continuation.theta},
                       {"grad_floor", cfg.continuation.grad_floor},
                       {"boundary_flux_term", cfg.continuation.boundary_flux_term},
                       {"linear_tol", cfg.continuation.linear_tol},
                       {"linear_max_iter", cfg.continuation.linear_max_iter}};
  return j;
}

TriMesh build_mesh(const RunConfig& cfg) {
  int nx = cfg.mesh.base_nx;
  int ny = cfg.mesh.base_ny;
  if (nx <= 0 || ny <= 0) {
    // Near-square base cells: one cell across the short side.
    const Real aspect = cfg.problem.length / cfg.problem.width;
    if (aspect >= 1) {
      ny = 1;
      nx = std::max(1, static_cast<int>(std::lround(aspect)));
    } else {
      nx = 1;
      ny = std::max(1, static_cast<int>(std::lround(1 / aspect)));
    }
  }
  TriMesh mesh = build_rectangle_mesh(cfg.problem.length, cfg.problem.width,
                                      nx, ny);
  for (int r = 0; r < cfg.mesh.refine; ++r) mesh = refine_uniform(mesh);
  return mark_regions(std::move(mesh), cfg.problem);
}

}  // namespace eikplan

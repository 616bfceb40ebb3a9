#include "eikplan/mc.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>
#include <vector>

#include "eikplan/errors.hpp"

namespace eikplan {

namespace {

// Counter-hash generator (splitmix64). Each sample owns one stream keyed by
// (seed, sample index), so estimates are bitwise independent of the thread
// count and of which samples run where.
struct SampleRng {
  std::uint64_t s;
  SampleRng(std::uint64_t seed, int sample) {
    s = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(sample) + 1);
    next();
    next();
  }
  std::uint64_t next() {
    s += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  Real uniform() { return static_cast<Real>(next() >> 11) * 0x1.0p-53; }
};

struct CapturePoints {
  std::vector<Vector2> pts;
  Real radius = 0;
  bool hit(const Vector2& x) const {
    for (const Vector2& p : pts)
      if ((p - x).norm() <= radius) return true;
    return false;
  }
};

CapturePoints capture_points(const Region& r, const TriMesh& mesh,
                             Real radius_override) {
  CapturePoints c;
  c.radius = radius_override > 0 ? radius_override : resolved_radius(r, mesh);
  if (r.kind == Region::Kind::Disc) {
    c.pts.push_back(r.center);
  } else {
    for (Index v : r.vertices)
      c.pts.push_back(mesh.vertices[static_cast<std::size_t>(v)]);
  }
  return c;
}

struct SampleResult {
  Real cost = 0;
  bool censored = false;
};

}  // namespace

McEstimate simulate_cost(const TriMesh& mesh, const ProblemSpec& spec,
                         const Vector& u1, const Vector& u2, const Vector2& x0,
                         int start_mode, const McConfig& cfg) {
  if (start_mode != 1 && start_mode != 2)
    throw ParameterError("simulate_cost: start mode must be 1 or 2");
  if (cfg.n_samples < 1)
    throw ParameterError("simulate_cost: need at least one sample");
  if (u1.size() != mesh.n_vertices() || u2.size() != mesh.n_vertices())
    throw ParameterError("simulate_cost: field size does not match mesh");

  const PointLocator locator(mesh);
  if (locator.locate(x0) < 0)
    throw SimulationError("simulate_cost: start point outside the domain");

  Real max_speed = 0;
  for (const Vector2& p : mesh.vertices)
    max_speed = std::max({max_speed, spec.f1(p), spec.f2(p)});
  const Real dt = cfg.dt > 0 ? cfg.dt : mesh.max_h() / (2 * max_speed);
  if (!(dt > 0)) throw ParameterError("simulate_cost: bad time step");
  const long max_steps = std::lround(std::ceil(cfg.max_time / dt));

  const CapturePoints goal =
      capture_points(spec.goal, mesh, cfg.capture_radius);
  const CapturePoints depot =
      capture_points(spec.depot, mesh, cfg.capture_radius);

  const Real grad_cut = 1e-12;

  auto run_sample = [&](int sample) -> SampleResult {
    SampleRng rng(cfg.seed, sample);
    SampleResult res;
    Vector2 x = x0;
    int mode = start_mode;
    for (long k = 0; k < max_steps; ++k) {
      if (mode == 1 && goal.hit(x)) return res;
      if (mode == 2 && depot.hit(x)) {
        res.cost += spec.repair(x);
        mode = 1;
        if (goal.hit(x)) return res;
      }

      const Index t = locator.locate(x);
      if (t < 0)
        throw SimulationError("simulate_cost: walker left the domain");
      const Vector2 g = element_gradient(mesh, t, mode == 1 ? u1 : u2);
      const Real gn = g.norm();
      if (gn <= grad_cut) {
        if (k == 0)
          throw SimulationError(
              "simulate_cost: value field is flat at the start point");
        res.censored = true;  // stuck mid-path; report as censored
        return res;
      }

      const Real r = spec.repair(x);
      const Real rate = mode == 1 ? spec.k1(x) + spec.lambda(x) * r
                                  : spec.k2(x);
      res.cost += rate * dt;

      const Real speed = mode == 1 ? spec.f1(x) : spec.f2(x);
      x -= (speed * dt / gn) * g;
      x.x() = std::clamp(x.x(), Real(0), mesh.length);
      x.y() = std::clamp(x.y(), Real(0), mesh.width);

      // One draw per step regardless of mode keeps the streams aligned.
      const Real u = rng.uniform();
      if (mode == 1) {
        if (u < -std::expm1(-spec.phi1(x) * dt)) mode = 2;
      } else {
        if (u < -std::expm1(-spec.phi2(x) * dt)) {
          res.cost += spec.repair(x);
          mode = 1;
        }
      }
    }
    res.censored = true;
    return res;
  };

  std::vector<Real> costs(static_cast<std::size_t>(cfg.n_samples));
  std::vector<std::uint8_t> censored(static_cast<std::size_t>(cfg.n_samples));
  const int n_threads = std::max(1, cfg.threads);
  if (n_threads == 1) {
    for (int i = 0; i < cfg.n_samples; ++i) {
      const SampleResult r = run_sample(i);
      costs[static_cast<std::size_t>(i)] = r.cost;
      censored[static_cast<std::size_t>(i)] = r.censored;
    }
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 0; w < n_threads; ++w)
      pool.emplace_back([&, w] {
        try {
          for (int i = w; i < cfg.n_samples; i += n_threads) {
            const SampleResult r = run_sample(i);
            costs[static_cast<std::size_t>(i)] = r.cost;
            censored[static_cast<std::size_t>(i)] = r.censored;
          }
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      });
    for (std::thread& th : pool) th.join();
    if (error) std::rethrow_exception(error);
  }

  // Reduce in sample order: the estimate is a pure function of (seed, n).
  // Censored walks are counted but excluded from the mean.
  McEstimate est;
  Real sum = 0;
  int n_used = 0, n_censored = 0;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    if (censored[i]) {
      ++n_censored;
    } else {
      sum += costs[i];
      ++n_used;
    }
  }
  est.n_samples = n_used;
  est.censored_fraction = static_cast<Real>(n_censored) / cfg.n_samples;
  if (n_used == 0) return est;  // all censored: mean/SE stay zero
  est.mean = sum / n_used;
  if (n_used > 1) {
    Real ss = 0;
    for (std::size_t i = 0; i < costs.size(); ++i)
      if (!censored[i]) ss += (costs[i] - est.mean) * (costs[i] - est.mean);
    est.standard_error = std::sqrt(ss / (n_used - 1)) / std::sqrt(Real(n_used));
  }
  return est;
}

}  // namespace eikplan

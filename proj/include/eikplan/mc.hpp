#pragma once

#include <cstdint>

#include "eikplan/mesh.hpp"
#include "eikplan/problem.hpp"
#include "eikplan/types.hpp"

namespace eikplan {

/// Monte Carlo estimator settings. dt <= 0 resolves to
/// max_h / (2 * max speed); capture_radius <= 0 resolves to the marked
/// region's resolved radius. threads > 1 splits samples across a thread
/// pool; per-sample substreams keep the estimate bitwise independent of the
/// thread count.
struct McConfig {
  int n_samples = 10000;
  std::uint64_t seed = 20260816;
  Real dt = 0.0;
  Real max_time = 200.0;
  Real capture_radius = 0.0;
  int threads = 1;
};

struct McEstimate {
  Real mean = 0;
  Real standard_error = 0;
  int n_samples = 0;           // uncensored walks entering the estimate
  Real censored_fraction = 0;  // share of requested walks stopped by max_time
};

/// Simulates the random-breakdown cost process from x0 in the given starting
/// mode (1 = nominal, 2 = reduced speed), steering each mode down its own
/// value field. Breakdowns fire with per-step probability 1 - exp(-phi1 dt);
/// a mode-2 walker pays the repair cost when captured by the depot and
/// continues in mode 1. Returns the sample mean and standard error of the
/// accumulated cost.
McEstimate simulate_cost(const TriMesh& mesh, const ProblemSpec& spec,
                         const Vector& u1, const Vector& u2, const Vector2& x0,
                         int start_mode, const McConfig& cfg);

}  // namespace eikplan

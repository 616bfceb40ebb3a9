#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "eikplan/types.hpp"

namespace eikplan {

/// One quadratic piece a x^2 + b x + c of a candidate on [lo, hi].
struct Piece {
  Real a = 0, b = 0, c = 0;
  Real lo = 0, hi = 0;

  static Piece down_parabola(Real lo, Real hi);           // 1 - x^2
  static Piece up_parabola_shift(Real shift, Real lo, Real hi);  // x^2 - shift

  Real value(Real x) const { return (a * x + b) * x + c; }
  Real slope(Real x) const { return 2 * a * x + b; }
};

/// Piecewise-quadratic candidate pair for the two-mode system on [-1, 1].
/// Pieces of each component must tile the interval in order and agree in
/// value at the interior joints (kinks).
struct Candidate1D {
  std::vector<Piece> u1;
  std::vector<Piece> u2;
  std::string name;
};

enum class Verdict { IsSolution, FailsEquation, FailsBoundary };

/// Outcome at one interior kink: which component, where, whether the kink is
/// concave (upper test) or convex (lower test), and the worst signed excess
/// of the Hamiltonian over / under the right-hand side across the tested
/// slope fan. excess <= tol passes for concave kinks; excess >= -tol for
/// convex ones.
struct KinkVerdict {
  int component = 0;  // 1 or 2
  Real x = 0;
  bool concave = false;
  Real worst_excess = 0;
  bool passed = false;
};

struct BoundaryVerdict {
  int component = 0;
  Real x = 0;
  Real value = 0;
  Real required = 0;
  bool passed = false;
};

struct ViscosityReport {
  Verdict verdict = Verdict::IsSolution;
  std::vector<KinkVerdict> kinks;
  std::vector<BoundaryVerdict> boundary;
  Real max_smooth_residual = 0;  // over smooth interior sample points
  std::string detail;
};

/// Verifies a candidate against the coupled system
///   |u1'| + u1 - u2 = F,   |u2'| + u2 - u1 = F   on (-1, 1),
/// with u1(+-1) = u2(+-1) = 0, in the viscosity sense: equality on smooth
/// regions (sampled on grid_n points per piece), one-sided inequalities over
/// a fan of at least 21 slopes at every derivative jump, and the boundary
/// values. tol is the acceptance slack for all comparisons.
ViscosityReport check_viscosity(const Candidate1D& cand,
                                const std::function<Real(Real)>& F,
                                int grid_n = 100, Real tol = 1e-9);

/// Evaluates both components of the candidate against extra pointwise
/// conditions (e.g. a value pinned on the Aubry point): two verdicts per
/// condition, one per component.
std::vector<BoundaryVerdict> check_boundary(
    const Candidate1D& cand,
    const std::vector<std::pair<Real, Real>>& conditions, Real tol);

/// Interior joints of a component where the one-sided slopes differ.
std::vector<Real> kink_locations(const std::vector<Piece>& pieces);

/// Value of a piecewise component at x (pieces searched in order).
Real eval_piecewise(const std::vector<Piece>& pieces, Real x);

/// Sentinel for the smooth (no-kink) candidate in example_candidates.
inline constexpr Real kSmoothCandidate = -1.0;

/// The family min(1 - x^2, x^2 - C) for the classical two-parabola example,
/// one candidate per entry of shifts; kSmoothCandidate produces the single
/// down parabola. Both components identical (symmetric coupling cancels).
std::vector<Candidate1D> example_candidates(const std::vector<Real>& shifts);

/// Pointwise minimum / maximum of two quadratics over their common interval
/// as a candidate component, split at interior intersections.
std::vector<Piece> min_of(const Piece& p, const Piece& q);
std::vector<Piece> max_of(const Piece& p, const Piece& q);

}  // namespace eikplan

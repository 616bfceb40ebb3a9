#include "eikplan/viscosity1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eikplan/errors.hpp"
#include "internal/format.hpp"

namespace eikplan {

Piece Piece::down_parabola(Real lo, Real hi) {
  return {-1, 0, 1, lo, hi};
}

Piece Piece::up_parabola_shift(Real shift, Real lo, Real hi) {
  return {1, 0, -shift, lo, hi};
}

namespace {

constexpr Real kJoinTol = 1e-12;

void validate_component(const std::vector<Piece>& pieces, int component) {
  const std::string who = "component " + std::to_string(component);
  if (pieces.empty())
    throw InvalidCandidateError(who + " has no pieces");
  if (std::abs(pieces.front().lo + 1) > 1e-12 ||
      std::abs(pieces.back().hi - 1) > 1e-12)
    throw InvalidCandidateError(who + " does not cover [-1, 1]");
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    if (!(pieces[i].lo < pieces[i].hi))
      throw InvalidCandidateError(who + " has an empty piece");
    if (i + 1 < pieces.size()) {
      if (std::abs(pieces[i].hi - pieces[i + 1].lo) > 1e-12)
        throw InvalidCandidateError(who + " has a gap between pieces");
      if (std::abs(pieces[i].value(pieces[i].hi) -
                   pieces[i + 1].value(pieces[i + 1].lo)) > kJoinTol)
        throw InvalidCandidateError(who + " jumps in value at a joint");
    }
  }
}

}  // namespace

Real eval_piecewise(const std::vector<Piece>& pieces, Real x) {
  for (const Piece& p : pieces)
    if (x <= p.hi || &p == &pieces.back()) return p.value(x);
  return pieces.back().value(x);
}

std::vector<Real> kink_locations(const std::vector<Piece>& pieces) {
  std::vector<Real> out;
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
    const Real x = pieces[i].hi;
    if (std::abs(pieces[i + 1].slope(x) - pieces[i].slope(x)) > 1e-12)
      out.push_back(x);
  }
  return out;
}

ViscosityReport check_viscosity(const Candidate1D& cand,
                                const std::function<Real(Real)>& F,
                                int grid_n, Real tol) {
  if (grid_n < 2) throw ParameterError("check_viscosity: grid_n too small");
  if (!F) throw ParameterError("check_viscosity: missing right-hand side");
  validate_component(cand.u1, 1);
  validate_component(cand.u2, 2);

  ViscosityReport rep;
  bool equation_ok = true;

  for (int comp = 1; comp <= 2; ++comp) {
    const auto& self = comp == 1 ? cand.u1 : cand.u2;
    const auto& other = comp == 1 ? cand.u2 : cand.u1;

    // Smooth interiors: the equation must hold pointwise.
    for (const Piece& p : self) {
      for (int i = 0; i < grid_n; ++i) {
        const Real x = p.lo + (i + Real(0.5)) * (p.hi - p.lo) / grid_n;
        const Real res =
            std::abs(std::abs(p.slope(x)) + p.value(x) - eval_piecewise(other, x) - F(x));
        rep.max_smooth_residual = std::max(rep.max_smooth_residual, res);
        if (res > tol && equation_ok) {
          equation_ok = false;
          rep.detail = "component " + std::to_string(comp) +
                       " misses the equation at x=" + internal::fmt_real(x) +
                       " by " + internal::fmt_real(res);
        }
      }
    }

    // Derivative jumps: one-sided tests over the fan of admissible slopes
    // of smooth functions touching from above (concave kink) or below
    // (convex kink).
    for (std::size_t i = 0; i + 1 < self.size(); ++i) {
      const Real x = self[i].hi;
      const Real p_left = self[i].slope(x);
      const Real p_right = self[i + 1].slope(x);
      if (std::abs(p_right - p_left) <= 1e-12) continue;

      KinkVerdict kv;
      kv.component = comp;
      kv.x = x;
      kv.concave = p_right < p_left;
      const Real coupling = eval_piecewise(self, x) - eval_piecewise(other, x) - F(x);
      const Real p_lo = std::min(p_left, p_right);
      const Real p_hi = std::max(p_left, p_right);
      const int n_slopes = 21;
      Real worst = kv.concave ? -std::numeric_limits<Real>::infinity()
                              : std::numeric_limits<Real>::infinity();
      for (int k = 0; k < n_slopes; ++k) {
        const Real p = p_lo + (p_hi - p_lo) * k / (n_slopes - 1);
        const Real h = std::abs(p) + coupling;
        worst = kv.concave ? std::max(worst, h) : std::min(worst, h);
      }
      kv.worst_excess = worst;
      kv.passed = kv.concave ? worst <= tol : worst >= -tol;
      if (!kv.passed && equation_ok) {
        equation_ok = false;
        rep.detail = "component " + std::to_string(comp) +
                     " fails the kink test at x=" + internal::fmt_real(x);
      }
      rep.kinks.push_back(kv);
    }

    for (Real x : {Real(-1), Real(1)}) {
      BoundaryVerdict bv;
      bv.component = comp;
      bv.x = x;
      bv.value = eval_piecewise(self, x);
      bv.required = 0;
      bv.passed = std::abs(bv.value - bv.required) <= tol;
      rep.boundary.push_back(bv);
    }
  }

  if (!equation_ok) {
    rep.verdict = Verdict::FailsEquation;
  } else {
    const bool boundary_ok =
        std::all_of(rep.boundary.begin(), rep.boundary.end(),
                    [](const BoundaryVerdict& b) { return b.passed; });
    if (!boundary_ok) {
      rep.verdict = Verdict::FailsBoundary;
      rep.detail = "boundary value mismatch at the interval ends";
    } else {
      rep.verdict = Verdict::IsSolution;
    }
  }
  return rep;
}

namespace {

std::vector<Piece> select_branch(const Piece& p, const Piece& q, bool lower) {
  if (std::abs(p.lo - q.lo) > 1e-12 || std::abs(p.hi - q.hi) > 1e-12)
    throw InvalidCandidateError("min/max: pieces cover different intervals");

  // Split where p - q changes sign.
  const Real da = p.a - q.a, db = p.b - q.b, dc = p.c - q.c;
  std::vector<Real> cuts;
  if (std::abs(da) < 1e-14) {
    if (std::abs(db) > 1e-14) cuts.push_back(-dc / db);
  } else {
    const Real disc = db * db - 4 * da * dc;
    if (disc > 0) {
      const Real root = std::sqrt(disc);
      cuts.push_back((-db - root) / (2 * da));
      cuts.push_back((-db + root) / (2 * da));
    }
  }
  std::vector<Real> knots{p.lo};
  std::sort(cuts.begin(), cuts.end());
  for (Real c : cuts)
    if (c > p.lo + 1e-14 && c < p.hi - 1e-14) knots.push_back(c);
  knots.push_back(p.hi);

  std::vector<Piece> out;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const Real mid = (knots[i] + knots[i + 1]) / 2;
    const bool p_wins = lower ? p.value(mid) <= q.value(mid)
                              : p.value(mid) >= q.value(mid);
    Piece piece = p_wins ? p : q;
    piece.lo = knots[i];
    piece.hi = knots[i + 1];
    out.push_back(piece);
  }
  return out;
}

}  // namespace

std::vector<Piece> min_of(const Piece& p, const Piece& q) {
  return select_branch(p, q, true);
}

std::vector<Piece> max_of(const Piece& p, const Piece& q) {
  return select_branch(p, q, false);
}

std::vector<BoundaryVerdict> check_boundary(
    const Candidate1D& cand,
    const std::vector<std::pair<Real, Real>>& conditions, Real tol) {
  validate_component(cand.u1, 1);
  validate_component(cand.u2, 2);
  std::vector<BoundaryVerdict> out;
  for (const auto& [x, required] : conditions) {
    if (x < -1 || x > 1)
      throw ParameterError("check_boundary: condition point outside [-1, 1]");
    for (int comp = 1; comp <= 2; ++comp) {
      BoundaryVerdict bv;
      bv.component = comp;
      bv.x = x;
      bv.value = eval_piecewise(comp == 1 ? cand.u1 : cand.u2, x);
      bv.required = required;
      bv.passed = std::abs(bv.value - required) <= tol;
      out.push_back(bv);
    }
  }
  return out;
}

std::vector<Candidate1D> example_candidates(const std::vector<Real>& shifts) {
  std::vector<Candidate1D> out;
  for (Real s : shifts) {
    Candidate1D c;
    if (s == kSmoothCandidate) {
      c.u1 = {Piece::down_parabola(-1, 1)};
      c.name = "down-parabola";
    } else {
      if (!(s > 0) || !(s < 1))
        throw ParameterError("example_candidates: shift must lie in (0, 1)");
      c.u1 = min_of(Piece::down_parabola(-1, 1),
                    Piece::up_parabola_shift(s, -1, 1));
      c.name = "min-family C=" + internal::fmt_real(s);
    }
    c.u2 = c.u1;
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace eikplan

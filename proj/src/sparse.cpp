#include "eikplan/sparse.hpp"

#include <Eigen/SparseLU>
#include <unsupported/Eigen/IterativeSolvers>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "eikplan/errors.hpp"
#include "internal/format.hpp"

namespace eikplan {

CsrMatrix CsrMatrix::from_triplets(Index n_rows, Index n_cols,
                                   std::span<const Triplet> triplets) {
  if (n_rows < 0 || n_cols < 0)
    throw BuildError("sparse: negative matrix dimension");
  std::vector<Triplet> sorted(triplets.begin(), triplets.end());
  for (const Triplet& t : sorted)
    if (t.row < 0 || t.row >= n_rows || t.col < 0 || t.col >= n_cols)
      throw BuildError("sparse: triplet index out of range");
  // Sorting on (row, col, value bits) pins the floating-point summation
  // order of duplicates, so any permutation of the input builds the same
  // matrix bit for bit.
  std::sort(sorted.begin(), sorted.end(),
            [](const Triplet& a, const Triplet& b) {
              if (a.row != b.row) return a.row < b.row;
              if (a.col != b.col) return a.col < b.col;
              return std::bit_cast<std::uint64_t>(a.value) <
                     std::bit_cast<std::uint64_t>(b.value);
            });

  std::vector<Eigen::Triplet<Real, Index>> dedup;
  dedup.reserve(sorted.size());
  for (const Triplet& t : sorted) {
    if (!dedup.empty() && dedup.back().row() == t.row &&
        dedup.back().col() == t.col)
      dedup.back() = {t.row, t.col, dedup.back().value() + t.value};
    else
      dedup.emplace_back(t.row, t.col, t.value);
  }

  CsrMatrix out;
  out.mat_.resize(n_rows, n_cols);
  out.mat_.setFromTriplets(dedup.begin(), dedup.end());
  out.mat_.makeCompressed();
  return out;
}

void CsrMatrix::write_matrix_market(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "%%MatrixMarket matrix coordinate real general\n"
      << rows() << ' ' << cols() << ' ' << nnz() << '\n';
  const auto offs = row_offsets();
  const auto cols_ = col_indices();
  const auto vals = values();
  for (Index r = 0; r < rows(); ++r)
    for (Index k = offs[static_cast<std::size_t>(r)];
         k < offs[static_cast<std::size_t>(r) + 1]; ++k)
      out << r + 1 << ' ' << cols_[static_cast<std::size_t>(k)] + 1 << ' '
          << internal::fmt_real(vals[static_cast<std::size_t>(k)]) << '\n';
  if (!out) throw IoError("failed writing " + path);
}

namespace {

using ColMajor = Eigen::SparseMatrix<Real, Eigen::ColMajor, Index>;

bool finite(const Vector& x) { return x.allFinite(); }

// One factorization plus a few refinement passes toward tol.
bool direct_solve(const CsrMatrix& A, const Vector& b, Vector& x, Real tol) {
  ColMajor Ac(A.eigen());
  Eigen::SparseLU<ColMajor> lu;
  lu.compute(Ac);
  if (lu.info() != Eigen::Success) return false;
  x = lu.solve(b);
  if (!finite(x)) return false;
  // A few rounds of iterative refinement: LU in double often lands just
  // above a tight tolerance on ill-conditioned transport systems.
  const Real bnorm = b.norm();
  Real res = (b - A.multiply(x)).norm();
  for (int pass = 0; pass < 3 && res > tol * bnorm; ++pass) {
    const Vector dx = lu.solve(b - A.multiply(x));
    if (!finite(dx)) break;
    const Vector candidate = x + dx;
    const Real next = (b - A.multiply(candidate)).norm();
    if (next >= res) break;
    x = candidate;
    res = next;
  }
  return true;
}

}  // namespace

std::pair<Vector, SolveStats> solve(const CsrMatrix& A, const Vector& b,
                                    const SolveOptions& opts,
                                    const Vector* x0) {
  if (A.rows() != A.cols()) throw ParameterError("solve: matrix not square");
  if (b.size() != A.rows())
    throw ParameterError("solve: right-hand side size mismatch");

  SolveStats stats;
  const Real bnorm = b.norm();
  if (bnorm == 0) {
    stats.converged = true;
    stats.method = "trivial";
    return {Vector::Zero(A.rows()), stats};
  }
  auto rel_residual = [&](const Vector& x) {
    return (A.multiply(x) - b).norm() / bnorm;
  };

  Vector x = Vector::Zero(A.rows());
  if (A.rows() <= opts.direct_threshold) {
    stats.method = "sparse-lu";
    if (!direct_solve(A, b, x, opts.tol)) {
      stats.method = "sparse-lu(factorization-failed)";
      x.setZero();
    }
  } else {
    stats.method = "gmres+ilut";
    Eigen::GMRES<CsrMatrix::Storage, Eigen::IncompleteLUT<Real, Index>> gm;
    gm.preconditioner().setDroptol(opts.ilut_drop_tol);
    gm.preconditioner().setFillfactor(opts.ilut_fill);
    gm.set_restart(opts.restart);
    gm.setMaxIterations(opts.max_iter);
    gm.setTolerance(opts.tol);
    gm.compute(A.eigen());
    if (gm.info() == Eigen::Success) {
      x = x0 ? gm.solveWithGuess(b, *x0).eval() : gm.solve(b).eval();
      stats.iterations = static_cast<int>(gm.iterations());
    }
    if (gm.info() != Eigen::Success || !finite(x) ||
        rel_residual(x) > opts.tol) {
      if (opts.direct_rescue && direct_solve(A, b, x, opts.tol))
        stats.method = "gmres+ilut->sparse-lu";
    }
  }

  // Judge by the actual residual of the returned iterate, not the solver's
  // own estimate.
  stats.final_relative_residual = rel_residual(x);
  stats.converged = stats.final_relative_residual <= opts.tol;
  return {std::move(x), stats};
}

}  // namespace eikplan

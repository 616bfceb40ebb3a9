#pragma once

#include <Eigen/SparseCore>

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eikplan/types.hpp"

namespace eikplan {

struct Triplet {
  Index row = 0;
  Index col = 0;
  Real value = 0;
};

struct SolveStats {
  int iterations = 0;
  Real final_relative_residual = 0;
  bool converged = false;
  std::string method;
};

/// Compressed sparse row matrix. Column indices are sorted and unique within
/// each row; immutable after construction.
class CsrMatrix {
 public:
  using Storage = Eigen::SparseMatrix<Real, Eigen::RowMajor, Index>;

  CsrMatrix() = default;

  /// Duplicate (row, col) entries are summed. The summation order is fixed
  /// by sorting on (row, col, value bits), so the result is invariant under
  /// permutation of the triplet list. Throws BuildError on out-of-range
  /// indices.
  static CsrMatrix from_triplets(Index n_rows, Index n_cols,
                                 std::span<const Triplet> triplets);

  Index rows() const { return static_cast<Index>(mat_.rows()); }
  Index cols() const { return static_cast<Index>(mat_.cols()); }
  Index nnz() const { return static_cast<Index>(mat_.nonZeros()); }

  std::span<const Index> row_offsets() const {
    return {mat_.outerIndexPtr(), static_cast<std::size_t>(mat_.rows() + 1)};
  }
  std::span<const Index> col_indices() const {
    return {mat_.innerIndexPtr(), static_cast<std::size_t>(mat_.nonZeros())};
  }
  std::span<const Real> values() const {
    return {mat_.valuePtr(), static_cast<std::size_t>(mat_.nonZeros())};
  }

  Vector multiply(const Vector& x) const { return mat_ * x; }

  const Storage& eigen() const { return mat_; }

  /// MatrixMarket coordinate format (1-based indices).
  void write_matrix_market(const std::string& path) const;

 private:
  Storage mat_;
};

struct SolveOptions {
  Real tol = 1e-10;
  int max_iter = 1000;
  Index direct_threshold = 5000;  ///< direct factorization at or below this size
  bool direct_rescue = true;      ///< factorize if the iteration stalls
  int restart = 50;
  Real ilut_drop_tol = 1e-4;
  int ilut_fill = 10;
};

/// Solves A x = b. Systems at or below direct_threshold unknowns use a
/// sparse direct factorization; larger systems use restarted GMRES with an
/// incomplete-LU preconditioner. The reported residual is recomputed from
/// the returned iterate, never trusted from the iteration. Non-convergence
/// is reported in the stats (best iterate returned), never thrown.
std::pair<Vector, SolveStats> solve(const CsrMatrix& A, const Vector& b,
                                    const SolveOptions& opts,
                                    const Vector* x0 = nullptr);

inline std::pair<Vector, SolveStats> solve(const CsrMatrix& A, const Vector& b,
                                           Real tol, int max_iter) {
  SolveOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  return solve(A, b, opts);
}

}  // namespace eikplan

#pragma once

#include <Eigen/Core>

#include <cstdint>

namespace eikplan {

using Real = double;

/// Dense column vector of arbitrary scalar type.
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Vector  = VectorX<Real>;
using Vector2 = Eigen::Matrix<Real, 2, 1>;
using Matrix2 = Eigen::Matrix<Real, 2, 2>;

/// Index type for mesh entities and sparse matrices.
using Index = std::int32_t;

}  // namespace eikplan

#pragma once

#include <span>

#include "crm/operators.hpp"

namespace crm {

/// m blocks of R^n stored contiguously (block i occupies [i*n, (i+1)*n)).
class LiftedPoint {
 public:
  LiftedPoint(Index block_dimension, Index blocks);
  LiftedPoint(Vector flat, Index block_dimension);

  Index block_dimension() const noexcept { return n_; }
  Index block_count() const noexcept { return m_; }

  auto block(Index i) { return flat_.segment(i * n_, n_); }
  auto block(Index i) const { return flat_.segment(i * n_, n_); }

  const Vector& flat() const noexcept { return flat_; }
  Vector& flat() noexcept { return flat_; }

  Vector mean() const;

 private:
  Vector flat_;
  Index n_;
  Index m_;
};

/// The diagonal {(x, ..., x)} of R^{n*m}; stores only its shape.
struct DiagonalSubspace {
  Index block_dimension = 0;
  Index blocks = 0;

  Index dimension() const noexcept { return block_dimension * blocks; }
  /// Replaces every block by the block mean.
  Vector project(const Vector& flat) const;
};

/// Blockwise evaluation: block i of the result is ops[i] applied to block i.
LiftedPoint lift_apply(std::span<const Operator> ops, const LiftedPoint& x);

LiftedPoint diag_project(const LiftedPoint& x);

LiftedPoint embed(const Vector& x, Index blocks);

/// Common block of a diagonal point (taken as the mean); NotDiagonal when some
/// block deviates from the mean by more than tol.
Vector extract(const LiftedPoint& x, double tol = 1e-9);

}  // namespace crm

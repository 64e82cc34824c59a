#include "crm/product_space.hpp"

#include <string>

#include "crm/error.hpp"

namespace crm {

LiftedPoint::LiftedPoint(Index block_dimension, Index blocks)
    : flat_(Vector::Zero(block_dimension * blocks)), n_(block_dimension), m_(blocks) {
  if (n_ < 1 || m_ < 1) throw Error(ErrorKind::InvalidArgument, "lifted point needs n >= 1 and m >= 1");
}

LiftedPoint::LiftedPoint(Vector flat, Index block_dimension)
    : flat_(std::move(flat)), n_(block_dimension), m_(0) {
  if (n_ < 1 || flat_.size() < n_ || flat_.size() % n_ != 0) {
    throw Error(ErrorKind::DimensionMismatch, "flat vector is not a whole number of blocks");
  }
  m_ = flat_.size() / n_;
}

Vector LiftedPoint::mean() const {
  return flat_.reshaped(n_, m_).rowwise().mean();
}

Vector DiagonalSubspace::project(const Vector& flat) const {
  require_same_dimension(flat.size(), dimension(), "diagonal projection");
  const Vector mean = flat.reshaped(block_dimension, blocks).rowwise().mean();
  return mean.replicate(blocks, 1);
}

LiftedPoint lift_apply(std::span<const Operator> ops, const LiftedPoint& x) {
  if (static_cast<Index>(ops.size()) != x.block_count()) {
    throw Error(ErrorKind::BlockCountMismatch, std::to_string(ops.size()) + " operators for " +
                                                   std::to_string(x.block_count()) + " blocks");
  }
  LiftedPoint out(x.block_dimension(), x.block_count());
  for (Index i = 0; i < x.block_count(); ++i) {
    require_same_dimension(ops[i].dimension(), x.block_dimension(), "lift_apply block");
    out.block(i) = ops[i].apply(x.block(i));
  }
  return out;
}

LiftedPoint diag_project(const LiftedPoint& x) {
  const DiagonalSubspace diag{x.block_dimension(), x.block_count()};
  return LiftedPoint(diag.project(x.flat()), x.block_dimension());
}

LiftedPoint embed(const Vector& x, Index blocks) {
  if (blocks < 1) throw Error(ErrorKind::InvalidArgument, "embed needs m >= 1");
  return LiftedPoint(x.replicate(blocks, 1), x.size());
}

Vector extract(const LiftedPoint& x, double tol) {
  Vector mean = x.mean();
  double worst = 0.0;
  for (Index i = 0; i < x.block_count(); ++i) {
    worst = std::max(worst, (x.block(i) - mean).norm());
  }
  if (worst > tol) {
    throw Error(ErrorKind::NotDiagonal, "block deviation " + std::to_string(worst) + " exceeds tolerance");
  }
  return mean;
}

}  // namespace crm

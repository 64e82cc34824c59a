#include "crm/operators.hpp"

#include <algorithm>
#include <cmath>
#include <execution>
#include <numeric>
#include <string>

#include "crm/error.hpp"

namespace crm {

std::string_view to_string(OperatorKind kind) noexcept {
  switch (kind) {
    case OperatorKind::Identity: return "identity";
    case OperatorKind::HalfspaceProjection: return "halfspace-projection";
    case OperatorKind::AffineSubspaceProjection: return "affine-subspace-projection";
    case OperatorKind::BallProjection: return "ball-projection";
    case OperatorKind::EllipsoidProjection: return "ellipsoid-projection";
    case OperatorKind::ConvexCombination: return "convex-combination";
    case OperatorKind::Composition: return "composition";
    case OperatorKind::Lifted: return "lifted";
  }
  return "unknown";
}

AffineSubspace::AffineSubspace(Vector anchor, Matrix basis)
    : anchor_(std::move(anchor)), basis_(std::move(basis)) {
  if (basis_.cols() == 0) basis_.resize(anchor_.size(), 0);
  require_same_dimension(basis_.rows(), anchor_.size(), "affine subspace basis");
  if (basis_.cols() > 0) {
    const Matrix gram = basis_.transpose() * basis_;
    const double err = (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
    if (err > 1e-12) throw Error(ErrorKind::InvalidArgument, "affine subspace basis is not orthonormal");
  }
}

AffineSubspace AffineSubspace::from_span(Vector anchor, const Matrix& directions) {
  require_same_dimension(directions.rows(), anchor.size(), "affine subspace span");
  if (directions.cols() == 0) return AffineSubspace(std::move(anchor), Matrix(anchor.size(), 0));
  Eigen::ColPivHouseholderQR<Matrix> qr(directions);
  qr.setThreshold(1e-12);
  const Index rank = qr.rank();
  Matrix q = qr.householderQ() * Matrix::Identity(directions.rows(), rank);
  return AffineSubspace(std::move(anchor), std::move(q));
}

Vector AffineSubspace::project(const Vector& x) const {
  require_same_dimension(x.size(), dimension(), "affine subspace projection");
  if (basis_.cols() == 0) return anchor_;
  return anchor_ + basis_ * (basis_.transpose() * (x - anchor_));
}

Operator::Operator(Node node, Index dimension)
    : node_(std::make_shared<const Node>(std::move(node))), dimension_(dimension) {}

Operator Operator::identity(Index dimension) {
  if (dimension < 1) throw Error(ErrorKind::InvalidArgument, "identity dimension must be >= 1");
  return Operator(IdentityOp{dimension}, dimension);
}

Operator Operator::halfspace(Vector normal, double offset) {
  if (normal.size() < 1 || !(normal.norm() > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "halfspace normal must be nonzero");
  }
  const Index n = normal.size();
  return Operator(Halfspace{std::move(normal), offset}, n);
}

Operator Operator::affine(AffineSubspace subspace) {
  const Index n = subspace.dimension();
  return Operator(std::move(subspace), n);
}

Operator Operator::ball(Vector center, double radius) {
  if (!(radius >= 0.0)) throw Error(ErrorKind::InvalidArgument, "ball radius must be nonnegative");
  const Index n = center.size();
  return Operator(Ball{std::move(center), radius}, n);
}

Operator Operator::ellipsoid(Ellipsoid set, EllipsoidMethod method, AdmmConfig admm) {
  admm.validate();
  const Index n = set.dimension();
  return Operator(EllipsoidProjector{std::move(set), method, admm}, n);
}

Operator Operator::convex_combination(std::vector<double> weights, std::vector<Operator> terms) {
  if (terms.empty()) throw Error(ErrorKind::EmptyOperatorList, "convex combination needs terms");
  if (weights.size() != terms.size()) {
    throw Error(ErrorKind::InvalidWeight, "one weight per term required");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw Error(ErrorKind::InvalidWeight, "weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorKind::InvalidWeight, "weights must sum to 1 (got " + std::to_string(total) + ")");
  }
  const Index n = terms.front().dimension();
  for (const auto& t : terms) require_same_dimension(t.dimension(), n, "convex combination term");
  return Operator(CombinationOp{std::move(weights), std::move(terms)}, n);
}

Operator Operator::composition(std::vector<Operator> stages) {
  if (stages.empty()) throw Error(ErrorKind::EmptyOperatorList, "composition needs stages");
  const Index n = stages.front().dimension();
  for (const auto& s : stages) require_same_dimension(s.dimension(), n, "composition stage");
  return Operator(CompositionOp{std::move(stages)}, n);
}

Operator Operator::lifted(std::vector<Operator> blocks, bool parallel) {
  if (blocks.empty()) throw Error(ErrorKind::EmptyOperatorList, "lifted operator needs blocks");
  const Index n = blocks.front().dimension();
  for (const auto& b : blocks) require_same_dimension(b.dimension(), n, "lifted block");
  const Index total = n * static_cast<Index>(blocks.size());
  return Operator(LiftedOp{std::move(blocks), n, parallel}, total);
}

OperatorKind Operator::kind() const noexcept {
  return static_cast<OperatorKind>(node_->index());
}

bool Operator::is_firmly_nonexpansive() const noexcept {
  switch (kind()) {
    case OperatorKind::Composition: return false;
    case OperatorKind::ConvexCombination:
      return std::ranges::all_of(as<CombinationOp>()->terms,
                                 [](const Operator& t) { return t.is_firmly_nonexpansive(); });
    case OperatorKind::Lifted:
      return std::ranges::all_of(as<LiftedOp>()->blocks,
                                 [](const Operator& t) { return t.is_firmly_nonexpansive(); });
    default: return true;
  }
}

bool Operator::is_projection() const noexcept {
  switch (kind()) {
    case OperatorKind::Identity:
    case OperatorKind::HalfspaceProjection:
    case OperatorKind::AffineSubspaceProjection:
    case OperatorKind::BallProjection:
    case OperatorKind::EllipsoidProjection: return true;
    default: return false;
  }
}

namespace {

Vector project_halfspace(const Halfspace& h, const Vector& x) {
  const double excess = h.normal.dot(x) - h.offset;
  if (excess <= 0.0) return x;
  return x - (excess / h.normal.squaredNorm()) * h.normal;
}

Vector project_ball(const Ball& b, const Vector& x) {
  const Vector d = x - b.center;
  const double dist = d.norm();
  if (dist <= b.radius) return x;
  return b.center + (b.radius / dist) * d;
}

}  // namespace

Vector Operator::apply(const Vector& x) const {
  require_same_dimension(x.size(), dimension_, "operator apply");
  return std::visit(
      [&](const auto& op) -> Vector {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, IdentityOp>) {
          return x;
        } else if constexpr (std::is_same_v<T, Halfspace>) {
          return project_halfspace(op, x);
        } else if constexpr (std::is_same_v<T, AffineSubspace>) {
          return op.project(x);
        } else if constexpr (std::is_same_v<T, Ball>) {
          return project_ball(op, x);
        } else if constexpr (std::is_same_v<T, EllipsoidProjector>) {
          if (op.method == EllipsoidMethod::Kkt) return project_kkt(op.set, x, op.kkt_tolerance);
          return project_admm(op.set, x, op.admm).point;
        } else if constexpr (std::is_same_v<T, CombinationOp>) {
          Vector out = Vector::Zero(x.size());
          for (std::size_t i = 0; i < op.terms.size(); ++i) {
            if (op.weights[i] != 0.0) out += op.weights[i] * op.terms[i].apply(x);
          }
          return out;
        } else if constexpr (std::is_same_v<T, CompositionOp>) {
          Vector out = x;
          for (const auto& stage : op.stages) out = stage.apply(out);
          return out;
        } else {
          static_assert(std::is_same_v<T, LiftedOp>);
          Vector out(x.size());
          const Index n = op.block_dimension;
          auto block = [&](std::size_t i) {
            const Index start = static_cast<Index>(i) * n;
            out.segment(start, n) = op.blocks[i].apply(x.segment(start, n));
          };
          std::vector<std::size_t> ids(op.blocks.size());
          std::iota(ids.begin(), ids.end(), std::size_t{0});
          if (op.parallel) {
            std::for_each(std::execution::par, ids.begin(), ids.end(), block);
          } else {
            std::for_each(ids.begin(), ids.end(), block);
          }
          return out;
        }
      },
      *node_);
}

Operator Operator::translated(const Vector& shift) const {
  require_same_dimension(shift.size(), dimension_, "translate");
  switch (kind()) {
    case OperatorKind::HalfspaceProjection: {
      const auto& h = *as<Halfspace>();
      return halfspace(h.normal, h.offset + h.normal.dot(shift));
    }
    case OperatorKind::AffineSubspaceProjection: {
      const auto& a = *as<AffineSubspace>();
      return affine(AffineSubspace(a.anchor() + shift, a.basis()));
    }
    case OperatorKind::BallProjection: {
      const auto& b = *as<Ball>();
      return ball(b.center + shift, b.radius);
    }
    case OperatorKind::EllipsoidProjection: {
      // E + c = {x : (x-c)^T A (x-c) + 2 b^T (x-c) - alpha <= 0}
      const auto& e = *as<EllipsoidProjector>();
      const Matrix& A = e.set.A();
      const Vector Ac = A * shift;
      Ellipsoid moved(A, e.set.b() - Ac, e.set.alpha() - shift.dot(Ac) + 2.0 * e.set.b().dot(shift));
      return ellipsoid(std::move(moved), e.method, e.admm);
    }
    default:
      throw Error(ErrorKind::InvalidArgument,
                  std::string("translation needs a set projection, got ") + std::string(to_string(kind())));
  }
}

double firm_nonexpansiveness_slack(const Operator& op, const Vector& x, const Vector& y) {
  require_same_dimension(x.size(), y.size(), "firm nonexpansiveness slack");
  const Vector diff = op.apply(x) - op.apply(y);
  return diff.dot(x - y) - diff.squaredNorm();
}

double fixed_point_residual(const Operator& op, const Vector& x) {
  return (x - op.apply(x)).norm();
}

}  // namespace crm

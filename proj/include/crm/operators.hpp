#pragma once

#include <memory>
#include <string_view>
#include <variant>
#include <vector>

#include "crm/ellipsoid.hpp"
#include "crm/types.hpp"

namespace crm {

enum class OperatorKind {
  Identity,
  HalfspaceProjection,
  AffineSubspaceProjection,
  BallProjection,
  EllipsoidProjection,
  ConvexCombination,
  Composition,
  Lifted,
};

std::string_view to_string(OperatorKind kind) noexcept;

/// {x : <normal, x> <= offset}, normal nonzero.
struct Halfspace {
  Vector normal;
  double offset = 0.0;
};

struct Ball {
  Vector center;
  double radius = 0.0;
};

/// anchor + span(basis columns); the columns are orthonormal.
class AffineSubspace {
 public:
  /// Requires orthonormal columns (within 1e-12).
  AffineSubspace(Vector anchor, Matrix basis);

  /// Orthonormalizes the (possibly dependent) spanning columns.
  static AffineSubspace from_span(Vector anchor, const Matrix& directions);

  const Vector& anchor() const noexcept { return anchor_; }
  const Matrix& basis() const noexcept { return basis_; }
  Index dimension() const noexcept { return anchor_.size(); }

  Vector project(const Vector& x) const;

 private:
  Vector anchor_;
  Matrix basis_;
};

enum class EllipsoidMethod { Admm, Kkt };

struct EllipsoidProjector {
  Ellipsoid set;
  EllipsoidMethod method = EllipsoidMethod::Admm;
  AdmmConfig admm{};
  double kkt_tolerance = 1e-12;
};

class Operator;

struct IdentityOp {
  Index dimension = 0;
};

struct CombinationOp {
  std::vector<double> weights;
  std::vector<Operator> terms;
};

/// stages[0] is applied first.
struct CompositionOp {
  std::vector<Operator> stages;
};

/// Blockwise operator on R^{n*m}: block i goes through blocks[i].
struct LiftedOp {
  std::vector<Operator> blocks;
  Index block_dimension = 0;
  bool parallel = false;
};

/// Handle to an immutable operator R^d -> R^d built from a closed set of
/// kinds. Copies share the underlying node.
class Operator {
 public:
  using Node = std::variant<IdentityOp, Halfspace, AffineSubspace, Ball, EllipsoidProjector,
                            CombinationOp, CompositionOp, LiftedOp>;

  static Operator identity(Index dimension);
  static Operator halfspace(Vector normal, double offset);
  static Operator affine(AffineSubspace subspace);
  static Operator ball(Vector center, double radius);
  static Operator ellipsoid(Ellipsoid set, EllipsoidMethod method = EllipsoidMethod::Admm,
                            AdmmConfig admm = {});
  /// Weights must be nonnegative and sum to 1 within 1e-12.
  static Operator convex_combination(std::vector<double> weights, std::vector<Operator> terms);
  static Operator composition(std::vector<Operator> stages);
  static Operator lifted(std::vector<Operator> blocks, bool parallel = false);

  OperatorKind kind() const noexcept;
  Index dimension() const noexcept { return dimension_; }
  const Node& node() const noexcept { return *node_; }

  template <class T>
  const T* as() const noexcept {
    return std::get_if<T>(node_.get());
  }

  /// Projections, their convex combinations and lifts are firmly
  /// nonexpansive; compositions are only guaranteed nonexpansive.
  bool is_firmly_nonexpansive() const noexcept;
  /// Orthogonal projection onto a closed convex set (idempotent).
  bool is_projection() const noexcept;

  Vector apply(const Vector& x) const;
  Vector operator()(const Vector& x) const { return apply(x); }

  /// For projection kinds: the same set translated by `shift`.
  Operator translated(const Vector& shift) const;

 private:
  Operator(Node node, Index dimension);

  std::shared_ptr<const Node> node_;
  Index dimension_ = 0;
};

inline Vector apply(const Operator& op, const Vector& x) { return op.apply(x); }

/// <T(x) - T(y), x - y> - |T(x) - T(y)|^2; nonnegative on pairs where T
/// satisfies the firm nonexpansiveness inequality.
double firm_nonexpansiveness_slack(const Operator& op, const Vector& x, const Vector& y);

/// |x - T(x)|.
double fixed_point_residual(const Operator& op, const Vector& x);

}  // namespace crm

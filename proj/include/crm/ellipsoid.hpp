#pragma once

#include <memory>

#include "crm/types.hpp"

namespace crm {

/// Stopping rule of the ADMM projector: successive iterates closer than
/// `tolerance`, or `max_iterations` reached.
struct AdmmConfig {
  double tolerance = 1e-8;
  long max_iterations = 10000;
  double penalty = 1.0;

  void validate() const;
};

struct AdmmResult {
  Vector point;
  long iterations = 0;
  bool converged = false;  ///< false: MaxIterationsExceeded, `point` is the last iterate
};

/// {x : x^T A x + 2 b^T x - alpha <= 0} with A symmetric positive definite and
/// alpha > 0 (so 0 is interior). Immutable; the eigendecomposition of A is
/// computed once at construction and shared between copies.
class Ellipsoid {
 public:
  Ellipsoid(Matrix A, Vector b, double alpha);

  const Matrix& A() const noexcept { return A_; }
  const Vector& b() const noexcept { return b_; }
  double alpha() const noexcept { return alpha_; }
  Index dimension() const noexcept { return b_.size(); }
  double min_eigenvalue() const noexcept;

  /// g(x) = x^T A x + 2 b^T x - alpha.
  double evaluate(const Vector& x) const;
  bool contains(const Vector& x) const { return evaluate(x) <= 0.0; }

  /// Spectral data: A = Q diag(eigenvalues) Q^T.
  struct Spectral {
    Matrix Q;
    Vector eigenvalues;
    Vector b_rotated;   ///< Q^T b
    double radius = 0;  ///< E = {x : |A^{1/2}(x + A^{-1} b)| <= radius}
  };
  const Spectral& spectral() const noexcept { return *spectral_; }

 private:
  Matrix A_;
  Vector b_;
  double alpha_;
  std::shared_ptr<const Spectral> spectral_;
};

double evaluate_g(const Ellipsoid& e, const Vector& x);

/// g(p(lambda)) with p(lambda) = (I + lambda A)^{-1} (x - lambda b); strictly
/// decreasing in lambda >= 0 when x is exterior.
double kkt_constraint_at(const Ellipsoid& e, const Vector& x, double lambda);

/// Exact projection through the scalar KKT multiplier: returns p(lambda*)
/// with |g(p(lambda*))| <= tol. Interior points are returned unchanged.
Vector project_kkt(const Ellipsoid& e, const Vector& x, double tol = 1e-12);

/// ADMM projector on the splitting min |p - x|^2 / 2 subject to
/// A^{1/2}(p + A^{-1} b) = z, |z| <= radius. Both subproblems are closed form
/// in the eigenbasis of A.
AdmmResult project_admm(const Ellipsoid& e, const Vector& x, const AdmmConfig& cfg = {});

}  // namespace crm

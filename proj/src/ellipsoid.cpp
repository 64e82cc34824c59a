#include "crm/ellipsoid.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "crm/error.hpp"

namespace crm {

void AdmmConfig::validate() const {
  if (!(tolerance > 0.0)) throw Error(ErrorKind::InvalidArgument, "ADMM tolerance must be positive");
  if (max_iterations < 1) throw Error(ErrorKind::InvalidArgument, "ADMM max_iterations must be >= 1");
  if (!(penalty > 0.0)) throw Error(ErrorKind::InvalidArgument, "ADMM penalty must be positive");
}

Ellipsoid::Ellipsoid(Matrix A, Vector b, double alpha)
    : A_(std::move(A)), b_(std::move(b)), alpha_(alpha) {
  const Index n = b_.size();
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "ellipsoid dimension must be >= 1");
  if (A_.rows() != n || A_.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, "ellipsoid matrix must be n x n with n = dim(b)");
  }
  if (!A_.allFinite() || !b_.allFinite() || !std::isfinite(alpha_)) {
    throw Error(ErrorKind::InvalidArgument, "ellipsoid data must be finite");
  }
  if ((A_ - A_.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw Error(ErrorKind::InvalidArgument, "ellipsoid matrix is not symmetric");
  }
  if (!(alpha_ > 0.0)) throw Error(ErrorKind::InvalidArgument, "ellipsoid alpha must be positive");

  Eigen::SelfAdjointEigenSolver<Matrix> eig(A_);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidArgument, "eigendecomposition of ellipsoid matrix failed");
  }
  if (!(eig.eigenvalues().minCoeff() > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "ellipsoid matrix is not positive definite");
  }
  auto s = std::make_shared<Spectral>();
  s->Q = eig.eigenvectors();
  s->eigenvalues = eig.eigenvalues();
  s->b_rotated = s->Q.transpose() * b_;
  const double shift = (s->b_rotated.array().square() / s->eigenvalues.array()).sum();
  s->radius = std::sqrt(alpha_ + shift);
  spectral_ = std::move(s);
}

double Ellipsoid::min_eigenvalue() const noexcept { return spectral_->eigenvalues.minCoeff(); }

double Ellipsoid::evaluate(const Vector& x) const {
  require_same_dimension(x.size(), dimension(), "ellipsoid evaluate");
  return x.dot(A_ * x) + 2.0 * b_.dot(x) - alpha_;
}

double evaluate_g(const Ellipsoid& e, const Vector& x) { return e.evaluate(x); }

namespace {

// Everything below works in the eigenbasis of A, where (I + lambda A) is diagonal.
struct RotatedKkt {
  const Vector& eig;
  const Vector& b;
  const Vector& x;
  double alpha;

  Vector point(double lambda) const {
    return (x - lambda * b).array() / (1.0 + lambda * eig.array());
  }

  double constraint(const Vector& p) const {
    return (eig.array() * p.array().square()).sum() + 2.0 * b.dot(p) - alpha;
  }

  // d/dlambda g(p(lambda)) = -2 sum (eig p + b)^2 / (1 + lambda eig)
  double slope(double lambda, const Vector& p) const {
    return -2.0 * ((eig.array() * p.array() + b.array()).square() /
                   (1.0 + lambda * eig.array()))
                      .sum();
  }
};

}  // namespace

double kkt_constraint_at(const Ellipsoid& e, const Vector& x, double lambda) {
  require_same_dimension(x.size(), e.dimension(), "kkt_constraint_at");
  const auto& s = e.spectral();
  const Vector xr = s.Q.transpose() * x;
  const RotatedKkt kkt{s.eigenvalues, s.b_rotated, xr, e.alpha()};
  return kkt.constraint(kkt.point(lambda));
}

Vector project_kkt(const Ellipsoid& e, const Vector& x, double tol) {
  require_same_dimension(x.size(), e.dimension(), "project_kkt");
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "project_kkt tolerance must be positive");
  if (e.evaluate(x) <= 0.0) return x;

  const auto& s = e.spectral();
  const Vector xr = s.Q.transpose() * x;
  const RotatedKkt kkt{s.eigenvalues, s.b_rotated, xr, e.alpha()};

  double lo = 0.0;
  double hi = 1.0 / s.eigenvalues.maxCoeff();
  int doublings = 0;
  while (kkt.constraint(kkt.point(hi)) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 2000 || !std::isfinite(hi)) {
      throw Error(ErrorKind::RootNotBracketed, "no sign change of g(p(lambda))");
    }
  }

  // Safeguarded Newton on the bracket [lo, hi] where g(p(lo)) > 0 > g(p(hi)).
  double lambda = 0.5 * (lo + hi);
  Vector best = kkt.point(hi);
  double best_abs = std::abs(kkt.constraint(best));
  for (int it = 0; it < 500; ++it) {
    const Vector p = kkt.point(lambda);
    const double g = kkt.constraint(p);
    if (std::abs(g) < best_abs) {
      best_abs = std::abs(g);
      best = p;
    }
    if (std::abs(g) <= tol) break;
    if (g > 0.0) {
      lo = lambda;
    } else {
      hi = lambda;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
    const double step = g / kkt.slope(lambda, p);
    double next = lambda - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    lambda = next;
  }
  return s.Q * best;
}

AdmmResult project_admm(const Ellipsoid& e, const Vector& x, const AdmmConfig& cfg) {
  require_same_dimension(x.size(), e.dimension(), "project_admm");
  cfg.validate();
  if (e.evaluate(x) <= 0.0) return {x, 1, true};

  const auto& s = e.spectral();
  const double beta = cfg.penalty;
  const Eigen::ArrayXd root = s.eigenvalues.array().sqrt();
  const Eigen::ArrayXd shift = s.b_rotated.array() / root;  // A^{1/2} A^{-1} b, rotated
  const Eigen::ArrayXd denom = 1.0 + beta * s.eigenvalues.array();
  const Eigen::ArrayXd xr = (s.Q.transpose() * x).array();

  auto ball = [radius = s.radius](const Eigen::ArrayXd& v) -> Eigen::ArrayXd {
    const double norm = std::sqrt(v.square().sum());
    return norm <= radius ? v : Eigen::ArrayXd(v * (radius / norm));
  };

  Eigen::ArrayXd y = xr;
  Eigen::ArrayXd z = ball(root * y + shift);
  Eigen::ArrayXd u = Eigen::ArrayXd::Zero(y.size());

  AdmmResult result;
  for (long k = 1; k <= cfg.max_iterations; ++k) {
    const Eigen::ArrayXd y_next = (xr - beta * root * (shift - z + u)) / denom;
    const Eigen::ArrayXd v = root * y_next + shift + u;
    const Eigen::ArrayXd z_next = ball(v);
    const Eigen::ArrayXd u_next = v - z_next;
    const double change = std::sqrt((y_next - y).square().sum() + (z_next - z).square().sum() +
                                    (u_next - u).square().sum());
    y = y_next;
    z = z_next;
    u = u_next;
    result.iterations = k;
    if (change < cfg.tolerance) {
      result.converged = true;
      break;
    }
  }
  result.point = s.Q * y.matrix();
  return result;
}

}  // namespace crm

#include "crm/theory.hpp"

#include <algorithm>

#include "crm/error.hpp"

namespace crm {

DistancePair DistancePair::certified(Vector u, Vector v) {
  require_same_dimension(u.size(), v.size(), "distance pair");
  const double gap = (u - v).norm();
  return {std::move(u), std::move(v), gap};
}

namespace {

void require_open_unit(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::InvalidWeight, "alpha must lie in (0, 1)");
  }
}

}  // namespace

double translated_projection_deviation(const Operator& set_a, const Vector& shift, double alpha,
                                       std::span<const Vector> samples) {
  require_open_unit(alpha);
  if (samples.empty()) throw Error(ErrorKind::InvalidArgument, "no samples");
  const Operator set_b = set_a.translated(shift);
  const Operator average = Operator::convex_combination({1.0 - alpha, alpha}, {set_a, set_b});
  const Operator target = set_a.translated(alpha * shift);
  double worst = 0.0;
  for (const auto& x : samples) worst = std::max(worst, (average(x) - target(x)).norm());
  return worst;
}

WitnessCheck fixed_set_witness_check(const Operator& set_a, const Operator& set_b,
                                     const DistancePair& pair, double alpha) {
  require_open_unit(alpha);
  const Operator average = Operator::convex_combination({1.0 - alpha, alpha}, {set_a, set_b});
  Vector w = (1.0 - alpha) * pair.u + alpha * pair.v;
  const double residual = (average(w) - w).norm();
  const double mismatch = std::max((set_a(w) - pair.u).norm(), (set_b(w) - pair.v).norm());
  return {std::move(w), residual, mismatch};
}

double idempotence_violation_search(const Operator& op, std::span<const Vector> samples) {
  double worst = 0.0;
  for (const auto& x : samples) {
    const Vector once = op(x);
    worst = std::max(worst, (op(once) - once).norm());
  }
  return worst;
}

double gradient_check(const Operator& set, const Vector& x, double step) {
  if (!(step > 0.0)) throw Error(ErrorKind::InvalidArgument, "finite-difference step must be positive");
  auto h = [&](const Vector& p) { return (p - set(p)).squaredNorm(); };
  const Vector analytic = 2.0 * (x - set(x));
  Vector numeric(x.size());
  Vector probe = x;
  for (Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double up = h(probe);
    probe[i] = x[i] - step;
    const double down = h(probe);
    probe[i] = x[i];
    numeric[i] = (up - down) / (2.0 * step);
  }
  return (numeric - analytic).norm() / std::max(1.0, analytic.norm());
}

}  // namespace crm

#pragma once

#include <span>

#include "crm/operators.hpp"

namespace crm {

/// Points u in A and v in B with |u - v| = dist(A, B). Only constructed from
/// configurations where the distance is known in closed form.
struct DistancePair {
  Vector u;
  Vector v;
  double gap = 0.0;

  static DistancePair certified(Vector u, Vector v);
};

/// Builds B = A + shift, the average (1-alpha) P_A + alpha P_B and the
/// translate E = A + alpha * shift, and returns the largest
/// |average(x) - P_E(x)| over the samples. Vanishes when shift is orthogonal
/// to aff(A).
double translated_projection_deviation(const Operator& set_a, const Vector& shift, double alpha,
                                       std::span<const Vector> samples);

struct WitnessCheck {
  Vector point;          ///< w = (1-alpha) u + alpha v
  double residual;       ///< |P(w) - w| for P = (1-alpha) P_A + alpha P_B
  double pair_mismatch;  ///< max(|P_A(w) - u|, |P_B(w) - v|)
};

/// Fixed points of a two-set average lie on segments between nearest pairs.
WitnessCheck fixed_set_witness_check(const Operator& set_a, const Operator& set_b,
                                     const DistancePair& pair, double alpha);

/// max over samples of |T(T(x)) - T(x)|; positive means T is not a projection.
double idempotence_violation_search(const Operator& op, std::span<const Vector> samples);

/// Relative deviation between the central-difference gradient of
/// x -> |x - P_C(x)|^2 and the closed form 2 (x - P_C(x)).
double gradient_check(const Operator& set, const Vector& x, double step);

}  // namespace crm

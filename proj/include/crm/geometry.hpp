#pragma once

#include "crm/types.hpp"

namespace crm {

class Operator;

enum class CircumcenterKind { Proper, SinglePoint, Midpoint };

struct CircumcenterOutcome {
  CircumcenterKind kind;
  Vector center;
};

/// Relative tolerances shared by the circumcenter and the CRM step so the two
/// layers classify degenerate configurations identically.
inline constexpr double kCoincidenceTol = 1e-12;
inline constexpr double kGramRankTol = 1e-24;

/// Point of aff{p0, p1, p2} equidistant from the distinct points among them.
///
/// Coincident points (distance <= 1e-12 * (1 + max input norm)) are merged:
/// three coincident points give SinglePoint, two distinct points give the
/// Midpoint. Three pairwise-distinct collinear points have no circumcenter and
/// raise CollinearNoCircumcenter.
CircumcenterOutcome circumcenter3(const Vector& p0, const Vector& p1, const Vector& p2);

/// 2 * image - x, the reflection of x once T(x) is known.
Vector reflect_through(const Vector& image, const Vector& x);

/// 2 T(x) - x.
Vector reflect(const Operator& op, const Vector& x);

}  // namespace crm

#include "crm/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "crm/error.hpp"
#include "crm/operators.hpp"

namespace crm {

CircumcenterOutcome circumcenter3(const Vector& p0, const Vector& p1, const Vector& p2) {
  require_same_dimension(p0.size(), p1.size(), "circumcenter3");
  require_same_dimension(p0.size(), p2.size(), "circumcenter3");
  if (p0.size() < 1) throw Error(ErrorKind::InvalidArgument, "circumcenter3: empty points");

  const double scale = 1.0 + std::max({p0.norm(), p1.norm(), p2.norm()});
  const double merge = kCoincidenceTol * scale;
  const bool same01 = (p1 - p0).norm() <= merge;
  const bool same02 = (p2 - p0).norm() <= merge;
  const bool same12 = (p2 - p1).norm() <= merge;

  if (same01 && same02) return {CircumcenterKind::SinglePoint, p0};
  if (same01 || same02 || same12) {
    // Exactly two distinct points remain; the center is their midpoint.
    const Vector& other = same01 ? p2 : p1;
    return {CircumcenterKind::Midpoint, 0.5 * (p0 + other)};
  }

  // Gram system G (a, b)^T = 1/2 (|v1|^2, |v2|^2)^T, eliminated through the
  // component of v2 orthogonal to v1 so the determinant is formed without
  // cancellation: det G = |v1|^2 |v2_perp|^2.
  const Vector v1 = p1 - p0;
  const Vector v2 = p2 - p0;
  const double g11 = v1.squaredNorm();
  const double g12 = v1.dot(v2);
  const double g22 = v2.squaredNorm();
  const Vector v2perp = v2 - (g12 / g11) * v1;
  const double perp2 = v2perp.squaredNorm();
  const double det = g11 * perp2;
  if (det <= kGramRankTol * g11 * g22) {
    throw Error(ErrorKind::CollinearNoCircumcenter, "three distinct collinear points");
  }
  // c = p0 + v1/2 + t v2_perp with <c - p0, v2> = |v2|^2 / 2.
  const double t = 0.5 * (g22 - g12) / perp2;
  return {CircumcenterKind::Proper, p0 + 0.5 * v1 + t * v2perp};
}

Vector reflect_through(const Vector& image, const Vector& x) { return 2.0 * image - x; }

Vector reflect(const Operator& op, const Vector& x) {
  return reflect_through(op.apply(x), x);
}

}  // namespace crm

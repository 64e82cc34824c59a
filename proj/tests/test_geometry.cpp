#include <doctest.h>

#include <algorithm>

#include "crm/error.hpp"
#include "crm/geometry.hpp"
#include "crm/operators.hpp"
#include "test_util.hpp"

using namespace crm;
using crm::testing::random_vector;

namespace {

Vector v2(double a, double b) { return Vector{{a, b}}; }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected crm::Error");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("circumcenter of a right triangle is the hypotenuse midpoint") {
  const auto out = circumcenter3(v2(0, 0), v2(2, 0), v2(0, 2));
  CHECK(out.kind == CircumcenterKind::Proper);
  CHECK(out.center.isApprox(v2(1, 1), 1e-15));
}

TEST_CASE("circumcenter degenerate classes") {
  SUBCASE("all coincide") {
    const auto out = circumcenter3(v2(3, 7), v2(3, 7), v2(3, 7));
    CHECK(out.kind == CircumcenterKind::SinglePoint);
    CHECK(out.center == v2(3, 7));
  }
  SUBCASE("two coincide") {
    for (const auto& [a, b, c] : {std::tuple{v2(0, 0), v2(0, 0), v2(4, 2)},
                                  std::tuple{v2(0, 0), v2(4, 2), v2(0, 0)},
                                  std::tuple{v2(4, 2), v2(0, 0), v2(0, 0)}}) {
      const auto out = circumcenter3(a, b, c);
      CHECK(out.kind == CircumcenterKind::Midpoint);
      CHECK(out.center.isApprox(v2(2, 1)));
    }
  }
  SUBCASE("collinear distinct points have no circumcenter") {
    CHECK(kind_of([] { circumcenter3(v2(0, 0), v2(1, 0), v2(2, 0)); }) ==
          ErrorKind::CollinearNoCircumcenter);
  }
  SUBCASE("dimension mismatch") {
    CHECK(kind_of([] { circumcenter3(v2(0, 0), Vector::Zero(3), v2(2, 0)); }) ==
          ErrorKind::DimensionMismatch);
  }
}

TEST_CASE("circumcenter is equidistant and lies in the affine hull") {
  std::mt19937_64 rng(20240601);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vector p0 = random_vector(rng, 10);
    const Vector p1 = random_vector(rng, 10);
    const Vector p2 = random_vector(rng, 10);
    const auto out = circumcenter3(p0, p1, p2);
    REQUIRE(out.kind == CircumcenterKind::Proper);
    const double d0 = (out.center - p0).norm();
    const double d1 = (out.center - p1).norm();
    const double d2 = (out.center - p2).norm();
    const double spread = std::max({d0, d1, d2}) - std::min({d0, d1, d2});
    CHECK(spread <= 1e-10 * (1.0 + std::max({d0, d1, d2})));

    // Least-squares fit c - p0 = a (p1 - p0) + b (p2 - p0).
    Matrix span(10, 2);
    span << p1 - p0, p2 - p0;
    const Vector coeffs = span.colPivHouseholderQr().solve(out.center - p0);
    CHECK((span * coeffs - (out.center - p0)).norm() <= 1e-10 * (1.0 + out.center.norm()));
  }
}

TEST_CASE("circumcenter is invariant under vertex order") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector a = random_vector(rng, 5), b = random_vector(rng, 5), c = random_vector(rng, 5);
    const Vector ref = circumcenter3(a, b, c).center;
    CHECK((circumcenter3(b, c, a).center - ref).norm() <= 1e-10 * (1.0 + ref.norm()));
    CHECK((circumcenter3(c, a, b).center - ref).norm() <= 1e-10 * (1.0 + ref.norm()));
  }
}

TEST_CASE("reflect") {
  CHECK(reflect(Operator::identity(2), v2(5, -3)) == v2(5, -3));
  const Operator lower = Operator::halfspace(v2(0, 1), 0.0);
  const Operator onto_axis = Operator::affine(AffineSubspace(v2(0, 0), Matrix{{1.0}, {0.0}}));
  CHECK(reflect(onto_axis, v2(1, 2)).isApprox(v2(1, -2)));
  // Fixed points are fixed by the reflection.
  CHECK(reflect(lower, v2(4, -1)) == v2(4, -1));
  CHECK(kind_of([&] { reflect(onto_axis, Vector::Zero(3)); }) == ErrorKind::DimensionMismatch);
}

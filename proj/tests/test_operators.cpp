#include <doctest.h>

#include <cmath>

#include "crm/error.hpp"
#include "crm/instance_gen.hpp"
#include "crm/operators.hpp"
#include "crm/theory.hpp"
#include "test_util.hpp"

using namespace crm;
using crm::testing::random_vector;
using crm::testing::uniform;

namespace {

Vector v2(double a, double b) { return Vector{{a, b}}; }

Operator line(double dx, double dy) {
  return Operator::affine(AffineSubspace::from_span(Vector::Zero(2), Matrix{{dx}, {dy}}));
}

// {x2 <= 0}, {x1 <= 0}
Operator lower_half() { return Operator::halfspace(v2(0, 1), 0.0); }
Operator left_half() { return Operator::halfspace(v2(1, 0), 0.0); }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected crm::Error");
  return ErrorKind::InvalidArgument;
}

std::vector<Operator> random_projections(std::mt19937_64& rng, Index n) {
  std::vector<Operator> ops;
  ops.push_back(Operator::halfspace(random_vector(rng, n), uniform(rng, -1, 1)));
  ops.push_back(Operator::ball(random_vector(rng, n), uniform(rng, 0.5, 3)));
  Matrix dirs(n, 3);
  for (Index j = 0; j < 3; ++j) dirs.col(j) = random_vector(rng, n);
  ops.push_back(Operator::affine(AffineSubspace::from_span(random_vector(rng, n), dirs)));
  Rng gen(rng());
  ops.push_back(Operator::ellipsoid(gen_ellipsoid(n, gen, 1.0, 0.2), EllipsoidMethod::Kkt));
  return ops;
}

}  // namespace

TEST_CASE("closed-form projections") {
  CHECK(lower_half()(v2(2, 2)) == v2(2, 0));
  CHECK(line(1, 1)(v2(2, -1)).isApprox(v2(0.5, 0.5), 1e-15));
  const Operator avg = Operator::convex_combination({0.5, 0.5}, {left_half(), lower_half()});
  CHECK(avg(v2(2, 2)).isApprox(v2(1, 1)));
  CHECK(Operator::ball(v2(0, 0), 1.0)(v2(2, 0)).isApprox(v2(1, 0)));
  CHECK(kind_of([] { lower_half()(Vector::Zero(3)); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("operator construction is validated") {
  CHECK(kind_of([] { Operator::convex_combination({0.5, 0.6}, {left_half(), lower_half()}); }) ==
        ErrorKind::InvalidWeight);
  CHECK(kind_of([] { Operator::convex_combination({1.5, -0.5}, {left_half(), lower_half()}); }) ==
        ErrorKind::InvalidWeight);
  CHECK(kind_of([] { Operator::convex_combination({}, {}); }) == ErrorKind::EmptyOperatorList);
  CHECK(kind_of([] { Operator::halfspace(v2(0, 0), 1.0); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { AffineSubspace(v2(0, 0), Matrix{{2.0}, {0.0}}); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { Operator::composition({left_half(), Operator::identity(3)}); }) ==
        ErrorKind::DimensionMismatch);
}

TEST_CASE("kinds and labels") {
  const Operator comp = Operator::composition({lower_half(), line(1, 1)});
  CHECK(comp.kind() == OperatorKind::Composition);
  CHECK_FALSE(comp.is_firmly_nonexpansive());
  const Operator avg = Operator::convex_combination({0.3, 0.7}, {left_half(), lower_half()});
  CHECK(avg.is_firmly_nonexpansive());
  CHECK_FALSE(avg.is_projection());
  CHECK(lower_half().is_projection());
}

TEST_CASE("firm nonexpansiveness slack") {
  std::mt19937_64 rng(11);
  SUBCASE("identity has zero slack") {
    const Operator id = Operator::identity(4);
    for (int i = 0; i < 20; ++i) {
      CHECK(std::abs(firm_nonexpansiveness_slack(id, random_vector(rng, 4), random_vector(rng, 4))) <= 1e-12);
    }
  }
  SUBCASE("composition counterexample, both orders") {
    // A = {x2 = 0}, B = {x2 = x1}, x = (0,0), y = (2,-1).
    // First P_A then P_B: T(x) = 0, T(y) = P_B(2,0) = (1,1);
    //   <(-1,-1), (-2,1)> - 2 = 1 - 2 = -1.
    // First P_B then P_A: T(y) = P_A(0.5,0.5) = (0.5,0);
    //   <(-0.5,0), (-2,1)> - 0.25 = 1 - 0.25 = 0.75.
    const Operator pa = line(1, 0), pb = line(1, 1);
    const Operator a_then_b = Operator::composition({pa, pb});
    const Operator b_then_a = Operator::composition({pb, pa});
    CHECK(a_then_b(v2(2, -1)).isApprox(v2(1, 1)));
    CHECK(firm_nonexpansiveness_slack(a_then_b, v2(0, 0), v2(2, -1)) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(firm_nonexpansiveness_slack(b_then_a, v2(0, 0), v2(2, -1)) == doctest::Approx(0.75).epsilon(1e-12));
  }
  SUBCASE("projections and their averages satisfy the inequality on random pairs") {
    const Index n = 20;
    const auto projections = random_projections(rng, n);
    std::vector<Operator> ops = projections;
    ops.push_back(Operator::convex_combination({0.1, 0.2, 0.3, 0.4}, projections));
    for (const auto& op : ops) {
      double worst = 0.0;
      for (int i = 0; i < 1000; ++i) {
        worst = std::min(worst, firm_nonexpansiveness_slack(op, random_vector(rng, n, 3.0),
                                                            random_vector(rng, n, 3.0)));
      }
      CHECK(worst >= -1e-10);
    }
  }
}

TEST_CASE("projection facts on sampled points") {
  std::mt19937_64 rng(12);
  const Index n = 8;
  for (const auto& op : random_projections(rng, n)) {
    for (int i = 0; i < 100; ++i) {
      const Vector x = random_vector(rng, n, 4.0);
      const Vector z = op(x);
      // Moving along the normal ray keeps the projection.
      for (double a : {0.5, 1.0, 2.0, 10.0}) {
        CHECK((op(z + a * (x - z)) - z).norm() <= 1e-10 * (1.0 + z.norm()));
      }
      // Obtuse angle against members of the set (images of other points).
      const Vector member = op(random_vector(rng, n, 4.0));
      CHECK((x - z).dot(member - z) <= 1e-9 * (1.0 + (x - z).norm() * (member - z).norm()));
    }
  }
}

TEST_CASE("acute angle property for a combination with a known fixed point") {
  std::mt19937_64 rng(13);
  const Index n = 6;
  // Sets all containing the origin.
  std::vector<Operator> terms{Operator::halfspace(random_vector(rng, n), 0.5),
                              Operator::ball(0.3 * random_vector(rng, n).normalized(), 1.0),
                              Operator::affine(AffineSubspace::from_span(Vector::Zero(n), random_vector(rng, n)))};
  const Operator avg = Operator::convex_combination({0.2, 0.5, 0.3}, terms);
  const Vector y = Vector::Zero(n);
  CHECK(fixed_point_residual(avg, y) <= 1e-12);
  for (int i = 0; i < 200; ++i) {
    const Vector x = random_vector(rng, n, 5.0);
    const Vector tx = avg(x);
    CHECK((tx - y).dot(tx - x) <= 1e-10);
  }
}

TEST_CASE("fixed point residual") {
  CHECK(fixed_point_residual(Operator::ball(v2(0, 0), 1.0), v2(2, 0)) == doctest::Approx(1.0));
  CHECK(fixed_point_residual(lower_half(), v2(3, -1)) == 0.0);
  const Ellipsoid e1(Matrix{{2.0, 0.5}, {0.5, 1.0}}, v2(0.3, 0.1), 1.0);
  const Ellipsoid e2(Matrix::Identity(2, 2), v2(-0.2, 0.4), 2.0);
  const Operator avg = Operator::convex_combination(
      {0.5, 0.5}, {Operator::ellipsoid(e1), Operator::ellipsoid(e2)});
  CHECK(fixed_point_residual(avg, v2(0, 0)) == 0.0);
}

TEST_CASE("translated projection deviation") {
  std::vector<Vector> samples;
  std::mt19937_64 rng(14);
  for (int i = 0; i < 100; ++i) samples.push_back(random_vector(rng, 2, 5.0));

  const Operator axis = line(1, 0);
  CHECK(translated_projection_deviation(axis, v2(0, 1), 0.5, samples) <= 1e-10);
  CHECK(translated_projection_deviation(axis, v2(0, 0), 0.5, samples) == 0.0);

  // Shifting a line along itself leaves the set unchanged, so a shift with a
  // component along aff(A) still yields a projection for affine A.
  CHECK(translated_projection_deviation(axis, v2(1, 1), 0.5, samples) <= 1e-10);
  // For a ball aff(A) = R^2 and only the zero shift is orthogonal; a nonzero
  // shift breaks the identity.
  const Operator disc = Operator::ball(v2(0, 0), 1.0);
  CHECK(translated_projection_deviation(disc, v2(1, 1), 0.5, samples) > 1e-3);

  CHECK(kind_of([&] { translated_projection_deviation(axis, v2(0, 1), 1.0, samples); }) ==
        ErrorKind::InvalidWeight);
  CHECK(kind_of([&] { translated_projection_deviation(axis, v2(0, 1), 0.0, samples); }) ==
        ErrorKind::InvalidWeight);
}

TEST_CASE("fixed set witness of a two-set average") {
  SUBCASE("separated halfspaces") {
    const Operator a = lower_half();                     // x2 <= 0
    const Operator b = Operator::halfspace(v2(0, -1), -1.0);  // x2 >= 1
    const auto check = fixed_set_witness_check(a, b, DistancePair::certified(v2(0, 0), v2(0, 1)), 0.3);
    CHECK(check.point.isApprox(v2(0, 0.3)));
    CHECK(check.residual <= 1e-12);
    CHECK(check.pair_mismatch <= 1e-12);
  }
  SUBCASE("identical sets") {
    const Operator a = Operator::ball(v2(1, 1), 2.0);
    const auto check = fixed_set_witness_check(a, a, DistancePair::certified(v2(1, 2), v2(1, 2)), 0.4);
    CHECK(check.residual == 0.0);
  }
  SUBCASE("parallel lines two apart") {
    const Operator a = Operator::affine(AffineSubspace(v2(0, -1), Matrix{{1.0}, {0.0}}));
    const Operator b = Operator::affine(AffineSubspace(v2(0, 1), Matrix{{1.0}, {0.0}}));
    const auto pair = DistancePair::certified(v2(3, -1), v2(3, 1));
    CHECK(pair.gap == doctest::Approx(2.0));
    const auto check = fixed_set_witness_check(a, b, pair, 0.5);
    CHECK(check.point.isApprox(v2(3, 0)));
    CHECK(check.residual <= 1e-12);
  }
}

TEST_CASE("idempotence violation search") {
  std::mt19937_64 rng(15);
  std::vector<Vector> samples;
  for (int i = 0; i < 50; ++i) samples.push_back(random_vector(rng, 2, 3.0));
  CHECK(idempotence_violation_search(lower_half(), samples) == 0.0);

  const Operator avg = Operator::convex_combination({0.5, 0.5}, {left_half(), lower_half()});
  // T(2,2) = (1,1), T(1,1) = (0.5,0.5).
  const std::vector<Vector> one{v2(2, 2)};
  CHECK(idempotence_violation_search(avg, one) == doctest::Approx(std::sqrt(0.5)));

  // Average of a line and its orthogonal translate is the projection onto the
  // intermediate line.
  const Operator axis = line(1, 0);
  const Operator shifted_avg = Operator::convex_combination({0.5, 0.5}, {axis, axis.translated(v2(0, 2))});
  CHECK(idempotence_violation_search(shifted_avg, samples) <= 1e-10);
}

TEST_CASE("gradient of the squared distance") {
  CHECK(gradient_check(Operator::ball(v2(0, 0), 1.0), v2(0.2, 0.1), 1e-5) == 0.0);
  CHECK(gradient_check(Operator::ball(v2(0, 0), 1.0), v2(2, 0), 1e-5) <= 1e-5);
  CHECK(gradient_check(lower_half(), v2(1, 3), 1e-5) <= 1e-5);
  CHECK(kind_of([] { gradient_check(lower_half(), v2(1, 3), 0.0); }) == ErrorKind::InvalidArgument);
}

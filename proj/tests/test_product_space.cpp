#include <doctest.h>

#include "crm/error.hpp"
#include "crm/instance_gen.hpp"
#include "crm/product_space.hpp"
#include "crm/solvers.hpp"
#include "test_util.hpp"

using namespace crm;
using crm::testing::random_vector;

namespace {

Vector v2(double a, double b) { return Vector{{a, b}}; }

LiftedPoint pair(const Vector& a, const Vector& b) {
  Vector flat(a.size() + b.size());
  flat << a, b;
  return LiftedPoint(flat, a.size());
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected crm::Error");
  return ErrorKind::InvalidArgument;
}

double lifted_slack(std::span<const Operator> ops, const LiftedPoint& x, const LiftedPoint& y) {
  const Vector tx = lift_apply(ops, x).flat();
  const Vector ty = lift_apply(ops, y).flat();
  const Vector d = tx - ty;
  return d.dot(x.flat() - y.flat()) - d.squaredNorm();
}

}  // namespace

TEST_CASE("blockwise application") {
  const std::vector<Operator> halves{Operator::halfspace(v2(1, 0), 0.0), Operator::halfspace(v2(0, 1), 0.0)};
  const LiftedPoint out = lift_apply(halves, pair(v2(2, 2), v2(2, 2)));
  CHECK(out.block(0) == v2(0, 2));
  CHECK(out.block(1) == v2(2, 0));

  const std::vector<Operator> ids{Operator::identity(2), Operator::identity(2)};
  const LiftedPoint x = pair(v2(1, -3), v2(4, 5));
  CHECK(lift_apply(ids, x).flat() == x.flat());

  const std::vector<Operator> one{Operator::ball(v2(0, 0), 1.0)};
  CHECK(lift_apply(one, embed(v2(3, 4), 1)).flat().isApprox(v2(0.6, 0.8)));

  CHECK(kind_of([&] { lift_apply(one, x); }) == ErrorKind::BlockCountMismatch);
  const std::vector<Operator> wrong{Operator::identity(3), Operator::identity(3)};
  CHECK(kind_of([&] { lift_apply(wrong, x); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("diagonal projection") {
  const LiftedPoint mixed = pair(v2(0, 2), v2(2, 0));
  const LiftedPoint d = diag_project(mixed);
  CHECK(d.block(0) == v2(1, 1));
  CHECK(d.block(1) == v2(1, 1));
  CHECK(diag_project(d).flat() == d.flat());
  const LiftedPoint single = embed(v2(3, -1), 1);
  CHECK(diag_project(single).flat() == single.flat());
  CHECK(DiagonalSubspace{2, 2}.project(mixed.flat()) == d.flat());
}

TEST_CASE("embedding and extraction") {
  std::mt19937_64 rng(31);
  for (Index m : {1, 2, 7}) {
    const Vector x = random_vector(rng, 5);
    CHECK((extract(embed(x, m)) - x).norm() <= 1e-15 * x.norm());
  }
  CHECK(extract(pair(v2(1, 1), v2(1, 1))) == v2(1, 1));
  CHECK(kind_of([] { extract(pair(v2(0, 2), v2(2, 0)), 1e-9); }) == ErrorKind::NotDiagonal);
  CHECK(kind_of([] { embed(v2(0, 0), 0); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { LiftedPoint(Vector::Zero(5), 2); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("a lifted MAP step is a parallel projection step") {
  std::mt19937_64 rng(32);
  Rng gen(33);
  for (int trial = 0; trial < 20; ++trial) {
    const FppInstance inst = gen_instance(InstanceSpec{.n = 6, .operators = 4, .seed = gen()});
    for (int i = 0; i < 10; ++i) {
      const Vector x = random_vector(rng, 6, 4.0);
      const Vector lifted = extract(diag_project(lift_apply(inst.operators, embed(x, 4))));
      CHECK((lifted - ppm_step(inst.operators, x)).norm() <= 1e-12 * (1.0 + x.norm()));
    }
  }
}

TEST_CASE("lifted maps are firmly nonexpansive") {
  std::mt19937_64 rng(34);
  const Index n = 4, m = 3;
  const std::vector<Operator> ops{Operator::ball(random_vector(rng, n), 1.5),
                                  Operator::halfspace(random_vector(rng, n), 0.2),
                                  Operator::convex_combination(
                                      {0.4, 0.6}, {Operator::ball(random_vector(rng, n), 2.0),
                                                   Operator::halfspace(random_vector(rng, n), -0.3)})};
  const DiagonalSubspace diag{n, m};
  for (int i = 0; i < 500; ++i) {
    const LiftedPoint x(random_vector(rng, n * m, 4.0), n);
    const LiftedPoint y(random_vector(rng, n * m, 4.0), n);
    CHECK(lifted_slack(ops, x, y) >= -1e-10);
    const Vector dx = diag.project(x.flat()) - diag.project(y.flat());
    CHECK(dx.dot(x.flat() - y.flat()) - dx.squaredNorm() >= -1e-12);
  }
}

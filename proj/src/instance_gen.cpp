#include "crm/instance_gen.hpp"

#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>

#include "crm/error.hpp"

namespace crm {

double InstanceSpec::effective_density() const {
  if (density > 0.0) return density;
  return std::min(1.0, 2.0 / static_cast<double>(n));
}

void InstanceSpec::validate() const {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "instance dimension must be >= 1");
  if (operators < 1) throw Error(ErrorKind::InvalidArgument, "instance needs at least one operator");
  if (!(gamma > 0.0)) throw Error(ErrorKind::InvalidArgument, "gamma must be positive");
  if (density > 1.0) throw Error(ErrorKind::InvalidArgument, "density must lie in (0, 1]");
  if (!(eta < 0.0)) throw Error(ErrorKind::InvalidArgument, "eta must be negative");
  if (r_range.empty() || std::ranges::any_of(r_range, [](int r) { return r < 1; })) {
    throw Error(ErrorKind::InvalidArgument, "r_range must hold positive counts");
  }
  admm.validate();
}

Ellipsoid gen_ellipsoid(Index n, Rng& rng, double gamma, double density) {
  if (n < 1 || !(gamma > 0.0) || !(density > 0.0 && density <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "gen_ellipsoid: invalid parameters");
  }
  std::bernoulli_distribution keep(density);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Eigen::Triplet<double>> entries;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (keep(rng)) entries.emplace_back(i, j, normal(rng));
    }
  }
  Eigen::SparseMatrix<double> B(n, n);
  B.setFromTriplets(entries.begin(), entries.end());
  const Eigen::SparseMatrix<double> BtB = B.transpose() * B;

  Matrix A = Matrix(BtB);
  A = 0.5 * (A + A.transpose()).eval();
  A.diagonal().array() += gamma;

  Vector b(n);
  for (Index i = 0; i < n; ++i) b[i] = unit(rng);
  const double alpha = b.dot(A * b) + 1.0;
  return Ellipsoid(std::move(A), std::move(b), alpha);
}

Operator gen_operator(Index n, Rng& rng, const InstanceSpec& spec) {
  std::uniform_int_distribution<std::size_t> pick(0, spec.r_range.size() - 1);
  const int r = spec.r_range[pick(rng)];
  std::uniform_real_distribution<double> open_unit(std::nextafter(0.0, 1.0), 1.0);

  std::vector<double> lambdas(static_cast<std::size_t>(r));
  for (auto& l : lambdas) l = open_unit(rng);
  double total = 0.0;
  for (double l : lambdas) total += l;
  std::vector<double> weights;
  weights.reserve(lambdas.size());
  for (double l : lambdas) weights.push_back(l / total);

  std::vector<Operator> terms;
  terms.reserve(lambdas.size());
  for (int i = 0; i < r; ++i) {
    terms.push_back(Operator::ellipsoid(gen_ellipsoid(n, rng, spec.gamma, spec.effective_density()),
                                        EllipsoidMethod::Admm, spec.admm));
  }
  return Operator::convex_combination(std::move(weights), std::move(terms));
}

FppInstance gen_instance(const InstanceSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  FppInstance instance{spec, {}};
  instance.operators.reserve(static_cast<std::size_t>(spec.operators));
  for (Index i = 0; i < spec.operators; ++i) instance.operators.push_back(gen_operator(spec.n, rng, spec));
  return instance;
}

std::vector<const Ellipsoid*> ellipsoids_of(const Operator& op) {
  std::vector<const Ellipsoid*> out;
  if (const auto* e = op.as<EllipsoidProjector>()) {
    out.push_back(&e->set);
  } else if (const auto* c = op.as<CombinationOp>()) {
    for (const auto& t : c->terms) {
      auto inner = ellipsoids_of(t);
      out.insert(out.end(), inner.begin(), inner.end());
    }
  }
  return out;
}

Vector initial_point(const FppInstance& instance) {
  double eta = instance.spec.eta;
  for (int doubling = 0; doubling <= 10; ++doubling) {
    const Vector x = Vector::Constant(instance.spec.n, eta);
    bool exterior = true;
    for (const auto& op : instance.operators) {
      for (const Ellipsoid* e : ellipsoids_of(op)) {
        if (!(e->evaluate(x) > 0.0)) {
          exterior = false;
          break;
        }
      }
      if (!exterior) break;
    }
    if (exterior) return x;
    eta *= 2.0;
  }
  throw Error(ErrorKind::CannotExitSets, "start point still inside a set after 10 doublings");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, Index n, Index operators, Index replicate) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ static_cast<std::uint64_t>(n));
  h = splitmix64(h ^ static_cast<std::uint64_t>(operators));
  return splitmix64(h ^ static_cast<std::uint64_t>(replicate));
}

}  // namespace crm

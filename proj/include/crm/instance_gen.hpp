#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "crm/ellipsoid.hpp"
#include "crm/operators.hpp"

namespace crm {

using Rng = std::mt19937_64;

/// Parameters of a random FPP instance. `operators` is the number of
/// firmly nonexpansive operators; `density` is the sparsity of the B factors.
struct InstanceSpec {
  Index n = 10;
  Index operators = 10;
  std::uint64_t seed = 0;
  double gamma = 1.0;
  double density = 0.0;  ///< <= 0 selects the default min(1, 2/n)
  std::vector<int> r_range{3, 4, 5};
  double eta = -5.0;
  AdmmConfig admm{};

  double effective_density() const;
  void validate() const;
};

struct FppInstance {
  InstanceSpec spec;
  std::vector<Operator> operators;  ///< convex combinations of ellipsoid projections

  /// 0 lies in every ellipsoid, hence is a common fixed point.
  Vector certified_fixed_point() const { return Vector::Zero(spec.n); }
};

/// A = gamma I + B^T B (B sparse with standard normal nonzeros), b uniform on
/// [0,1]^n, alpha = b^T A b + 1.
Ellipsoid gen_ellipsoid(Index n, Rng& rng, double gamma, double density);

/// sum_i mu_i P_{E_i} over r fresh ellipsoids, r drawn from spec.r_range and
/// mu the normalized uniform draws.
Operator gen_operator(Index n, Rng& rng, const InstanceSpec& spec);

FppInstance gen_instance(const InstanceSpec& spec);

/// (eta, ..., eta) outside every ellipsoid of the instance; eta is doubled
/// (at most 10 times) until that holds, else CannotExitSets.
Vector initial_point(const FppInstance& instance);

/// Seed of one grid cell, independent of generation order.
std::uint64_t derive_seed(std::uint64_t master, Index n, Index operators, Index replicate);

/// The ellipsoids inside one generated operator.
std::vector<const Ellipsoid*> ellipsoids_of(const Operator& op);

}  // namespace crm

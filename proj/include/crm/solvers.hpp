#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "crm/operators.hpp"
#include "crm/product_space.hpp"

namespace crm {

/// The affine manifold U of a two-operator problem Fix(T, P_U).
using Subspace = std::variant<AffineSubspace, DiagonalSubspace>;

Vector project(const Subspace& u, const Vector& x);
Index dimension(const Subspace& u);

enum class StepKind { Map, Crm, Ppm, Spm };

std::string_view to_string(StepKind kind) noexcept;
StepKind step_kind_from_string(std::string_view name);

/// Relative tolerance of the CRM degenerate-case tests.
inline constexpr double kCrmDegeneracyTol = 1e-12;

/// P_U(T(z)).
Vector map_step(const Operator& op, const Subspace& u, const Vector& z);

/// Circumcenter of {x, R(x), R_U(R(x))} for x in U, with R = 2T - I and
/// R_U = 2P_U - I. Requires x in U (within 1e-8 * (1 + |x|)).
Vector crm_step(const Operator& op, const Subspace& u, const Vector& x);

/// (1/m) sum T_i(x).
Vector ppm_step(std::span<const Operator> ops, const Vector& x);

/// T_m(...T_1(x)...).
Vector spm_step(std::span<const Operator> ops, const Vector& x);

/// Two-operator problem: common fixed points of T and P_U.
struct PairProblem {
  Operator op;
  Subspace subspace;
};

/// m-operator problem in R^n.
struct MultiProblem {
  std::vector<Operator> ops;
};

/// Pierra lift of an m-operator problem: blockwise operator plus the diagonal.
PairProblem lift(const MultiProblem& problem, bool parallel_blocks = false);

struct Diagnostics {
  bool fejer = false;
  bool orthogonality = false;
  bool membership = false;
};

struct SolverConfig {
  double tolerance = 1e-6;
  long max_iterations = 50000;
  Diagnostics diagnostics{};
  double fejer_tolerance = 1e-8;
  double orthogonality_tolerance = 1e-8;
  double membership_tolerance = 1e-8;
  bool record_history = true;

  void validate() const;
};

enum class StopReason { Converged, MaxIterations };

std::string_view to_string(StopReason reason) noexcept;

struct IterationTrace {
  long iterations = 0;
  StopReason stop_reason = StopReason::MaxIterations;
  std::vector<double> residual_history;  ///< |x^{k+1} - x^k|, one per step
  std::vector<double> dist_history;      ///< |x^k - y*| for k = 0..iterations
  double final_residual = 0.0;
  double elapsed_seconds = 0.0;
  Vector solution;

  // Extremes of the enabled diagnostics over the run.
  double min_fejer_slack = 0.0;
  double max_membership_violation = 0.0;
  double max_orthogonality_violation = 0.0;
};

/// Iterates until |x^{k+1} - x^k| < cfg.tolerance or cfg.max_iterations
/// steps. `y_star` is a certified solution used for the distance history and
/// the Fejer diagnostic. Enabled diagnostics throw DiagnosticError on the
/// first violating iteration.
IterationTrace run(StepKind kind, const PairProblem& problem, const Vector& x0,
                   const SolverConfig& cfg, const std::optional<Vector>& y_star = std::nullopt);
IterationTrace run(StepKind kind, const MultiProblem& problem, const Vector& x0,
                   const SolverConfig& cfg, const std::optional<Vector>& y_star = std::nullopt);

struct RateEstimate {
  std::vector<double> ratios;
  double sup_ratio = 0.0;
  double geometric_mean_ratio = 0.0;
};

/// Per-step ratios d_{k+1}/d_k over the leading window where d_k exceeds
/// 100 machine epsilons.
RateEstimate estimate_rate(std::span<const double> dist_history);

}  // namespace crm

#include "crm/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "crm/error.hpp"
#include "crm/geometry.hpp"

namespace crm {

Vector project(const Subspace& u, const Vector& x) {
  return std::visit([&](const auto& s) { return s.project(x); }, u);
}

Index dimension(const Subspace& u) {
  return std::visit([](const auto& s) { return s.dimension(); }, u);
}

std::string_view to_string(StepKind kind) noexcept {
  switch (kind) {
    case StepKind::Map: return "map";
    case StepKind::Crm: return "crm";
    case StepKind::Ppm: return "ppm";
    case StepKind::Spm: return "spm";
  }
  return "unknown";
}

StepKind step_kind_from_string(std::string_view name) {
  if (name == "map") return StepKind::Map;
  if (name == "crm") return StepKind::Crm;
  if (name == "ppm") return StepKind::Ppm;
  if (name == "spm") return StepKind::Spm;
  throw Error(ErrorKind::InvalidArgument, "unknown solver '" + std::string(name) + "'");
}

std::string_view to_string(StopReason reason) noexcept {
  return reason == StopReason::Converged ? "converged" : "max-iterations";
}

void SolverConfig::validate() const {
  if (!(tolerance > 0.0)) throw Error(ErrorKind::InvalidArgument, "solver tolerance must be positive");
  if (max_iterations < 1) throw Error(ErrorKind::InvalidArgument, "solver max_iterations must be >= 1");
}

namespace {

double membership_violation(const Subspace& u, const Vector& x) {
  return (project(u, x) - x).norm() / (1.0 + x.norm());
}

// One CRM or MAP step together with T(x), which the diagnostics reuse.
struct PairStep {
  Vector image;  // T(x)
  Vector next;
};

PairStep crm_step_detail(const Operator& op, const Subspace& u, const Vector& x_in) {
  require_same_dimension(x_in.size(), op.dimension(), "crm_step");
  require_same_dimension(x_in.size(), dimension(u), "crm_step subspace");
  if (membership_violation(u, x_in) > 1e-8) {
    throw Error(ErrorKind::NotInSubspace, "CRM iterate must lie in U");
  }
  // A component of x off U is scaled by the step length factor of the
  // circumcenter at every step, so rounding drift would compound; the step
  // starts from the exact member of U.
  const Vector x = project(u, x_in);
  Vector image = op.apply(x);
  const Vector r = reflect_through(image, x);
  const Vector pr = project(u, r);
  // R(x) already in U: all three points are in U and the circumcenter is the
  // midpoint of x and R(x), i.e. T(x).
  if ((r - pr).norm() <= kCrmDegeneracyTol * (1.0 + r.norm())) return {image, image};
  // x = P_U(R(x)): x is the midpoint of R(x) and its mirror image.
  if ((x - pr).norm() <= kCrmDegeneracyTol * (1.0 + x.norm())) return {image, x};
  // Base vertex R(x): the Gram solve then starts from the midpoint of R(x)
  // and its mirror image (= P_U(R(x)), in U) and moves along x - P_U(R(x)),
  // also in U, so the center does not drift off U near convergence.
  const Vector w = reflect_through(pr, r);
  return {std::move(image), circumcenter3(r, w, x).center};
}

}  // namespace

Vector map_step(const Operator& op, const Subspace& u, const Vector& z) {
  require_same_dimension(z.size(), op.dimension(), "map_step");
  require_same_dimension(z.size(), dimension(u), "map_step subspace");
  return project(u, op.apply(z));
}

Vector crm_step(const Operator& op, const Subspace& u, const Vector& x) {
  return crm_step_detail(op, u, x).next;
}

Vector ppm_step(std::span<const Operator> ops, const Vector& x) {
  if (ops.empty()) throw Error(ErrorKind::EmptyOperatorList, "ppm_step needs operators");
  Vector sum = Vector::Zero(x.size());
  for (const auto& op : ops) sum += op.apply(x);
  return sum / static_cast<double>(ops.size());
}

Vector spm_step(std::span<const Operator> ops, const Vector& x) {
  if (ops.empty()) throw Error(ErrorKind::EmptyOperatorList, "spm_step needs operators");
  Vector out = x;
  for (const auto& op : ops) out = op.apply(out);
  return out;
}

PairProblem lift(const MultiProblem& problem, bool parallel_blocks) {
  if (problem.ops.empty()) throw Error(ErrorKind::EmptyOperatorList, "cannot lift an empty problem");
  const Index n = problem.ops.front().dimension();
  const Index m = static_cast<Index>(problem.ops.size());
  return {Operator::lifted(problem.ops, parallel_blocks), DiagonalSubspace{n, m}};
}

namespace {

using Clock = std::chrono::steady_clock;

// Result of one step plus the Fejer decrement the theory guarantees for it:
// |x^{k+1} - y|^2 <= |x^k - y|^2 - decrement for every common fixed point y.
struct StepOutcome {
  Vector next;
  double decrement = 0.0;
  double orthogonality = 0.0;
};

template <class StepFn>
IterationTrace iterate(StepFn&& step, const Vector& x0, const SolverConfig& cfg,
                       const std::optional<Vector>& y_star, const Subspace* subspace) {
  cfg.validate();
  if (y_star) require_same_dimension(y_star->size(), x0.size(), "certified solution");
  if (cfg.diagnostics.fejer && !y_star) {
    throw Error(ErrorKind::InvalidArgument, "Fejer diagnostic needs a certified solution");
  }

  const auto start = Clock::now();
  IterationTrace trace;
  if (cfg.record_history) {
    trace.residual_history.reserve(static_cast<std::size_t>(std::min(cfg.max_iterations, 4096L)));
  }
  Vector x = x0;
  double dist2 = y_star ? (x - *y_star).squaredNorm() : 0.0;
  if (y_star && cfg.record_history) trace.dist_history.push_back(std::sqrt(dist2));
  trace.min_fejer_slack = std::numeric_limits<double>::infinity();

  for (long k = 1; k <= cfg.max_iterations; ++k) {
    StepOutcome out = step(x, k);
    const double residual = (out.next - x).norm();

    if (y_star) {
      const double next_dist2 = (out.next - *y_star).squaredNorm();
      const double slack = dist2 - next_dist2 - out.decrement;
      trace.min_fejer_slack = std::min(trace.min_fejer_slack, slack);
      if (cfg.diagnostics.fejer && slack < -cfg.fejer_tolerance) {
        throw DiagnosticError(k, "Fejer slack " + std::to_string(slack));
      }
      dist2 = next_dist2;
      if (cfg.record_history) trace.dist_history.push_back(std::sqrt(dist2));
    }
    trace.max_orthogonality_violation = std::max(trace.max_orthogonality_violation, out.orthogonality);
    if (cfg.diagnostics.orthogonality && out.orthogonality > cfg.orthogonality_tolerance) {
      throw DiagnosticError(k, "orthogonality violation " + std::to_string(out.orthogonality));
    }
    if (subspace) {
      const double violation = membership_violation(*subspace, out.next);
      trace.max_membership_violation = std::max(trace.max_membership_violation, violation);
      if (cfg.diagnostics.membership && violation > cfg.membership_tolerance) {
        throw DiagnosticError(k, "membership violation " + std::to_string(violation));
      }
    }

    x = std::move(out.next);
    if (cfg.record_history) trace.residual_history.push_back(residual);
    trace.iterations = k;
    trace.final_residual = residual;
    if (residual < cfg.tolerance) {
      trace.stop_reason = StopReason::Converged;
      break;
    }
  }
  if (!y_star) trace.min_fejer_slack = 0.0;
  trace.solution = std::move(x);
  trace.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return trace;
}

}  // namespace

IterationTrace run(StepKind kind, const PairProblem& problem, const Vector& x0,
                   const SolverConfig& cfg, const std::optional<Vector>& y_star) {
  const Operator& op = problem.op;
  const Subspace& u = problem.subspace;
  require_same_dimension(x0.size(), op.dimension(), "run");
  require_same_dimension(x0.size(), dimension(u), "run subspace");

  switch (kind) {
    case StepKind::Map: {
      // |S z - y|^2 <= |z - y|^2 - |S z - T z|^2 - |T z - z|^2
      auto step = [&](const Vector& z, long) {
        const Vector image = op.apply(z);
        Vector next = project(u, image);
        const double dec = (next - image).squaredNorm() + (image - z).squaredNorm();
        return StepOutcome{std::move(next), dec, 0.0};
      };
      return iterate(step, x0, cfg, y_star, &u);
    }
    case StepKind::Crm: {
      // |C x - y|^2 <= |x - y|^2 - |S x - x|^2 with S = P_U o T
      auto step = [&](const Vector& x, long) {
        PairStep s = crm_step_detail(op, u, x);
        const Vector displacement = x - s.image;
        const Vector lever = s.next - s.image;
        const double ortho = std::abs(displacement.dot(lever)) /
                             (1.0 + displacement.norm() * lever.norm());
        const double dec = (project(u, s.image) - x).squaredNorm();
        return StepOutcome{std::move(s.next), dec, ortho};
      };
      return iterate(step, x0, cfg, y_star, &u);
    }
    default:
      throw Error(ErrorKind::InvalidArgument,
                  std::string(to_string(kind)) + " runs on an operator list, not a pair problem");
  }
}

IterationTrace run(StepKind kind, const MultiProblem& problem, const Vector& x0,
                   const SolverConfig& cfg, const std::optional<Vector>& y_star) {
  if (problem.ops.empty()) throw Error(ErrorKind::EmptyOperatorList, "run needs operators");
  const auto& ops = problem.ops;
  for (const auto& op : ops) require_same_dimension(op.dimension(), x0.size(), "run");

  switch (kind) {
    case StepKind::Ppm: {
      // The average of firmly nonexpansive operators is firmly nonexpansive.
      auto step = [&](const Vector& x, long) {
        Vector next = ppm_step(ops, x);
        const double dec = (next - x).squaredNorm();
        return StepOutcome{std::move(next), dec, 0.0};
      };
      return iterate(step, x0, cfg, y_star, nullptr);
    }
    case StepKind::Spm: {
      // Chaining the inequality through each stage.
      auto step = [&](const Vector& x, long) {
        Vector cur = x;
        double dec = 0.0;
        for (const auto& op : ops) {
          Vector next = op.apply(cur);
          dec += (next - cur).squaredNorm();
          cur = std::move(next);
        }
        return StepOutcome{std::move(cur), dec, 0.0};
      };
      return iterate(step, x0, cfg, y_star, nullptr);
    }
    case StepKind::Map:
    case StepKind::Crm: {
      const PairProblem lifted = lift(problem);
      const Index m = static_cast<Index>(ops.size());
      std::optional<Vector> lifted_star;
      if (y_star) lifted_star = embed(*y_star, m).flat();
      IterationTrace trace = run(kind, lifted, embed(x0, m).flat(), cfg, lifted_star);
      trace.solution = LiftedPoint(std::move(trace.solution), x0.size()).mean();
      return trace;
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown step kind");
}

RateEstimate estimate_rate(std::span<const double> dist_history) {
  const double floor = 100.0 * std::numeric_limits<double>::epsilon();
  RateEstimate est;
  for (std::size_t k = 0; k + 1 < dist_history.size(); ++k) {
    if (!(dist_history[k] > floor)) break;
    est.ratios.push_back(dist_history[k + 1] / dist_history[k]);
  }
  if (est.ratios.empty()) {
    throw Error(ErrorKind::InsufficientHistory, "need a distance above the floor followed by another entry");
  }
  est.sup_ratio = *std::ranges::max_element(est.ratios);
  double log_sum = 0.0;
  for (double r : est.ratios) {
    if (r <= 0.0) {
      log_sum = -std::numeric_limits<double>::infinity();
      break;
    }
    log_sum += std::log(r);
  }
  est.geometric_mean_ratio = std::exp(log_sum / static_cast<double>(est.ratios.size()));
  return est;
}

}  // namespace crm

#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "crm/instance_gen.hpp"
#include "crm/solvers.hpp"

namespace crm {

struct RunResult {
  StepKind solver = StepKind::Crm;
  Index n = 0;
  Index p = 0;
  Index replicate = 0;
  std::uint64_t seed = 0;
  long iterations = 0;
  double elapsed_seconds = 0.0;
  double final_residual = 0.0;
  StopReason stop_reason = StopReason::MaxIterations;
  std::string failure;  ///< set when the run aborted (diagnostic or numeric error)

  // Diagnostic extremes, kept in memory only.
  double min_fejer_slack = 0.0;
  double max_membership_violation = 0.0;
  double max_orthogonality_violation = 0.0;
};

/// Cartesian grid n-list x p-list x replicates; both CRM (lifted) and PPM
/// (direct) run on every cell.
struct GridConfig {
  std::vector<Index> n_values{10, 30, 50, 100, 200};
  std::vector<Index> p_values{10, 25, 50, 100, 200};
  Index replicates = 10;
  std::uint64_t master_seed = 1;
  SolverConfig solver{};
  InstanceSpec base{};  ///< n, operators and seed are overwritten per cell
  unsigned jobs = 0;    ///< concurrent runs; 0 = hardware concurrency
  bool parallel_blocks = false;
};

/// Max-iteration presets: the 50000 of the experiment text or the 25000 cap
/// visible in the published tables.
enum class Preset { PaperText, PaperTable };
long preset_max_iterations(Preset preset) noexcept;

/// Results sorted by (n, p, replicate, solver) whatever order runs finish in.
std::vector<RunResult> run_experiment(const GridConfig& grid);

struct SummaryStats {
  double mean = 0.0;
  double max = 0.0;
  double min = 0.0;
  double std = 0.0;  ///< sample standard deviation; 0 for a single value
  long count = 0;
};

SummaryStats summary_stats(std::span<const double> values);

enum class Metric { Iterations, Elapsed };

struct GroupBy {
  bool solver = true;
  bool n = false;
  bool p = false;
};

struct SummaryRow {
  std::string solver;  ///< empty when not grouped by solver
  Index n = -1;        ///< -1 when not grouped by n
  Index p = -1;
  SummaryStats stats;
};

std::vector<SummaryRow> summarize(std::span<const RunResult> results, GroupBy group_by, Metric metric);

struct ProfileCurve {
  std::string solver;
  std::vector<std::pair<double, double>> breakpoints;  ///< (tau, fraction), tau ascending
};

/// Dolan-More profile over problems (n, p, replicate). Runs that hit the
/// iteration cap count as +infinity.
std::vector<ProfileCurve> performance_profile(std::span<const RunResult> results, Metric metric);

/// Fraction of problems with ratio <= tau on a computed curve.
double profile_value(const ProfileCurve& curve, double tau);

std::string results_to_csv(std::span<const RunResult> results);
std::string results_to_json(std::span<const RunResult> results);
std::vector<RunResult> results_from_csv(const std::string& text);
std::string summary_to_csv(std::span<const SummaryRow> rows);
std::string summary_to_json(std::span<const SummaryRow> rows);
std::string profile_to_csv(std::span<const ProfileCurve> curves);
std::string profile_to_json(std::span<const ProfileCurve> curves);

/// Reals rendered with 6 significant digits.
std::string format_real(double value);

}  // namespace crm

namespace crm {

enum class Format { Csv, Json };

void export_to(const std::filesystem::path& path, Format format, std::span<const RunResult> results);
void export_to(const std::filesystem::path& path, Format format, std::span<const SummaryRow> rows);
void export_to(const std::filesystem::path& path, Format format, std::span<const ProfileCurve> curves);

}  // namespace crm

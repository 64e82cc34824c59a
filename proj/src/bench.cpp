#include "crm/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>
#include <tuple>

#include "crm/error.hpp"
#include "crm/serialize.hpp"

namespace crm {

long preset_max_iterations(Preset preset) noexcept {
  return preset == Preset::PaperTable ? 25000 : 50000;
}

namespace {

RunResult solve_cell(StepKind solver, const FppInstance& instance, const Vector& x0,
                     const GridConfig& grid, Index replicate) {
  RunResult r;
  r.solver = solver;
  r.n = instance.spec.n;
  r.p = instance.spec.operators;
  r.replicate = replicate;
  r.seed = instance.spec.seed;

  SolverConfig cfg = grid.solver;
  cfg.record_history = false;
  if (solver == StepKind::Crm) cfg.diagnostics.membership = true;
  const Vector y_star = instance.certified_fixed_point();
  try {
    IterationTrace trace;
    if (solver == StepKind::Crm) {
      const PairProblem lifted = lift(MultiProblem{instance.operators}, grid.parallel_blocks);
      const Index m = instance.spec.operators;
      trace = run(StepKind::Crm, lifted, embed(x0, m).flat(), cfg, embed(y_star, m).flat());
    } else {
      trace = run(solver, MultiProblem{instance.operators}, x0, cfg, y_star);
    }
    r.iterations = trace.iterations;
    r.elapsed_seconds = trace.elapsed_seconds;
    r.final_residual = trace.final_residual;
    r.stop_reason = trace.stop_reason;
    r.min_fejer_slack = trace.min_fejer_slack;
    r.max_membership_violation = trace.max_membership_violation;
    r.max_orthogonality_violation = trace.max_orthogonality_violation;
  } catch (const DiagnosticError& e) {
    r.iterations = e.iteration();
    r.final_residual = std::numeric_limits<double>::infinity();
    r.failure = e.what();
  } catch (const Error& e) {
    r.final_residual = std::numeric_limits<double>::infinity();
    r.failure = e.what();
  }
  return r;
}

auto sort_key(const RunResult& r) {
  return std::make_tuple(r.n, r.p, r.replicate, static_cast<int>(r.solver));
}

}  // namespace

std::vector<RunResult> run_experiment(const GridConfig& grid) {
  if (grid.n_values.empty() || grid.p_values.empty()) {
    throw Error(ErrorKind::InvalidArgument, "experiment grid is empty");
  }
  if (grid.replicates < 1) throw Error(ErrorKind::InvalidArgument, "replicates must be >= 1");
  grid.solver.validate();

  struct Cell {
    Index n, p, replicate;
  };
  std::vector<Cell> cells;
  for (Index n : grid.n_values) {
    for (Index p : grid.p_values) {
      for (Index rep = 0; rep < grid.replicates; ++rep) cells.push_back({n, p, rep});
    }
  }

  std::vector<RunResult> results;
  std::mutex results_mutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& c = cells[i];
      InstanceSpec spec = grid.base;
      spec.n = c.n;
      spec.operators = c.p;
      spec.seed = derive_seed(grid.master_seed, c.n, c.p, c.replicate);
      std::vector<RunResult> local;
      try {
        const FppInstance instance = gen_instance(spec);
        const Vector x0 = initial_point(instance);
        local.push_back(solve_cell(StepKind::Crm, instance, x0, grid, c.replicate));
        local.push_back(solve_cell(StepKind::Ppm, instance, x0, grid, c.replicate));
      } catch (const Error& e) {
        for (StepKind s : {StepKind::Crm, StepKind::Ppm}) {
          RunResult r;
          r.solver = s;
          r.n = c.n;
          r.p = c.p;
          r.replicate = c.replicate;
          r.seed = spec.seed;
          r.final_residual = std::numeric_limits<double>::infinity();
          r.failure = e.what();
          local.push_back(std::move(r));
        }
      }
      std::lock_guard lock(results_mutex);
      for (auto& r : local) results.push_back(std::move(r));
    }
  };

  unsigned jobs = grid.jobs ? grid.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(cells.size()));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  std::ranges::sort(results, {}, sort_key);
  return results;
}

SummaryStats summary_stats(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::EmptyGroup, "no values to summarize");
  SummaryStats s;
  s.count = static_cast<long>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.count);
  const auto [lo, hi] = std::ranges::minmax_element(values);
  s.min = *lo;
  s.max = *hi;
  if (s.count > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(s.count - 1));
  }
  return s;
}

std::vector<SummaryRow> summarize(std::span<const RunResult> results, GroupBy group_by, Metric metric) {
  if (results.empty()) throw Error(ErrorKind::EmptyGroup, "no results to summarize");
  using Key = std::tuple<std::string, Index, Index>;
  std::map<Key, std::vector<double>> groups;
  for (const auto& r : results) {
    Key key{group_by.solver ? std::string(to_string(r.solver)) : std::string(),
            group_by.n ? r.n : Index{-1}, group_by.p ? r.p : Index{-1}};
    groups[key].push_back(metric == Metric::Iterations ? static_cast<double>(r.iterations)
                                                       : r.elapsed_seconds);
  }
  std::vector<SummaryRow> rows;
  for (const auto& [key, values] : groups) {
    rows.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), summary_stats(values)});
  }
  return rows;
}

std::vector<ProfileCurve> performance_profile(std::span<const RunResult> results, Metric metric) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<std::string> solvers;
  using Problem = std::tuple<Index, Index, Index>;
  std::map<Problem, std::map<std::string, double>> table;
  for (const auto& r : results) {
    const std::string name(to_string(r.solver));
    if (std::ranges::find(solvers, name) == solvers.end()) solvers.push_back(name);
    const bool ok = r.stop_reason == StopReason::Converged && r.failure.empty();
    const double value = !ok ? inf
                         : metric == Metric::Iterations ? static_cast<double>(r.iterations)
                                                        : r.elapsed_seconds;
    table[{r.n, r.p, r.replicate}][name] = value;
  }
  std::ranges::sort(solvers);

  std::map<std::string, std::vector<double>> ratios;
  for (const auto& [problem, row] : table) {
    double best = inf;
    for (const auto& s : solvers) {
      const auto it = row.find(s);
      if (it != row.end()) best = std::min(best, it->second);
    }
    for (const auto& s : solvers) {
      const auto it = row.find(s);
      const double v = it == row.end() ? inf : it->second;
      double ratio = inf;
      if (std::isfinite(v)) ratio = best > 0.0 ? v / best : (v == 0.0 ? 1.0 : inf);
      ratios[s].push_back(ratio);
    }
  }

  const double problems = static_cast<double>(table.size());
  std::vector<ProfileCurve> curves;
  for (const auto& s : solvers) {
    auto values = ratios[s];
    std::ranges::sort(values);
    ProfileCurve curve{s, {}};
    std::size_t below = 0;
    auto count_upto = [&](double tau) {
      while (below < values.size() && values[below] <= tau) ++below;
      return static_cast<double>(below) / problems;
    };
    curve.breakpoints.emplace_back(1.0, count_upto(1.0));
    for (double v : values) {
      if (!std::isfinite(v) || v <= curve.breakpoints.back().first) continue;
      curve.breakpoints.emplace_back(v, count_upto(v));
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

double profile_value(const ProfileCurve& curve, double tau) {
  double value = 0.0;
  for (const auto& [t, f] : curve.breakpoints) {
    if (t > tau) break;
    value = f;
  }
  return value;
}

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

namespace {

using Json = nlohmann::ordered_json;

// Reals go through the 6-significant-digit text so JSON and CSV agree.
Json real_json(double value) {
  if (!std::isfinite(value)) return format_real(value);
  return std::stod(format_real(value));
}

StopReason stop_reason_from_string(const std::string& s) {
  if (s == "converged") return StopReason::Converged;
  if (s == "max-iterations") return StopReason::MaxIterations;
  throw Error(ErrorKind::InvalidArgument, "unknown stop reason '" + s + "'");
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

template <class T>
T parse_integer(const std::string& s) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::InvalidArgument, "bad integer field '" + s + "'");
  }
  return value;
}

double parse_real(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidArgument, "bad real field '" + s + "'");
  }
}

constexpr const char* kResultsHeader =
    "solver,n,p,replicate,seed,iterations,elapsed_s,final_residual,stop_reason";

}  // namespace

std::string results_to_csv(std::span<const RunResult> results) {
  std::string out = std::string(kResultsHeader) + "\n";
  for (const auto& r : results) {
    out += std::string(to_string(r.solver)) + "," + std::to_string(r.n) + "," + std::to_string(r.p) +
           "," + std::to_string(r.replicate) + "," + std::to_string(r.seed) + "," +
           std::to_string(r.iterations) + "," + format_real(r.elapsed_seconds) + "," +
           format_real(r.final_residual) + "," + std::string(to_string(r.stop_reason)) + "\n";
  }
  return out;
}

std::string results_to_json(std::span<const RunResult> results) {
  Json arr = Json::array();
  for (const auto& r : results) {
    Json j;
    j["solver"] = to_string(r.solver);
    j["n"] = r.n;
    j["p"] = r.p;
    j["replicate"] = r.replicate;
    j["seed"] = r.seed;
    j["iterations"] = r.iterations;
    j["elapsed_s"] = real_json(r.elapsed_seconds);
    j["final_residual"] = real_json(r.final_residual);
    j["stop_reason"] = to_string(r.stop_reason);
    if (!r.failure.empty()) j["failure"] = r.failure;
    arr.push_back(std::move(j));
  }
  return arr.dump(1) + "\n";
}

std::vector<RunResult> results_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader) {
    throw Error(ErrorKind::InvalidArgument, "results CSV must start with header: " + std::string(kResultsHeader));
  }
  std::vector<RunResult> results;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw Error(ErrorKind::InvalidArgument, "results CSV row needs 9 fields: " + line);
    RunResult r;
    r.solver = step_kind_from_string(f[0]);
    r.n = parse_integer<Index>(f[1]);
    r.p = parse_integer<Index>(f[2]);
    r.replicate = parse_integer<Index>(f[3]);
    r.seed = parse_integer<std::uint64_t>(f[4]);
    r.iterations = parse_integer<long>(f[5]);
    r.elapsed_seconds = parse_real(f[6]);
    r.final_residual = parse_real(f[7]);
    r.stop_reason = stop_reason_from_string(f[8]);
    results.push_back(std::move(r));
  }
  return results;
}

std::string summary_to_csv(std::span<const SummaryRow> rows) {
  std::string out = "solver,n,p,mean,max,min,std,count\n";
  for (const auto& row : rows) {
    out += row.solver + "," + (row.n >= 0 ? std::to_string(row.n) : std::string()) + "," +
           (row.p >= 0 ? std::to_string(row.p) : std::string()) + "," + format_real(row.stats.mean) +
           "," + format_real(row.stats.max) + "," + format_real(row.stats.min) + "," +
           format_real(row.stats.std) + "," + std::to_string(row.stats.count) + "\n";
  }
  return out;
}

std::string summary_to_json(std::span<const SummaryRow> rows) {
  Json arr = Json::array();
  for (const auto& row : rows) {
    Json j;
    if (!row.solver.empty()) j["solver"] = row.solver;
    if (row.n >= 0) j["n"] = row.n;
    if (row.p >= 0) j["p"] = row.p;
    j["mean"] = real_json(row.stats.mean);
    j["max"] = real_json(row.stats.max);
    j["min"] = real_json(row.stats.min);
    j["std"] = real_json(row.stats.std);
    j["count"] = row.stats.count;
    arr.push_back(std::move(j));
  }
  return arr.dump(1) + "\n";
}

std::string profile_to_csv(std::span<const ProfileCurve> curves) {
  std::string out = "solver,tau,fraction\n";
  for (const auto& c : curves) {
    for (const auto& [tau, fraction] : c.breakpoints) {
      out += c.solver + "," + format_real(tau) + "," + format_real(fraction) + "\n";
    }
  }
  return out;
}

std::string profile_to_json(std::span<const ProfileCurve> curves) {
  Json arr = Json::array();
  for (const auto& c : curves) {
    Json points = Json::array();
    for (const auto& [tau, fraction] : c.breakpoints) points.push_back({real_json(tau), real_json(fraction)});
    arr.push_back({{"solver", c.solver}, {"breakpoints", std::move(points)}});
  }
  return arr.dump(1) + "\n";
}

void export_to(const std::filesystem::path& path, Format format, std::span<const RunResult> results) {
  write_text(path, format == Format::Csv ? results_to_csv(results) : results_to_json(results));
}

void export_to(const std::filesystem::path& path, Format format, std::span<const SummaryRow> rows) {
  write_text(path, format == Format::Csv ? summary_to_csv(rows) : summary_to_json(rows));
}

void export_to(const std::filesystem::path& path, Format format, std::span<const ProfileCurve> curves) {
  write_text(path, format == Format::Csv ? profile_to_csv(curves) : profile_to_json(curves));
}

}  // namespace crm

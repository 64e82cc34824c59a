#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "crm/bench.hpp"
#include "crm/error.hpp"
#include "crm/serialize.hpp"

namespace fs = std::filesystem;

namespace {

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    crm::write_text(out_path, text);
  }
}

crm::Metric parse_metric(const std::string& s) {
  return s == "elapsed" ? crm::Metric::Elapsed : crm::Metric::Iterations;
}

crm::Format parse_format(const std::string& s) {
  return s == "json" ? crm::Format::Json : crm::Format::Csv;
}

crm::GroupBy parse_group_by(const std::string& spec) {
  crm::GroupBy g{false, false, false};
  std::istringstream in(spec);
  std::string field;
  while (std::getline(in, field, ',')) {
    if (field == "solver") g.solver = true;
    else if (field == "n") g.n = true;
    else if (field == "p") g.p = true;
    else if (!field.empty()) throw crm::Error(crm::ErrorKind::InvalidArgument, "unknown group-by field '" + field + "'");
  }
  return g;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Circumcentered-reflection and projection methods for common fixed points"};
  app.require_subcommand(1);

  // gen
  crm::InstanceSpec gen_spec;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Generate a random ellipsoid FPP instance (JSON)");
  gen->add_option("--n", gen_spec.n, "Dimension")->check(CLI::PositiveNumber);
  gen->add_option("--p", gen_spec.operators, "Number of operators")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_spec.seed, "Instance seed");
  gen->add_option("--gamma", gen_spec.gamma, "Diagonal shift of A = gamma I + B^T B");
  gen->add_option("--density", gen_spec.density, "Sparsity of B (default 2/n)");
  gen->add_option("--eta", gen_spec.eta, "Start point coordinate (negative)");
  gen->add_option("--out", gen_out, "Output path (default stdout)");

  // run
  std::string run_instance, run_solver = "crm", run_out, run_trace;
  crm::SolverConfig run_cfg;
  bool run_diagnostics = false, run_parallel_blocks = false;
  auto* run = app.add_subcommand("run", "Solve one instance with one method");
  run->add_option("--instance", run_instance, "Instance JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--solver", run_solver, "crm | ppm | map | spm")
      ->check(CLI::IsMember({"crm", "ppm", "map", "spm"}));
  run->add_option("--tol", run_cfg.tolerance, "Stop when successive iterates differ by less");
  run->add_option("--max-iter", run_cfg.max_iterations, "Iteration cap");
  run->add_flag("--diagnostics", run_diagnostics, "Check Fejer/orthogonality/membership every step");
  run->add_flag("--parallel-blocks", run_parallel_blocks, "Evaluate lifted blocks concurrently");
  run->add_option("--out", run_out, "Result CSV path (default stdout)");
  run->add_option("--trace", run_trace, "Write per-iteration residual/distance CSV");

  // bench
  crm::GridConfig grid;
  std::string bench_preset = "paper-text", bench_out_dir = "bench_out";
  std::optional<long> bench_max_iter;
  auto* bench = app.add_subcommand("bench", "Run the CRM vs PPM experiment grid");
  bench->add_option("--n", grid.n_values, "Dimensions")->expected(1, -1);
  bench->add_option("--p", grid.p_values, "Operator counts")->expected(1, -1);
  bench->add_option("--replicates", grid.replicates, "Instances per (n, p)")->check(CLI::PositiveNumber);
  bench->add_option("--master-seed", grid.master_seed, "Master seed");
  bench->add_option("--tol", grid.solver.tolerance, "Solver tolerance");
  bench->add_option("--max-iter", bench_max_iter, "Iteration cap (overrides --preset)");
  bench->add_option("--preset", bench_preset, "paper-text (50000) | paper-table (25000)")
      ->check(CLI::IsMember({"paper-text", "paper-table"}));
  bench->add_option("--jobs", grid.jobs, "Concurrent runs (0 = all cores)");
  bench->add_flag("--parallel-blocks", grid.parallel_blocks, "Evaluate lifted blocks concurrently");
  bench->add_flag("--fejer", grid.solver.diagnostics.fejer, "Abort runs violating the Fejer inequality");
  bench->add_option("--out-dir", bench_out_dir, "Output directory");

  // profile
  std::string prof_in, prof_out, prof_metric = "iterations", prof_format = "csv";
  auto* profile = app.add_subcommand("profile", "Performance profile from a results CSV");
  profile->add_option("--results", prof_in, "Results CSV")->required()->check(CLI::ExistingFile);
  profile->add_option("--metric", prof_metric, "iterations | elapsed")
      ->check(CLI::IsMember({"iterations", "elapsed"}));
  profile->add_option("--format", prof_format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  profile->add_option("--out", prof_out, "Output path (default stdout)");

  // summarize
  std::string sum_in, sum_out, sum_metric = "iterations", sum_format = "csv", sum_group = "solver";
  auto* summarize = app.add_subcommand("summarize", "Mean/max/min/std per group from a results CSV");
  summarize->add_option("--results", sum_in, "Results CSV")->required()->check(CLI::ExistingFile);
  summarize->add_option("--metric", sum_metric, "iterations | elapsed")
      ->check(CLI::IsMember({"iterations", "elapsed"}));
  summarize->add_option("--group-by", sum_group, "Comma list of solver,n,p");
  summarize->add_option("--format", sum_format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  summarize->add_option("--out", sum_out, "Output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      emit(gen_out, crm::instance_to_json(crm::gen_instance(gen_spec)));
    } else if (run->parsed()) {
      const crm::FppInstance instance = crm::instance_from_json(crm::read_text(run_instance));
      const crm::Vector x0 = crm::initial_point(instance);
      const crm::Vector y_star = instance.certified_fixed_point();
      const crm::StepKind kind = crm::step_kind_from_string(run_solver);
      if (run_diagnostics) {
        run_cfg.diagnostics = {true, kind == crm::StepKind::Crm,
                               kind == crm::StepKind::Crm || kind == crm::StepKind::Map};
      }
      crm::IterationTrace trace;
      if (kind == crm::StepKind::Crm || kind == crm::StepKind::Map) {
        const auto m = instance.spec.operators;
        const crm::PairProblem lifted = crm::lift(crm::MultiProblem{instance.operators}, run_parallel_blocks);
        trace = crm::run(kind, lifted, crm::embed(x0, m).flat(), run_cfg, crm::embed(y_star, m).flat());
      } else {
        trace = crm::run(kind, crm::MultiProblem{instance.operators}, x0, run_cfg, y_star);
      }
      crm::RunResult r;
      r.solver = kind;
      r.n = instance.spec.n;
      r.p = instance.spec.operators;
      r.seed = instance.spec.seed;
      r.iterations = trace.iterations;
      r.elapsed_seconds = trace.elapsed_seconds;
      r.final_residual = trace.final_residual;
      r.stop_reason = trace.stop_reason;
      const std::vector<crm::RunResult> rows{r};
      emit(run_out, crm::results_to_csv(rows));
      if (!run_trace.empty()) {
        std::string text = "iteration,residual,distance\n";
        for (std::size_t k = 0; k < trace.residual_history.size(); ++k) {
          text += std::to_string(k + 1) + "," + crm::format_real(trace.residual_history[k]) + "," +
                  crm::format_real(trace.dist_history[k + 1]) + "\n";
        }
        crm::write_text(run_trace, text);
      }
    } else if (bench->parsed()) {
      grid.solver.max_iterations = bench_max_iter.value_or(crm::preset_max_iterations(
          bench_preset == "paper-table" ? crm::Preset::PaperTable : crm::Preset::PaperText));
      fs::create_directories(bench_out_dir);
      const auto results = crm::run_experiment(grid);
      const fs::path dir(bench_out_dir);
      crm::export_to(dir / "results.csv", crm::Format::Csv, std::span<const crm::RunResult>(results));
      for (auto metric : {crm::Metric::Iterations, crm::Metric::Elapsed}) {
        const std::string tag = metric == crm::Metric::Iterations ? "iterations" : "elapsed";
        const auto all = crm::summarize(results, {true, false, false}, metric);
        const auto by_n = crm::summarize(results, {true, true, false}, metric);
        const auto by_p = crm::summarize(results, {true, false, true}, metric);
        crm::export_to(dir / ("summary_" + tag + "_all.csv"), crm::Format::Csv, std::span<const crm::SummaryRow>(all));
        crm::export_to(dir / ("summary_" + tag + "_by_n.csv"), crm::Format::Csv, std::span<const crm::SummaryRow>(by_n));
        crm::export_to(dir / ("summary_" + tag + "_by_p.csv"), crm::Format::Csv, std::span<const crm::SummaryRow>(by_p));
        const auto curves = crm::performance_profile(results, metric);
        crm::export_to(dir / ("profile_" + tag + ".csv"), crm::Format::Csv, std::span<const crm::ProfileCurve>(curves));
      }
      std::cout << crm::summary_to_csv(crm::summarize(results, {true, false, false}, crm::Metric::Iterations));
      std::size_t failures = 0;
      for (const auto& r : results) {
        if (!r.failure.empty()) {
          ++failures;
          std::cerr << "run n=" << r.n << " p=" << r.p << " rep=" << r.replicate << " "
                    << crm::to_string(r.solver) << ": " << r.failure << "\n";
        }
      }
      if (failures) std::cerr << failures << " run(s) failed\n";
    } else if (profile->parsed()) {
      const auto results = crm::results_from_csv(crm::read_text(prof_in));
      const auto curves = crm::performance_profile(results, parse_metric(prof_metric));
      const std::span<const crm::ProfileCurve> view(curves);
      emit(prof_out, parse_format(prof_format) == crm::Format::Csv ? crm::profile_to_csv(view)
                                                                   : crm::profile_to_json(view));
    } else if (summarize->parsed()) {
      const auto results = crm::results_from_csv(crm::read_text(sum_in));
      const auto rows = crm::summarize(results, parse_group_by(sum_group), parse_metric(sum_metric));
      const std::span<const crm::SummaryRow> view(rows);
      emit(sum_out, parse_format(sum_format) == crm::Format::Csv ? crm::summary_to_csv(view)
                                                                 : crm::summary_to_json(view));
    }
  } catch (const crm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

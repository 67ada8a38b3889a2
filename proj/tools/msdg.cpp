#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "msdg/experiments.hpp"
#include "msdg/linsolve.hpp"
#include "msdg/version.hpp"

namespace {

using namespace msdg;

struct CliOverrides {
  std::string config;
  std::string out;
  std::string method;
  std::string l_add;
  std::optional<double> eta;
  std::optional<double> delta;
  std::optional<int> threads;
};

void add_common_flags(CLI::App* cmd, CliOverrides& o) {
  cmd->add_option("--config", o.config, "Configuration file (flat key = value lines)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--method", o.method, "Coarse space construction: I, II, III or III-m");
  cmd->add_option("--eta", o.eta, "Contrast of the synthetic coefficient");
  cmd->add_option("--l-add", o.l_add, "Comma-separated list of extra modes per block");
  cmd->add_option("--delta", o.delta, "Jump-penalty coefficient of the system operator");
  cmd->add_option("--threads", o.threads, "Worker threads; 0 picks the hardware count");
}

ExperimentConfig resolve_config(const CliOverrides& o) {
  ExperimentConfig cfg;
  if (!o.config.empty()) cfg = read_config(o.config);
  if (const char* env = std::getenv("MSDG_OUT_DIR"); env && *env) cfg.out = env;
  if (!o.out.empty()) cfg.out = o.out;
  if (!o.method.empty()) cfg.method = parse_method(o.method);
  if (o.eta) cfg.eta = *o.eta;
  if (o.delta) cfg.delta = *o.delta;
  if (o.threads) cfg.threads = *o.threads;
  if (!o.l_add.empty()) {
    cfg.l_add.clear();
    std::string item;
    std::istringstream ss(o.l_add);
    while (std::getline(ss, item, ',')) cfg.l_add.push_back(std::stoi(item));
  }
  validate(cfg);
  return cfg;
}

void print_row_header() {
  std::printf("%6s %6s %12s %12s %12s %12s %12s %10s\n", "L_add", "dim", "interface", "interior",
              "total", "energy", "lambda_min", "relative");
}

void print_row(const TableRow& r) {
  std::printf("%6d %6d %12.4e %12.4e %12.4e %12.4e %12.5g %10.3e\n", r.l_add, r.dim,
              std::sqrt(r.report.interface), std::sqrt(r.report.interior),
              std::sqrt(r.report.total), std::sqrt(r.report.energy), r.report.lambda_min,
              r.report.relative);
}

int cmd_table(const CliOverrides& o) {
  const ExperimentConfig cfg = resolve_config(o);
  const ResultTable table = run_table(cfg);
  std::printf("config %s, method %s, errors are square roots of the tabulated squares\n",
              table.config_hash.c_str(), method_name(cfg.method).c_str());
  print_row_header();
  for (const TableRow& r : table.rows) print_row(r);
  bool have_snap = false;
  for (const TableRow& r : table.rows) have_snap = have_snap || std::isfinite(r.snapshot_total);
  if (have_snap) {
    std::printf("distance to the snapshot-span Galerkin solution (broken norm):\n");
    for (const TableRow& r : table.rows)
      std::printf("%6d %12.4e\n", r.l_add, std::sqrt(r.snapshot_total));
  }
  std::printf("offline %.2fs, rows %.2fs, csv written to %s/table.csv\n", table.offline_seconds,
              table.runtime_seconds, cfg.out.c_str());
  return 0;
}

int cmd_penalty_sweep(const CliOverrides& o) {
  const ExperimentConfig cfg = resolve_config(o);
  const SweepResult sweep = run_penalty_sweep(cfg);
  std::printf("config %s, %zu rows, errors are square roots of the tabulated squares\n",
              sweep.config_hash.c_str(), sweep.rows.size());
  std::printf("%6s %10s %12s %12s %12s\n", "L_add", "scaling", "interface", "interior", "total");
  for (const SweepRow& r : sweep.rows)
    std::printf("%6d %10g %12.4e %12.4e %12.4e\n", r.l_add, r.scaling,
                std::sqrt(r.report.interface), std::sqrt(r.report.interior),
                std::sqrt(r.report.total));
  std::printf("%.2fs, outputs in %s: penalty_sweep.csv, penalty_sweep.svg\n",
              sweep.runtime_seconds, cfg.out.c_str());
  return 0;
}

int cmd_lambda_plot(const CliOverrides& o) {
  const ExperimentConfig cfg = resolve_config(o);
  const LambdaPlotResult result = run_lambda_plot(cfg);
  std::printf("config %s\n", result.table.config_hash.c_str());
  print_row_header();
  for (const TableRow& r : result.table.rows) print_row(r);
  if (std::isfinite(result.pearson))
    std::printf("pearson(total, 1/lambda_min) = %.4f\n", result.pearson);
  else
    std::printf("pearson: not defined for fewer than two points\n");
  std::printf("outputs in %s: lambda_plot.csv, lambda_plot.svg\n", cfg.out.c_str());
  return 0;
}

int cmd_solve(const CliOverrides& o, const std::string& basis_path, bool dump_fine,
              const std::string& dump_path) {
  const ExperimentConfig cfg = resolve_config(o);
  PartitionedMesh mesh = build_partition(cfg.M, cfg.m);
  CoefficientField field = make_coefficient(cfg, mesh);
  interface_weights(mesh, field);
  const DGSystem system = assemble_dg_system(mesh, field, cfg.delta, cfg.rhs);
  const BrokenVector u_fine(mesh, spd_solve(system.K, system.b).x);

  const std::string solution_file =
      dump_path.empty()
          ? (std::filesystem::create_directories(cfg.out),
             (std::filesystem::path(cfg.out) / "solution.txt").string())
          : dump_path;

  if (dump_fine) {
    dump_solution(solution_file, mesh, "fine", -1, cfg.delta, u_fine);
    std::printf("fine solution (%d unknowns) written to %s\n",
                static_cast<int>(u_fine.flat().size()), solution_file.c_str());
    return 0;
  }

  CoarseSpace space;
  if (!basis_path.empty()) {
    double basis_delta = 0.0;
    space = load_basis(basis_path, mesh, &basis_delta);
    if (basis_delta != cfg.delta)
      throw std::invalid_argument("basis was serialized at delta=" + std::to_string(basis_delta) +
                                  " but the configuration says delta=" + std::to_string(cfg.delta));
  } else {
    space = build_configured_space(cfg, mesh, field).truncated(cfg.l_add.front());
    space.full.clear();
  }

  const CoarseSolution sol = coarse_solve(system, mesh, field, space);
  const ErrorMetrics metrics(mesh, field);
  const ErrorReport rep =
      metrics.report(system.K, u_fine, sol.u_H, space.lambda_min_left_out);
  std::printf("coarse dim %d, relative residual %.2e\n", sol.dim, sol.relative_residual);
  print_row_header();
  TableRow row;
  row.l_add = space.total_counts.empty() ? 0 : space.total_counts[0] - space.small_counts[0];
  row.dim = sol.dim;
  row.report = rep;
  print_row(row);
  dump_solution(solution_file, mesh, method_name(space.method), row.l_add, cfg.delta, sol.u_H);
  std::printf("coarse solution written to %s\n", solution_file.c_str());
  return 0;
}

int cmd_dump_basis(const CliOverrides& o, const std::string& basis_out) {
  const ExperimentConfig cfg = resolve_config(o);
  PartitionedMesh mesh = build_partition(cfg.M, cfg.m);
  CoefficientField field = make_coefficient(cfg, mesh);
  interface_weights(mesh, field);
  CoarseSpace space = build_configured_space(cfg, mesh, field).truncated(cfg.l_add.front());
  const std::string path =
      basis_out.empty()
          ? (std::filesystem::create_directories(cfg.out),
             (std::filesystem::path(cfg.out) / "basis.txt").string())
          : basis_out;
  dump_basis(path, mesh, cfg.delta, space);
  std::printf("method %s basis (dim %d, L_add %d) written to %s\n",
              method_name(space.method).c_str(), space.total_dim(), cfg.l_add.front(),
              path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiscale spectral coarse spaces for an interior-penalty DG discretization"};
  app.set_version_flag("--version", std::string(msdg::kToolName) + " " + msdg::kVersion);
  app.require_subcommand(1);

  CliOverrides table_o, sweep_o, lambda_o, solve_o, basis_o;
  std::string solve_basis, solve_dump, basis_out;
  bool solve_fine = false;

  CLI::App* table = app.add_subcommand("table", "Error table over the configured L_add values");
  add_common_flags(table, table_o);

  CLI::App* sweep =
      app.add_subcommand("penalty-sweep", "Coarse-operator errors across jump-penalty scalings");
  add_common_flags(sweep, sweep_o);

  CLI::App* lambda =
      app.add_subcommand("lambda-plot", "Total error against the reciprocal smallest left-out eigenvalue");
  add_common_flags(lambda, lambda_o);

  CLI::App* solve = app.add_subcommand("solve", "Solve once and dump the solution field");
  add_common_flags(solve, solve_o);
  solve->add_option("--basis", solve_basis, "Reuse a serialized basis (skips the eigensolves)")
      ->check(CLI::ExistingFile);
  solve->add_flag("--fine", solve_fine, "Dump the fine-grid solution instead of a coarse one");
  solve->add_option("--dump", solve_dump, "Solution file path (default <out>/solution.txt)");

  CLI::App* dumpb = app.add_subcommand("dump-basis", "Serialize the coarse basis for later reuse");
  add_common_flags(dumpb, basis_o);
  dumpb->add_option("--basis-out", basis_out, "Basis file path (default <out>/basis.txt)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (table->parsed()) return cmd_table(table_o);
    if (sweep->parsed()) return cmd_penalty_sweep(sweep_o);
    if (lambda->parsed()) return cmd_lambda_plot(lambda_o);
    if (solve->parsed()) return cmd_solve(solve_o, solve_basis, solve_fine, solve_dump);
    if (dumpb->parsed()) return cmd_dump_basis(basis_o, basis_out);
  } catch (const std::exception& e) {
    std::cerr << "msdg: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

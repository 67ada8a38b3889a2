#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "msdg/broken_vector.hpp"
#include "msdg/coarse_solver.hpp"
#include "msdg/coefficient.hpp"
#include "msdg/error_metrics.hpp"
#include "msdg/fe_core.hpp"
#include "msdg/mesh.hpp"
#include "msdg/spectral_spaces.hpp"

namespace msdg {

struct ExperimentConfig {
  int M = 10;
  int m = 10;
  double eta = 1e4;
  std::uint64_t seed = 1;
  bool channels_touch_boundaries = false;
  std::string raster;  // when nonempty, the coefficient is read from this file
  CoarseMethod method = CoarseMethod::kWeighted;
  SnapshotMass snapshot_mass = SnapshotMass::kBoundary;
  double delta = 4.0;
  std::vector<int> l_add = {0, 2, 4, 6, 8, 10};
  std::vector<double> penalty_scalings = {40, 70, 100, 150, 200, 300, 400};
  double rhs = 1.0;
  int threads = 1;
  std::string out = ".";
};

// Flat "key = value" text, one pair per line, '#' starts a comment. Unknown
// keys are rejected. Keys: mesh.M, mesh.m, coefficient.eta, coefficient.seed,
// coefficient.raster, coefficient.channels_touch_boundaries, method,
// method3.mass, delta, l_add, penalty_scalings, rhs, threads, out.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig read_config(const std::string& path);
void validate(const ExperimentConfig& cfg);

// Canonical serialization of the mathematically relevant fields (threads and
// the output directory excluded) and its FNV-1a 64-bit hash, 16 hex digits.
std::string canonical_config(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

CoefficientField make_coefficient(const ExperimentConfig& cfg, const PartitionedMesh& mesh);

// Coarse space for the configured method with zero extra modes and the full
// decompositions retained, so callers re-truncate per table row. For the
// snapshot methods the snapshot space is returned through snapshots_out.
CoarseSpace build_configured_space(const ExperimentConfig& cfg, const PartitionedMesh& mesh,
                                   const CoefficientField& field,
                                   std::optional<SnapshotSpace>* snapshots_out = nullptr);

// Everything the experiment commands share: mesh, coefficient, assembled
// operators, eigenspaces, and the fine reference solution.
struct ExperimentSetup {
  explicit ExperimentSetup(const ExperimentConfig& cfg);

  ExperimentConfig cfg;
  PartitionedMesh mesh;
  CoefficientField field;
  DGSystem system;
  CoarseSpace space;
  std::optional<SnapshotSpace> snapshots;
  BrokenVector u_fine;
  std::optional<BrokenVector> u_snap;  // Galerkin solution in the snapshot span
  double offline_seconds = 0.0;
};

struct TableRow {
  int l_add = 0;
  int dim = 0;
  ErrorReport report;
  // Squared broken-norm distance to the snapshot-span Galerkin solution,
  // filled for the snapshot methods only.
  double snapshot_total = std::numeric_limits<double>::quiet_NaN();
};

struct ResultTable {
  std::vector<TableRow> rows;
  std::string config_hash;
  double runtime_seconds = 0.0;   // in-memory metadata, never serialized
  double offline_seconds = 0.0;
};

ResultTable compute_table(const ExperimentSetup& setup);
void write_table_csv(const std::string& path, const ResultTable& table);
ResultTable run_table(const ExperimentConfig& cfg);  // writes <out>/table.csv

struct SweepRow {
  int l_add = 0;
  double scaling = 0.0;
  ErrorReport report;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // l_add outer, scaling inner, both in config order
  std::string config_hash;
  double runtime_seconds = 0.0;
};

SweepResult compute_penalty_sweep(const ExperimentSetup& setup);
void write_sweep_csv(const std::string& path, const SweepResult& sweep);
void write_sweep_svg(const std::string& path, const SweepResult& sweep);
// Writes <out>/penalty_sweep.csv and <out>/penalty_sweep.svg.
SweepResult run_penalty_sweep(const ExperimentConfig& cfg);

struct LambdaPlotResult {
  ResultTable table;
  // Correlation between total error and 1/lambda_min; NaN below two points.
  double pearson = std::numeric_limits<double>::quiet_NaN();
};

LambdaPlotResult compute_lambda_plot(const ExperimentSetup& setup);
void write_lambda_csv(const std::string& path, const LambdaPlotResult& result);
void write_lambda_svg(const std::string& path, const LambdaPlotResult& result,
                      const std::string& label);
// Writes <out>/lambda_plot.csv and <out>/lambda_plot.svg.
LambdaPlotResult run_lambda_plot(const ExperimentConfig& cfg);

// Text dump of a broken-space function: header line with the mesh and method,
// then per block one "x y value" line per node, %.17g so values round-trip
// exactly. l_add = -1 marks a fine-grid solution.
struct SolutionDump {
  int M = 0;
  int m = 0;
  std::string method;
  int l_add = -1;
  double delta = 0.0;
  Eigen::VectorXd values;
};

void dump_solution(const std::string& path, const PartitionedMesh& mesh, const std::string& method,
                   int l_add, double delta, const BrokenVector& u);
SolutionDump load_solution(const std::string& path);

// Offline artifact: the retained basis of a coarse space, exact round-trip.
// The loaded space has no full decompositions, so it cannot be re-truncated.
void dump_basis(const std::string& path, const PartitionedMesh& mesh, double delta,
                const CoarseSpace& space);
CoarseSpace load_basis(const std::string& path, const PartitionedMesh& mesh,
                       double* delta_out = nullptr);

double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace msdg

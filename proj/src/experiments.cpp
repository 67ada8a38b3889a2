#include "msdg/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "msdg/linsolve.hpp"
#include "msdg/parallel.hpp"
#include "msdg/svg.hpp"
#include "msdg/version.hpp"

namespace msdg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string trim(std::string_view s) {
  const char* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw std::invalid_argument("config: bad value '" + value + "' for key '" + key + "'");
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t idx = 0;
    const long long v = std::stoll(value, &idx);
    if (idx != value.size()) bad_value(key, value);
    return v;
  } catch (const std::invalid_argument&) {
    bad_value(key, value);
  } catch (const std::out_of_range&) {
    bad_value(key, value);
  }
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
  try {
    std::size_t idx = 0;
    const unsigned long long v = std::stoull(value, &idx);
    if (idx != value.size() || value.find('-') != std::string::npos) bad_value(key, value);
    return v;
  } catch (const std::invalid_argument&) {
    bad_value(key, value);
  } catch (const std::out_of_range&) {
    bad_value(key, value);
  }
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t idx = 0;
    const double v = std::stod(value, &idx);
    if (idx != value.size()) bad_value(key, value);
    return v;
  } catch (const std::invalid_argument&) {
    bad_value(key, value);
  } catch (const std::out_of_range&) {
    bad_value(key, value);
  }
}

bool parse_flag(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string cur;
  std::istringstream ss(value);
  while (std::getline(ss, cur, ',')) items.push_back(trim(cur));
  if (!value.empty() && value.back() == ',') items.emplace_back();
  return items;
}

std::string fmt_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_csv(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string join_ints(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

std::string join_reals(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += fmt_real(v[i]);
  }
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  return f;
}

std::string out_path(const ExperimentConfig& cfg, const char* name) {
  std::filesystem::create_directories(cfg.out);
  return (std::filesystem::path(cfg.out) / name).string();
}

void csv_header(std::ofstream& f, const std::string& hash, const char* note) {
  f << "# " << kToolName << " " << kVersion << "\n";
  f << "# config " << hash << "\n";
  f << "# " << note << "\n";
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected 'key = value'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");

    if (key == "mesh.M") {
      cfg.M = static_cast<int>(parse_int(key, value));
    } else if (key == "mesh.m") {
      cfg.m = static_cast<int>(parse_int(key, value));
    } else if (key == "coefficient.eta") {
      cfg.eta = parse_real(key, value);
    } else if (key == "coefficient.seed") {
      cfg.seed = parse_uint(key, value);
    } else if (key == "coefficient.raster") {
      cfg.raster = value;
    } else if (key == "coefficient.channels_touch_boundaries") {
      cfg.channels_touch_boundaries = parse_flag(key, value);
    } else if (key == "method") {
      cfg.method = parse_method(value);
    } else if (key == "method3.mass") {
      cfg.snapshot_mass = parse_snapshot_mass(value);
    } else if (key == "delta") {
      cfg.delta = parse_real(key, value);
    } else if (key == "l_add") {
      cfg.l_add.clear();
      for (const std::string& item : split_list(value))
        cfg.l_add.push_back(static_cast<int>(parse_int(key, item)));
    } else if (key == "penalty_scalings") {
      cfg.penalty_scalings.clear();
      for (const std::string& item : split_list(value))
        cfg.penalty_scalings.push_back(parse_real(key, item));
    } else if (key == "rhs") {
      cfg.rhs = parse_real(key, value);
    } else if (key == "threads") {
      cfg.threads = static_cast<int>(parse_int(key, value));
    } else if (key == "out") {
      cfg.out = value;
    } else {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": unknown key '" +
                                  key + "'");
    }
  }
  validate(cfg);
  return cfg;
}

ExperimentConfig read_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.M < 1 || cfg.m < 1) throw std::invalid_argument("config: mesh.M and mesh.m must be >= 1");
  if (!(cfg.eta > 0.0)) throw std::invalid_argument("config: coefficient.eta must be positive");
  if (!(cfg.delta > 0.0)) throw std::invalid_argument("config: delta must be positive");
  if (!std::isfinite(cfg.rhs)) throw std::invalid_argument("config: rhs must be finite");
  if (cfg.threads < 0) throw std::invalid_argument("config: threads must be >= 0");
  if (cfg.l_add.empty()) throw std::invalid_argument("config: l_add must list at least one value");
  for (int l : cfg.l_add)
    if (l < 0) throw std::invalid_argument("config: l_add values must be >= 0");
  if (cfg.penalty_scalings.empty())
    throw std::invalid_argument("config: penalty_scalings must list at least one value");
  for (double s : cfg.penalty_scalings)
    if (!(s > 0.0)) throw std::invalid_argument("config: penalty scalings must be positive");
  if (cfg.out.empty()) throw std::invalid_argument("config: out must not be empty");
}

std::string canonical_config(const ExperimentConfig& cfg) {
  std::string s;
  s += "coefficient.channels_touch_boundaries=" +
       std::string(cfg.channels_touch_boundaries ? "1" : "0") + "\n";
  s += "coefficient.eta=" + fmt_real(cfg.eta) + "\n";
  s += "coefficient.raster=" + cfg.raster + "\n";
  s += "coefficient.seed=" + std::to_string(cfg.seed) + "\n";
  s += "delta=" + fmt_real(cfg.delta) + "\n";
  s += "l_add=" + join_ints(cfg.l_add) + "\n";
  s += "mesh.M=" + std::to_string(cfg.M) + "\n";
  s += "mesh.m=" + std::to_string(cfg.m) + "\n";
  s += "method=" + method_name(cfg.method) + "\n";
  s += "method3.mass=" + snapshot_mass_name(cfg.snapshot_mass) + "\n";
  s += "penalty_scalings=" + join_reals(cfg.penalty_scalings) + "\n";
  s += "rhs=" + fmt_real(cfg.rhs) + "\n";
  return s;
}

std::string config_hash(const ExperimentConfig& cfg) {
  const std::string s = canonical_config(cfg);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

CoefficientField make_coefficient(const ExperimentConfig& cfg, const PartitionedMesh& mesh) {
  if (!cfg.raster.empty()) return read_raster(cfg.raster, mesh);
  SynthOptions opts;
  opts.channels_touch_boundaries = cfg.channels_touch_boundaries;
  return synth_channels_inclusions(mesh, cfg.eta, cfg.seed, opts);
}

CoarseSpace build_configured_space(const ExperimentConfig& cfg, const PartitionedMesh& mesh,
                                   const CoefficientField& field,
                                   std::optional<SnapshotSpace>* snapshots_out) {
  const ModeCounts counts;  // zero extra modes; tables re-truncate
  const int threads = resolve_threads(cfg.threads, mesh.block_count());
  switch (cfg.method) {
    case CoarseMethod::kWeighted:
      return method_I_space(mesh, field, counts, threads);
    case CoarseMethod::kAmended:
      return method_II_space(mesh, field, cfg.delta, counts, threads);
    case CoarseMethod::kSnapshot:
    case CoarseMethod::kSnapshotMass: {
      SnapshotSpace snap = harmonic_snapshots(mesh, field, cfg.delta, threads);
      const SnapshotMass mass = cfg.method == CoarseMethod::kSnapshotMass ? SnapshotMass::kInterior
                                                                          : cfg.snapshot_mass;
      CoarseSpace space = method_III_space(snap, counts, mass, threads);
      if (snapshots_out) *snapshots_out = std::move(snap);
      return space;
    }
  }
  throw std::logic_error("build_configured_space: unhandled method");
}

ExperimentSetup::ExperimentSetup(const ExperimentConfig& c)
    : cfg((validate(c), c)),
      mesh(build_partition(c.M, c.m)),
      field(make_coefficient(c, mesh)) {
  interface_weights(mesh, field);
  const auto t0 = Clock::now();
  system = assemble_dg_system(mesh, field, cfg.delta, cfg.rhs);
  space = build_configured_space(cfg, mesh, field, &snapshots);
  offline_seconds = seconds_since(t0);
  u_fine = BrokenVector(mesh, spd_solve(system.K, system.b).x);
  if (snapshots) u_snap = snapshot_reference(system, mesh, *snapshots);
}

ResultTable compute_table(const ExperimentSetup& setup) {
  const auto t0 = Clock::now();
  ResultTable table;
  table.config_hash = config_hash(setup.cfg);
  table.offline_seconds = setup.offline_seconds;

  const ErrorMetrics metrics(setup.mesh, setup.field);
  const int n = static_cast<int>(setup.cfg.l_add.size());
  std::vector<CoarseSpace> spaces(n);
  for (int k = 0; k < n; ++k) {
    spaces[k] = setup.space.truncated(setup.cfg.l_add[k]);
    spaces[k].full.clear();
  }
  table.rows.resize(n);
  parallel_for(n, resolve_threads(setup.cfg.threads, n), [&](int k) {
    const CoarseSpace& space_k = spaces[k];
    const CoarseSolution sol = coarse_solve(setup.system, setup.mesh, setup.field, space_k);
    TableRow row;
    row.l_add = setup.cfg.l_add[k];
    row.dim = sol.dim;
    row.report =
        metrics.report(setup.system.K, setup.u_fine, sol.u_H, space_k.lambda_min_left_out);
    if (setup.u_snap) {
      const ErrorReport vs_snap =
          metrics.report(setup.system.K, *setup.u_snap, sol.u_H, space_k.lambda_min_left_out);
      row.snapshot_total = vs_snap.total;
    }
    table.rows[k] = row;
  });
  table.runtime_seconds = seconds_since(t0);
  return table;
}

void write_table_csv(const std::string& path, const ResultTable& table) {
  std::ofstream f = open_out(path);
  csv_header(f, table.config_hash,
             "squared broken-norm quantities; lambda_min is the smallest left-out eigenvalue");
  f << "L_add,dim,interface,interior,total,energy,lambda_min\n";
  for (const TableRow& r : table.rows)
    f << r.l_add << ',' << r.dim << ',' << fmt_csv(r.report.interface) << ','
      << fmt_csv(r.report.interior) << ',' << fmt_csv(r.report.total) << ','
      << fmt_csv(r.report.energy) << ',' << fmt_csv(r.report.lambda_min) << "\n";
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

ResultTable run_table(const ExperimentConfig& cfg) {
  validate(cfg);
  const ExperimentSetup setup(cfg);
  ResultTable table = compute_table(setup);
  write_table_csv(out_path(cfg, "table.csv"), table);
  return table;
}

SweepResult compute_penalty_sweep(const ExperimentSetup& setup) {
  if (setup.cfg.method != CoarseMethod::kWeighted)
    throw std::invalid_argument("penalty sweep: the study runs on method I");
  const auto t0 = Clock::now();
  SweepResult sweep;
  sweep.config_hash = config_hash(setup.cfg);

  const ErrorMetrics metrics(setup.mesh, setup.field);
  const int nl = static_cast<int>(setup.cfg.l_add.size());
  const int ns = static_cast<int>(setup.cfg.penalty_scalings.size());
  std::vector<CoarseSpace> spaces(nl);
  for (int k = 0; k < nl; ++k) {
    spaces[k] = setup.space.truncated(setup.cfg.l_add[k]);
    spaces[k].full.clear();
  }
  sweep.rows.resize(static_cast<std::size_t>(nl) * ns);
  parallel_for(nl * ns, resolve_threads(setup.cfg.threads, nl * ns), [&](int idx) {
    const int k = idx / ns;
    const int j = idx % ns;
    const double scaling = setup.cfg.penalty_scalings[j];
    const CoarseSpace& space_k = spaces[k];
    const CoarseSolution sol =
        coarse_solve(setup.system, setup.mesh, setup.field, space_k, scaling);
    SweepRow row;
    row.l_add = setup.cfg.l_add[k];
    row.scaling = scaling;
    row.report =
        metrics.report(setup.system.K, setup.u_fine, sol.u_H, space_k.lambda_min_left_out);
    sweep.rows[idx] = row;
  });
  sweep.runtime_seconds = seconds_since(t0);
  return sweep;
}

void write_sweep_csv(const std::string& path, const SweepResult& sweep) {
  std::ofstream f = open_out(path);
  csv_header(f, sweep.config_hash,
             "squared broken-norm quantities of the coarse solve at each constant jump scaling");
  f << "L_add,scaling,interface,interior,total,energy\n";
  for (const SweepRow& r : sweep.rows)
    f << r.l_add << ',' << fmt_csv(r.scaling) << ',' << fmt_csv(r.report.interface) << ','
      << fmt_csv(r.report.interior) << ',' << fmt_csv(r.report.total) << ','
      << fmt_csv(r.report.energy) << "\n";
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

void write_sweep_svg(const std::string& path, const SweepResult& sweep) {
  Panel interface_panel{"Interface error vs penalty scaling", "penalty scaling",
                        "interface error (squared)", false, true, {}};
  Panel interior_panel{"Interior error vs penalty scaling", "penalty scaling",
                       "interior error (squared)", false, true, {}};
  std::vector<int> l_values;
  for (const SweepRow& r : sweep.rows)
    if (l_values.empty() || l_values.back() != r.l_add) l_values.push_back(r.l_add);
  for (int l : l_values) {
    Series si{"L_add=" + std::to_string(l), {}, {}};
    Series so = si;
    for (const SweepRow& r : sweep.rows) {
      if (r.l_add != l) continue;
      si.x.push_back(r.scaling);
      si.y.push_back(r.report.interface);
      so.x.push_back(r.scaling);
      so.y.push_back(r.report.interior);
    }
    interface_panel.series.push_back(std::move(si));
    interior_panel.series.push_back(std::move(so));
  }
  write_svg(path, {interface_panel, interior_panel});
}

SweepResult run_penalty_sweep(const ExperimentConfig& cfg) {
  validate(cfg);
  const ExperimentSetup setup(cfg);
  SweepResult sweep = compute_penalty_sweep(setup);
  write_sweep_csv(out_path(cfg, "penalty_sweep.csv"), sweep);
  write_sweep_svg(out_path(cfg, "penalty_sweep.svg"), sweep);
  return sweep;
}

double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

LambdaPlotResult compute_lambda_plot(const ExperimentSetup& setup) {
  LambdaPlotResult result;
  result.table = compute_table(setup);
  std::vector<double> inv_lambda, total;
  for (const TableRow& r : result.table.rows) {
    if (!(r.report.lambda_min > 0.0) || !std::isfinite(r.report.lambda_min)) continue;
    inv_lambda.push_back(1.0 / r.report.lambda_min);
    total.push_back(r.report.total);
  }
  result.pearson = pearson_correlation(inv_lambda, total);
  return result;
}

void write_lambda_csv(const std::string& path, const LambdaPlotResult& result) {
  std::ofstream f = open_out(path);
  csv_header(f, result.table.config_hash,
             "squared total error against the reciprocal of the smallest left-out eigenvalue");
  if (std::isfinite(result.pearson)) f << "# pearson " << fmt_csv(result.pearson) << "\n";
  f << "L_add,lambda_min,inv_lambda_min,total\n";
  for (const TableRow& r : result.table.rows) {
    const double lm = r.report.lambda_min;
    const double inv = lm > 0.0 ? 1.0 / lm : std::numeric_limits<double>::quiet_NaN();
    f << r.l_add << ',' << fmt_csv(lm) << ',' << fmt_csv(inv) << ',' << fmt_csv(r.report.total)
      << "\n";
  }
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

void write_lambda_svg(const std::string& path, const LambdaPlotResult& result,
                      const std::string& label) {
  Series s{label, {}, {}};
  for (const TableRow& r : result.table.rows) {
    if (!(r.report.lambda_min > 0.0) || !std::isfinite(r.report.lambda_min)) continue;
    s.x.push_back(1.0 / r.report.lambda_min);
    s.y.push_back(r.report.total);
  }
  Panel panel{"Total error vs 1/lambda_min", "1 / lambda_min", "total error (squared)", true, true,
              {std::move(s)}};
  write_svg(path, {panel});
}

LambdaPlotResult run_lambda_plot(const ExperimentConfig& cfg) {
  validate(cfg);
  const ExperimentSetup setup(cfg);
  LambdaPlotResult result = compute_lambda_plot(setup);
  write_lambda_csv(out_path(cfg, "lambda_plot.csv"), result);
  char label[64];
  std::snprintf(label, sizeof(label), "method %s, eta=%g", method_name(cfg.method).c_str(),
                cfg.eta);
  write_lambda_svg(out_path(cfg, "lambda_plot.svg"), result, label);
  return result;
}

void dump_solution(const std::string& path, const PartitionedMesh& mesh, const std::string& method,
                   int l_add, double delta, const BrokenVector& u) {
  if (u.flat().size() != mesh.total_dim())
    throw std::invalid_argument("dump_solution: vector does not match the mesh");
  std::ofstream f = open_out(path);
  f << "msdg-solution 1\n";
  f << "M " << mesh.M << " m " << mesh.m << " method " << method << " L_add " << l_add
    << " delta " << fmt_real(delta) << "\n";
  for (int i = 0; i < mesh.block_count(); ++i) {
    f << "block " << i << "\n";
    const auto& verts = mesh.blocks[i].vertices;
    const auto seg = u.block(i);
    for (int k = 0; k < mesh.block_dim(); ++k)
      f << fmt_real(verts[k].x) << ' ' << fmt_real(verts[k].y) << ' ' << fmt_real(seg[k]) << "\n";
  }
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

namespace {

void expect_token(std::istream& in, const char* expected, const std::string& path) {
  std::string tok;
  if (!(in >> tok) || tok != expected)
    throw std::runtime_error("'" + path + "': expected token '" + expected + "'");
}

// Stream extraction rejects "inf"; route reals through strtod instead.
double read_real(std::istream& in, const std::string& path) {
  std::string tok;
  if (!(in >> tok)) throw std::runtime_error("'" + path + "': expected a number");
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size())
    throw std::runtime_error("'" + path + "': bad number '" + tok + "'");
  return v;
}

}  // namespace

SolutionDump load_solution(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open solution file '" + path + "'");
  expect_token(f, "msdg-solution", path);
  int version = 0;
  f >> version;
  if (version != 1) throw std::runtime_error("'" + path + "': unsupported solution format version");
  SolutionDump dump;
  expect_token(f, "M", path);
  f >> dump.M;
  expect_token(f, "m", path);
  f >> dump.m;
  expect_token(f, "method", path);
  f >> dump.method;
  expect_token(f, "L_add", path);
  f >> dump.l_add;
  expect_token(f, "delta", path);
  f >> dump.delta;
  if (!f || dump.M < 1 || dump.m < 1)
    throw std::runtime_error("'" + path + "': malformed solution header");
  const int blocks = dump.M * dump.M;
  const int dim = (dump.m + 1) * (dump.m + 1);
  dump.values.resize(static_cast<Eigen::Index>(blocks) * dim);
  for (int i = 0; i < blocks; ++i) {
    expect_token(f, "block", path);
    int idx = -1;
    f >> idx;
    if (idx != i) throw std::runtime_error("'" + path + "': blocks out of order");
    for (int k = 0; k < dim; ++k) {
      double x, y, v;
      if (!(f >> x >> y >> v))
        throw std::runtime_error("'" + path + "': truncated block " + std::to_string(i));
      dump.values[static_cast<Eigen::Index>(i) * dim + k] = v;
    }
  }
  return dump;
}

void dump_basis(const std::string& path, const PartitionedMesh& mesh, double delta,
                const CoarseSpace& space) {
  if (static_cast<int>(space.basis.size()) != mesh.block_count())
    throw std::invalid_argument("dump_basis: space does not match the mesh");
  std::ofstream f = open_out(path);
  f << "msdg-basis 1\n";
  f << "M " << mesh.M << " m " << mesh.m << " method " << method_name(space.method) << " delta "
    << fmt_real(delta) << " blocks " << mesh.block_count() << "\n";
  for (int i = 0; i < mesh.block_count(); ++i) {
    const Eigen::MatrixXd& B = space.basis[i];
    const int modes = static_cast<int>(B.cols());
    // Next eigenvalue after the retained ones, +inf when nothing was cut.
    double next = std::numeric_limits<double>::infinity();
    if (!space.full.empty() && modes < space.full[i].values.size())
      next = space.full[i].values[modes];
    f << "block " << i << " small " << space.small_counts[i] << " total " << modes << " rows "
      << B.rows() << " next " << fmt_real(next) << "\n";
    f << "values";
    for (int c = 0; c < modes; ++c) f << ' ' << fmt_real(space.retained_values[i][c]);
    f << "\n";
    for (int r = 0; r < B.rows(); ++r) {
      for (int c = 0; c < modes; ++c) f << (c ? " " : "") << fmt_real(B(r, c));
      f << "\n";
    }
  }
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

CoarseSpace load_basis(const std::string& path, const PartitionedMesh& mesh, double* delta_out) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open basis file '" + path + "'");
  expect_token(f, "msdg-basis", path);
  int version = 0;
  f >> version;
  if (version != 1) throw std::runtime_error("'" + path + "': unsupported basis format version");
  int M = 0, m = 0, blocks = 0;
  std::string method;
  double delta = 0.0;
  expect_token(f, "M", path);
  f >> M;
  expect_token(f, "m", path);
  f >> m;
  expect_token(f, "method", path);
  f >> method;
  expect_token(f, "delta", path);
  f >> delta;
  expect_token(f, "blocks", path);
  f >> blocks;
  if (!f) throw std::runtime_error("'" + path + "': malformed basis header");
  if (M != mesh.M || m != mesh.m || blocks != mesh.block_count())
    throw std::invalid_argument("basis file '" + path + "' was built for a different mesh");
  if (delta_out) *delta_out = delta;

  CoarseSpace space;
  space.method = parse_method(method);
  space.basis.resize(blocks);
  space.retained_values.resize(blocks);
  space.small_counts.resize(blocks);
  space.total_counts.resize(blocks);
  space.lambda_min_left_out = std::numeric_limits<double>::infinity();
  for (int i = 0; i < blocks; ++i) {
    expect_token(f, "block", path);
    int idx = -1, small = 0, total = 0, rows = 0;
    double next = 0.0;
    f >> idx;
    expect_token(f, "small", path);
    f >> small;
    expect_token(f, "total", path);
    f >> total;
    expect_token(f, "rows", path);
    f >> rows;
    expect_token(f, "next", path);
    next = read_real(f, path);
    if (!f || idx != i || small < 1 || total < small || rows != mesh.block_dim())
      throw std::runtime_error("'" + path + "': malformed block header " + std::to_string(i));
    expect_token(f, "values", path);
    Eigen::VectorXd values(total);
    for (int c = 0; c < total; ++c) f >> values[c];
    Eigen::MatrixXd B(rows, total);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < total; ++c) f >> B(r, c);
    if (!f) throw std::runtime_error("'" + path + "': truncated block " + std::to_string(i));
    space.small_counts[i] = small;
    space.total_counts[i] = total;
    space.retained_values[i] = std::move(values);
    space.basis[i] = std::move(B);
    space.lambda_min_left_out = std::min(space.lambda_min_left_out, next);
  }
  return space;
}

}  // namespace msdg

#include "msdg/coefficient.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace msdg {

CoefficientField::CoefficientField(int cells_per_side, std::vector<double> values,
                                   std::string provenance)
    : n_(cells_per_side), values_(std::move(values)), provenance_(std::move(provenance)) {
  if (n_ < 1) throw std::invalid_argument("CoefficientField: cells_per_side must be >= 1");
  if (static_cast<int>(values_.size()) != n_ * n_)
    throw std::invalid_argument("CoefficientField: value count does not match grid");
  min_ = values_[0];
  max_ = values_[0];
  for (double v : values_) {
    if (!(v > 0.0)) throw std::invalid_argument("CoefficientField: values must be positive");
    min_ = std::min(min_, v);
    max_ = std::max(max_, v);
  }
}

double CoefficientField::value(const PartitionedMesh& mesh, int block, int tri) const {
  const SubdomainMesh& b = mesh.blocks[block];
  const Triangle& t = b.triangles[tri];
  const int gx = b.bx * mesh.m + t.cell_x;
  const int gy = b.by * mesh.m + t.cell_y;
  return cell(gx, gy);
}

CoefficientField from_raster(const PartitionedMesh& mesh, int rows, int cols,
                             const std::vector<double>& row_major_top_down) {
  const int n = mesh.M * mesh.m;
  if (rows != n || cols != n)
    throw std::invalid_argument("from_raster: grid must be (M*m) x (M*m)");
  if (static_cast<int>(row_major_top_down.size()) != rows * cols)
    throw std::invalid_argument("from_raster: value count does not match header");
  std::vector<double> values(n * n);
  for (int gy = 0; gy < n; ++gy)
    for (int gx = 0; gx < n; ++gx)
      values[gy * n + gx] = row_major_top_down[(n - 1 - gy) * n + gx];
  return CoefficientField(n, std::move(values), "raster");
}

CoefficientField read_raster(const std::string& path, const PartitionedMesh& mesh) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_raster: cannot open " + path);
  int rows = 0, cols = 0;
  if (!(in >> rows >> cols)) throw std::runtime_error("read_raster: bad header in " + path);
  if (rows < 1 || cols < 1) throw std::runtime_error("read_raster: bad dimensions in " + path);
  std::vector<double> data(static_cast<size_t>(rows) * cols);
  for (double& v : data)
    if (!(in >> v)) throw std::runtime_error("read_raster: truncated data in " + path);
  return from_raster(mesh, rows, cols, data);
}

void write_raster(const CoefficientField& field, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_raster: cannot open " + path);
  const int n = field.cells_per_side();
  out << n << " " << n << "\n";
  char buf[32];
  for (int gy = n - 1; gy >= 0; --gy) {
    for (int gx = 0; gx < n; ++gx) {
      std::snprintf(buf, sizeof buf, "%.17g", field.cell(gx, gy));
      out << buf << (gx + 1 < n ? " " : "\n");
    }
  }
  if (!out) throw std::runtime_error("write_raster: write failed for " + path);
}

namespace {

// Small deterministic generator (splitmix64); independent of the standard
// library's distribution implementations so generated fields are stable.
struct Rng {
  std::uint64_t state;
  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  int below(int n) { return n <= 1 ? 0 : static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
};

}  // namespace

CoefficientField synth_channels_inclusions(const PartitionedMesh& mesh, double eta,
                                           std::uint64_t seed, const SynthOptions& opts) {
  if (!(eta >= 1.0)) throw std::invalid_argument("synth_channels_inclusions: eta must be >= 1");
  const int M = mesh.M, m = mesh.m, n = M * m;
  std::vector<double> values(static_cast<size_t>(n) * n, 1.0);
  std::vector<char> block_has_channel(static_cast<size_t>(M) * M, 0);
  Rng rng{seed};

  auto paint = [&](int gx, int gy) {
    values[gy * n + gx] = eta;
    block_has_channel[(gy / m) * M + (gx / m)] = 1;
  };
  auto row_offset = [&]() {
    if (opts.channels_touch_boundaries || m < 3) return rng.below(m);
    return 1 + rng.below(m - 2);
  };

  // Horizontal channels on every other block row, each spanning at least two
  // blocks when the partition allows it.
  for (int r = 0; r < M; r += 2) {
    const int k = row_offset();
    int c0 = 0, c1 = 0;
    if (M >= 2) {
      c0 = rng.below(M - 1);
      c1 = c0 + 1 + rng.below(M - 1 - c0);
    }
    const int gy = r * m + k;
    for (int gx = c0 * m; gx < (c1 + 1) * m; ++gx) paint(gx, gy);
  }

  // One vertical channel. In blocks that already carry a horizontal channel
  // the two always intersect, so per-block connectivity is preserved.
  if (M >= 2) {
    const int q = rng.below(M);
    const int j = row_offset();
    const int r0 = rng.below(M - 1);
    const int r1 = r0 + 1 + rng.below(M - 1 - r0);
    const int gx = q * m + j;
    for (int gy = r0 * m; gy < (r1 + 1) * m; ++gy) paint(gx, gy);
  }

  // One strictly interior square inclusion per channel-free block.
  const int a = std::max(1, m / 4);
  if (m >= a + 2) {
    for (int by = 0; by < M; ++by) {
      for (int bx = 0; bx < M; ++bx) {
        if (block_has_channel[by * M + bx]) continue;
        const int px = 1 + rng.below(m - 1 - a);
        const int py = 1 + rng.below(m - 1 - a);
        for (int cy = py; cy < py + a; ++cy)
          for (int cx = px; cx < px + a; ++cx)
            values[(by * m + cy) * n + (bx * m + cx)] = eta;
      }
    }
  }

  std::ostringstream tag;
  tag << "synthetic(eta=" << eta << ",seed=" << seed
      << (opts.channels_touch_boundaries ? ",touching" : "") << ")";
  return CoefficientField(n, std::move(values), tag.str());
}

std::vector<int> high_region_components(const PartitionedMesh& mesh, const CoefficientField& field,
                                        double threshold) {
  const int M = mesh.M, m = mesh.m;
  std::vector<int> counts(mesh.block_count(), 0);
  std::vector<char> seen(static_cast<size_t>(m) * m);
  for (int b = 0; b < mesh.block_count(); ++b) {
    const int bx = mesh.blocks[b].bx, by = mesh.blocks[b].by;
    std::fill(seen.begin(), seen.end(), 0);
    auto high = [&](int cx, int cy) {
      return field.cell(bx * m + cx, by * m + cy) >= threshold;
    };
    int components = 0;
    for (int cy = 0; cy < m; ++cy) {
      for (int cx = 0; cx < m; ++cx) {
        if (seen[cy * m + cx] || !high(cx, cy)) continue;
        ++components;
        std::queue<std::pair<int, int>> q;
        q.push({cx, cy});
        seen[cy * m + cx] = 1;
        while (!q.empty()) {
          auto [x, y] = q.front();
          q.pop();
          const int dx[4] = {1, -1, 0, 0};
          const int dy[4] = {0, 0, 1, -1};
          for (int d = 0; d < 4; ++d) {
            const int nx = x + dx[d], ny = y + dy[d];
            if (nx < 0 || nx >= m || ny < 0 || ny >= m) continue;
            if (seen[ny * m + nx] || !high(nx, ny)) continue;
            seen[ny * m + nx] = 1;
            q.push({nx, ny});
          }
        }
      }
    }
    counts[b] = components;
  }
  return counts;
}

}  // namespace msdg

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msdg/mesh.hpp"

namespace msdg {

// Piecewise-constant permeability with one value per square fine cell; the
// two triangles of a cell share the value. Values are strictly positive.
class CoefficientField {
 public:
  CoefficientField(int cells_per_side, std::vector<double> values, std::string provenance);

  int cells_per_side() const { return n_; }
  // Cell (cx, cy) with cy counted upward from the bottom row.
  double cell(int cx, int cy) const { return values_[cy * n_ + cx]; }
  double value(const PartitionedMesh& mesh, int block, int tri) const;

  double min_value() const { return min_; }
  double max_value() const { return max_; }
  double contrast() const { return max_ / min_; }
  const std::string& provenance() const { return provenance_; }
  const std::vector<double>& values() const { return values_; }

 private:
  int n_;
  std::vector<double> values_;  // row-major, bottom row first
  std::string provenance_;
  double min_ = 0.0;
  double max_ = 0.0;
};

// Builds a field from a raster grid given with the first row on top (image
// order). rows and cols must both equal M*m.
CoefficientField from_raster(const PartitionedMesh& mesh, int rows, int cols,
                             const std::vector<double>& row_major_top_down);

// Text raster format: first line "rows cols", then one line per row of
// whitespace-separated positive decimals, top row first. Values round-trip
// exactly through write_raster/read_raster.
CoefficientField read_raster(const std::string& path, const PartitionedMesh& mesh);
void write_raster(const CoefficientField& field, const std::string& path);

struct SynthOptions {
  // When false (default), channel rows avoid the first and last cell row of a
  // block so channels stay clear of the horizontal block boundaries.
  bool channels_touch_boundaries = false;
};

// Deterministic synthetic permeability: background 1, features eta. Thin
// horizontal channels (one fine cell thick, spanning two or more coarse
// blocks) on every other block row, one vertical channel, and one strictly
// interior square inclusion in each block no channel passes through. The
// placement keeps the high-permeability cells of every block connected, so
// each block contributes exactly one asymptotically small eigenmode to the
// weighted spectral problems. eta = 1 yields the uniform field.
CoefficientField synth_channels_inclusions(const PartitionedMesh& mesh, double eta,
                                           std::uint64_t seed, const SynthOptions& opts = {});

// Number of connected components (4-neighbor, within the block) of the cells
// with value >= threshold, per block. Used to validate generated geometries.
std::vector<int> high_region_components(const PartitionedMesh& mesh, const CoefficientField& field,
                                        double threshold);

}  // namespace msdg

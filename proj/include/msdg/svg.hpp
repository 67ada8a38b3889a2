#pragma once

#include <string>
#include <vector>

namespace msdg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  std::vector<Series> series;
};

// Renders side-by-side panels of polyline plots. Output is deterministic for
// identical input.
std::string render_svg(const std::vector<Panel>& panels, int panel_width = 460,
                       int panel_height = 360);

void write_svg(const std::string& path, const std::vector<Panel>& panels, int panel_width = 460,
               int panel_height = 360);

}  // namespace msdg

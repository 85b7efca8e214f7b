#ifndef ENTFEAT_TOOLS_SVG_HPP
#define ENTFEAT_TOOLS_SVG_HPP

#include <string>
#include <vector>

#include "table.hpp"

namespace entfeat::tools {

struct PlotSpec {
  std::string title;
  std::string x;
  std::vector<std::string> ys;
  std::string group;  // optional column that splits rows into separate series
  bool scatter = false;
  bool log_x = false;
  bool log_y = false;
};

/// Line or scatter plot of table columns with fixed margins and linear or log axes.
std::string render_svg(const Table& t, const PlotSpec& spec);

}  // namespace entfeat::tools

#endif  // ENTFEAT_TOOLS_SVG_HPP

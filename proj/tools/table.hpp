#ifndef ENTFEAT_TOOLS_TABLE_HPP
#define ENTFEAT_TOOLS_TABLE_HPP

#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace entfeat::tools {

/// %.16e, with inf/nan spelled out.
inline std::string real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

inline std::string integer(long long x) { return std::to_string(x); }

/// A header row plus string cells; numeric columns are parsed back for plotting.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  explicit Table(std::vector<std::string> h) : header(std::move(h)) {}

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }

  void write_csv(std::ostream& os) const {
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
      os << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
  }
};

using Metadata = std::map<std::string, std::string>;

}  // namespace entfeat::tools

#endif  // ENTFEAT_TOOLS_TABLE_HPP

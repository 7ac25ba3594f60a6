#include <cstdio>
#include <ostream>

#include "folsing/flow.hpp"

namespace folsing {

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  out << "t";
  for (const auto& name : chart_variable_names(trajectory.leaf_dim, trajectory.transverse_dim)) {
    out << ',' << csv_field(name);
  }
  out << ",f\r\n";
  for (const auto& s : trajectory.samples) {
    out << format_double(s.t);
    for (double x : s.point) out << ',' << format_double(x);
    out << ',' << format_double(s.value) << "\r\n";
  }
}

}  // namespace folsing

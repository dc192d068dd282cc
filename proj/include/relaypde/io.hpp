#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "relaypde/grid.hpp"
#include "relaypde/solve_result.hpp"
#include "relaypde/spatial.hpp"

namespace relaypde {

inline std::string fmt_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

inline void write_grid_function_csv(const std::filesystem::path& path, const GridFunction& f) {
  auto out = open_output(path);
  out << "x,value\n";
  for (std::size_t i = 0; i < f.size(); ++i) out << fmt_num(f.grid.node(i)) << ',' << fmt_num(f[i]) << '\n';
}

inline GridFunction read_grid_function_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("malformed row in " + path.string());
    values.push_back(std::stod(line.substr(comma + 1)));
  }
  const Grid grid(values.size());
  return GridFunction(grid, std::move(values));
}

/// "leftmost;b1,b2,..." with full precision.
inline std::string serialize_configuration(const SpatialConfiguration& xi) {
  std::string s = std::to_string(to_int(xi.leftmost())) + ";";
  const auto d = xi.discontinuities();
  for (std::size_t k = 0; k < d.size(); ++k) s += (k ? "," : "") + fmt_num(d[k]);
  return s;
}

inline SpatialConfiguration parse_configuration(const Grid& grid, const std::string& text) {
  const auto semi = text.find(';');
  if (semi == std::string::npos) throw std::invalid_argument("configuration text needs 'leftmost;positions'");
  const Config leftmost = config_from_int(std::stoi(text.substr(0, semi)));
  std::vector<double> positions;
  std::stringstream ss(text.substr(semi + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) positions.push_back(std::stod(item));
  }
  return SpatialConfiguration::from_interfaces(grid, leftmost, positions);
}

namespace detail {

template <typename Row>
void write_matrix(const std::filesystem::path& path, const Grid& grid, const std::vector<double>& times,
                  const std::vector<Row>& rows, std::size_t every) {
  auto out = open_output(path);
  out << "t";
  for (std::size_t i = 0; i < grid.size(); ++i) out << ',' << fmt_num(grid.node(i));
  out << '\n';
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (k % every != 0 && k + 1 != rows.size()) continue;
    out << fmt_num(times[k]);
    for (const auto& x : rows[k]) {
      if constexpr (std::is_same_v<std::decay_t<decltype(x)>, Config>) {
        out << ',' << to_int(x);
      } else {
        out << ',' << fmt_num(x);
      }
    }
    out << '\n';
  }
}

}  // namespace detail

inline void write_solve_result(const std::filesystem::path& dir, const SolveResult& r, std::size_t every = 1) {
  if (every == 0) every = 1;
  detail::write_matrix(dir / "u.csv", r.grid, r.times, r.u.levels, every);
  detail::write_matrix(dir / "v.csv", r.grid, r.times, r.v.levels, every);
  detail::write_matrix(dir / "xi.csv", r.grid, r.times, r.xi, every);

  auto b = open_output(dir / "boundary.csv");
  b << "t,a,b\n";
  for (std::size_t k = 0; k < r.boundary.times.size(); ++k) {
    if (k % every != 0 && k + 1 != r.boundary.times.size()) continue;
    b << fmt_num(r.boundary.times[k]) << ',' << fmt_num(r.boundary.a_values[k]) << ','
      << fmt_num(r.boundary.b_values[k]) << '\n';
  }

  auto d = open_output(dir / "diagnostics.csv");
  d << "t,max_abs_u\n";
  for (std::size_t k = 0; k < r.diagnostics.max_abs_u.size(); ++k) {
    if (k % every != 0 && k + 1 != r.diagnostics.max_abs_u.size()) continue;
    d << fmt_num(r.times[k]) << ',' << fmt_num(r.diagnostics.max_abs_u[k]) << '\n';
  }

  if (!r.diagnostics.windows.empty()) {
    auto w = open_output(dir / "windows.csv");
    w << "start,length,m,iterations,trace_norm\n";
    for (const auto& rec : r.diagnostics.windows) {
      w << fmt_num(rec.start) << ',' << fmt_num(rec.length) << ',' << rec.m << ',' << rec.iterations << ','
        << fmt_num(rec.trace_norm) << '\n';
    }
  }
}

using Summary = std::vector<std::pair<std::string, std::string>>;

inline void write_summary(const std::filesystem::path& path, const Summary& entries) {
  auto out = open_output(path);
  for (const auto& [k, v] : entries) out << k << ": " << v << '\n';
}

inline void append_result_summary(Summary& s, const std::string& prefix, const SolveResult& r) {
  s.emplace_back(prefix + "method", r.diagnostics.method);
  s.emplace_back(prefix + "termination", to_string(r.termination.kind));
  s.emplace_back(prefix + "termination_time", fmt_num(r.termination.time));
  if (r.termination.kind == TerminationKind::transversality_failed) {
    s.emplace_back(prefix + "termination_location", fmt_num(r.termination.location));
    s.emplace_back(prefix + "termination_touch", to_string(r.termination.touch));
  }
  if (!r.termination.detail.empty()) s.emplace_back(prefix + "termination_detail", r.termination.detail);
  s.emplace_back(prefix + "final_time", fmt_num(r.times.empty() ? 0.0 : r.times.back()));
  s.emplace_back(prefix + "levels", std::to_string(r.times.size()));
  s.emplace_back(prefix + "max_abs_u", fmt_num(r.max_abs_u()));
  s.emplace_back(prefix + "box_U", fmt_num(r.diagnostics.box_U));
  s.emplace_back(prefix + "within_box", r.diagnostics.within_box ? "true" : "false");
  s.emplace_back(prefix + "windows", std::to_string(r.diagnostics.windows.size()));
  s.emplace_back(prefix + "implicit_steps", std::to_string(r.diagnostics.implicit_steps));
  s.emplace_back(prefix + "relay_mismatch", std::to_string(r.diagnostics.v_mismatch));
  if (!r.boundary.b_values.empty()) s.emplace_back(prefix + "final_b", fmt_num(r.boundary.b_values.back()));
}

}  // namespace relaypde

#pragma once

#include <string>
#include <vector>

#include "relaypde/grid.hpp"
#include "relaypde/spatial.hpp"

namespace relaypde {

enum class TerminationKind { horizon_reached, transversality_failed, topology_changed, regime_violation };

inline const char* to_string(TerminationKind k) {
  switch (k) {
    case TerminationKind::horizon_reached: return "horizon_reached";
    case TerminationKind::transversality_failed: return "transversality_failed";
    case TerminationKind::topology_changed: return "topology_changed";
    case TerminationKind::regime_violation: return "regime_violation";
  }
  return "unknown";
}

struct Termination {
  TerminationKind kind = TerminationKind::horizon_reached;
  double time = 0.0;
  double location = 0.0;  // transversality failures only
  TouchKind touch = TouchKind::alpha_touch;
  std::string detail;

  std::string describe() const {
    std::string s = to_string(kind);
    if (kind == TerminationKind::transversality_failed) {
      s += std::string("(") + to_string(touch) + " at x=" + std::to_string(location) + ")";
    }
    if (kind != TerminationKind::horizon_reached) s += " t=" + std::to_string(time);
    return s;
  }
};

struct WindowRecord {
  double start = 0.0;
  double length = 0.0;
  int m = 0;
  int iterations = 0;
  double trace_norm = 0.0;
};

struct Diagnostics {
  std::string method;
  std::vector<double> max_abs_u;  // per time level
  std::vector<WindowRecord> windows;
  std::size_t v_mismatch = 0;    // relay field vs. boundary-selected branches
  std::size_t implicit_steps = 0;  // steps taken with the theta = 1 fallback
  double box_U = 0.0;
  bool within_box = true;
  double terminal_single_branch_from = -1.0;  // start of single-branch mode, -1 if never entered
};

struct SolveResult {
  Grid grid;
  std::vector<double> times;
  SpaceTimeField u;
  SpaceTimeField v;
  ConfigField xi;
  FreeBoundaryTrace boundary;
  Termination termination;
  Diagnostics diagnostics;

  explicit SolveResult(Grid g) : grid(g), u(g), v(g) {}

  double max_abs_u() const {
    double m = 0.0;
    for (const auto& row : u.levels) {
      for (double x : row) m = std::max(m, std::abs(x));
    }
    return m;
  }
};

}  // namespace relaypde

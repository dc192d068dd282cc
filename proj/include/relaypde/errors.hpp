#pragma once

#include <stdexcept>
#include <string>

namespace relaypde {

/// More than one threshold root where at most one is expected.
struct MultipleRoots : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The data left the single-interface regime the solvers are built for.
struct RegimeViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InnerIterationDivergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FixedPointNonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoBoxFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Scenario validation failure; `field` names the offending config entry.
struct ConfigError : std::runtime_error {
  std::string field;
  ConfigError(std::string f, const std::string& message)
      : std::runtime_error(f + ": " + message), field(std::move(f)) {}
};

}  // namespace relaypde

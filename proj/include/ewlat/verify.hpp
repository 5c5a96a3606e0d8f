#pragma once

#include <string>
#include <vector>

#include "ewlat/io.hpp"

namespace ewlat {

struct CheckResult {
  std::string module;
  std::string name;
  double value = 0.0;
  double tol = 0.0;
  bool passed = false;
  /// True when passing means value >= tol (orders, slopes) rather than value <= tol.
  bool lower_bound = false;
};

/// Deliberate faults for exercising the suite's failure path.
struct Faults {
  bool flip_gzh_sign = false;  // use G_{m_h} - G_{m_z} in the positivity check
};

/// Runs the invariant suite of every module on the configured parameters and shape.
/// Branch checks use the first positive omega of the config (0.01 if none).
std::vector<CheckResult> run_verify(const RunConfig& c, const Faults& faults = {});

bool all_passed(const std::vector<CheckResult>& r);

}  // namespace ewlat

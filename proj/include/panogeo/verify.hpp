#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace panogeo {

// One invariant check. `observed` is the measured quantity; for error-bound
// checks pass means observed <= tol, for floor checks (e.g. minimum PSNR)
// pass means observed >= tol. The check itself decides; `pass` is
// authoritative and the name records the direction.
struct CheckResult {
  std::string name;
  double observed = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool all_pass() const;
};

SuiteReport verify_geometry(std::uint64_t seed);
SuiteReport verify_warp(std::uint64_t seed);
SuiteReport verify_pano(std::uint64_t seed);
SuiteReport verify_caa(std::uint64_t seed);

const std::vector<std::string>& suite_names();

// Dispatch by name; throws std::invalid_argument for an unknown suite.
SuiteReport run_suite(const std::string& name, std::uint64_t seed);

// Fixed-format text report (stable across runs for identical inputs).
std::string format_report(const SuiteReport& report);

}  // namespace panogeo

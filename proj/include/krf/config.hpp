#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "krf/flow.hpp"
#include "krf/presets.hpp"

namespace krf {

// Parsed from `section.key = value` lines; '#' starts a comment.
struct RunConfig {
  int n = 2;
  std::string preset = "cigar";
  PresetParams params;

  double r_min = 1e-6;
  double r_max = 1e6;
  std::size_t count = 512;

  double t_end = 1.0;
  double dt_safety = 0.2;
  std::vector<double> output_times;
  Stepper stepper = Stepper::Implicit;
  bool parallel = true;

  double epsilon = 0.1;
  int candidates = 20;
  double slack = 0.1;
  int oracle_points = 10;

  std::uint64_t seed = 0;
  std::string output_dir = "krf_out";
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
// Canonical key = value text; parse_config(to_text(c)) == c.
std::string to_text(const RunConfig& c);
const std::vector<std::string>& config_keys();

GridPtr grid_of(const RunConfig& c);
XiSource source_of(const RunConfig& c);
FlowConfig flow_config_of(const RunConfig& c);

}  // namespace krf

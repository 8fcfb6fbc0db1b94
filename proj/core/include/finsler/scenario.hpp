#pragma once

// Scenario configuration: a flat, sectioned, human-editable text format with
// explicit units (grid periods in radians, times in flow seconds). Parsing,
// validation with field-precise diagnostics, canonical emission and the
// bundled presets live here.

#include <map>
#include <string>
#include <vector>

#include "finsler/estimates.hpp"
#include "finsler/measure.hpp"
#include "finsler/metric.hpp"

namespace finsler {

struct ScenarioConfig {
  std::string name = "scenario";

  // [grid]
  std::array<int, 2> resolution{64, 64};
  std::array<double, 2> period{6.283185307179586476925286766559,
                               6.283185307179586476925286766559};

  // [metric]
  std::string metric_kind = "euclidean";
  MetricParams metric_params{};
  double time_window = 0.5;  // T

  // [measure]
  std::string phi_kind = "zero";  // zero | cosine-x1 | cosine-bump
  double phi_amplitude = 0.0;

  // [initial]
  std::string u0_kind = "two-plus-cos-x1";  // constant | two-plus-cos-x1 | trig-mix
  double u0_base = 2.0;
  double u0_amp = 1.0;
  double u0_amp2 = 0.3;

  // [estimate]
  double alpha = 2.0;
  double epsilon = 0.05;
  double N = 4.0;
  std::vector<double> check_stamps{0.05, 0.1, 0.2, 0.35, 0.5};
  int directions = 16;
  int grid_stride = 4;

  // [harnack]
  int harnack_pairs = 20;
  int curve_samples = 65;
  double harnack_min_dt = 0.05;
  double harnack_max_dt = 0.3;

  // [identities]
  std::vector<std::string> identity_checks{
      "bochner", "energy-evolution", "exchange", "defect-quadrature",
      "log-heat", "evolution", "hessian-trace"};
  int probes = 100;
  int refinements = 3;
  double identity_t_step = 1e-4;
  double identity_time = 0.25;  // slice for the scripted checks
  double evolution_time = 0.06; // center of the trajectory-based checks

  // [output]
  std::string output_directory = "out";
  bool dump_trajectory = true;

  // [run]
  std::uint64_t seed = 42;
  int threads = 1;

  MetricFamily build_metric() const;
  MeasureSpec build_measure() const;
  GridSpec build_grid_spec() const;
  ScalarField build_initial_data() const;
  EstimateConfig estimate_config() const;

  bool identity_enabled(const std::string& tag) const;
};

// Parse the sectioned text; unknown keys and malformed values are
// configuration errors naming the section and field.
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario_file(const std::string& path);

// Canonical emission; parse(emit(parse(c))) == parse(c).
std::string emit_scenario(const ScenarioConfig& cfg);

// Field-level validation (throws Error::Kind::Config naming the field).
void validate_scenario(const ScenarioConfig& cfg);

// Bundled presets: flat-static, randers-static, randers-shrink,
// conformal-static.
std::vector<std::string> preset_names();
std::string preset_text(const std::string& name);
// Load a preset by name or fall through to a file path.
ScenarioConfig resolve_scenario(const std::string& name_or_path);

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);

}  // namespace finsler

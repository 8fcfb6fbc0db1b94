#pragma once

// Scenario orchestration: constant estimation -> identity checks -> heat flow
// -> gradient-estimate sweep -> Harnack pairs -> report emission. Deterministic
// given (config, seed); wall-clock timings are written to a separate file so
// the report proper is byte-reproducible.

#include <optional>

#include "finsler/scenario.hpp"

namespace finsler {

struct RunSelection {
  bool estimates = true;
  bool identities = true;
  bool heat_flow = true;
  bool gradient_estimate = true;
  bool harnack = true;

  static RunSelection all() { return {}; }
  static RunSelection only_identities() {
    return {false, true, false, false, false};
  }
  static RunSelection only_estimates() {
    return {true, false, false, false, false};
  }
  static RunSelection only_heat_flow() {
    return {false, false, true, false, false};
  }
  static RunSelection only_gradient_estimate() {
    return {true, false, false, true, false};
  }
  static RunSelection only_harnack() {
    return {true, false, false, false, true};
  }
};

// Tolerances every check is held to; pinned from the acceptance targets.
struct CheckTolerances {
  double bochner = 1e-3;
  double energy_evolution = 5e-4;
  double exchange = 5e-4;
  double defect_quadrature = 5e-4;
  double log_heat = 5e-3;
  double evolution = 5e-3;
  double hessian_trace_slack = -1e-8;  // minimum slack allowed
  double mass_drift = 1e-8;            // relative
  double minmax_slack = 1e-9;          // static min/max principle
};

struct FlowDiagnostics {
  double mass_initial = 0.0;
  double mass_drift_rel = 0.0;
  bool minmax_checked = false;
  double min_drop = 0.0;  // worst decrease of min u between stamps
  double max_rise = 0.0;  // worst increase of max u between stamps
  double dt_internal = 0.0;
  bool pass = false;
};

struct CheckOutcome {
  std::string name;
  bool pass = false;
  double value = 0.0;      // residual / margin / drift
  double threshold = 0.0;
};

struct RunReport {
  ScenarioConfig config;
  RunSelection selection;

  std::optional<HypothesisConstants> constants;
  double q = 0.0;
  double q_sharp_variant = 0.0;
  double q_min_epsilon = 0.0;
  double q_min_value = 0.0;

  std::vector<ResidualReport> identities;
  std::optional<FlowDiagnostics> flow;
  std::optional<MarginReport> gradient_estimate;
  std::optional<MarginReport> gradient_estimate_eps_min;  // at the grid minimizer
  std::optional<MarginReport> harnack_report;
  std::optional<StaticReductionRecord> static_reduction;

  std::vector<CheckOutcome> rollup;
  bool pass = false;
  bool partial = false;
  std::string failure;

  std::vector<std::pair<std::string, double>> timings_seconds;
};

RunReport run_scenario(const ScenarioConfig& cfg,
                       const RunSelection& selection = RunSelection::all(),
                       const CheckTolerances& tol = {});

// Writes report.txt, identities.txt, constants.csv, margins_gradient_estimate.csv,
// margins_harnack.csv, timings.csv and index.txt into the config's output
// directory; returns the list of files written.
std::vector<std::string> emit_report(const RunReport& report);

}  // namespace finsler

#include "finsler/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "finsler/parallel.hpp"
#include "finsler/textio.hpp"

namespace finsler {

namespace {

class Stopwatch {
 public:
  explicit Stopwatch(RunReport& report, std::string label)
      : report_(report), label_(std::move(label)),
        start_(std::chrono::steady_clock::now()) {}
  ~Stopwatch() {
    auto dt = std::chrono::steady_clock::now() - start_;
    report_.timings_seconds.emplace_back(
        label_, std::chrono::duration<double>(dt).count());
  }

 private:
  RunReport& report_;
  std::string label_;
  std::chrono::steady_clock::time_point start_;
};

// Scripted fields used by the bundled identity checks.
ScriptedField script_decaying_mix() {
  return {"decaying-mix",
          [](Vec2 x, double t) {
            return std::exp(-t) * (std::sin(x[0]) + 0.3 * std::sin(x[1]));
          },
          [](Vec2 x, double t) {
            return -std::exp(-t) * (std::sin(x[0]) + 0.3 * std::sin(x[1]));
          }};
}

std::vector<GridSpec> grid_levels(const ScenarioConfig& cfg) {
  std::vector<GridSpec> out;
  for (int k = 0; k < cfg.refinements; ++k) {
    int shift = cfg.refinements - 2 - k;  // levels res/2, res, 2 res, ...
    std::array<int, 2> res;
    for (int a = 0; a < 2; ++a) {
      int r = cfg.resolution[a];
      res[a] = shift >= 0 ? std::max(16, r >> shift) : r << (-shift);
    }
    out.push_back(build_grid(res, cfg.period));
  }
  if (cfg.refinements == 1)
    out = {build_grid(cfg.resolution, cfg.period)};
  return out;
}

std::vector<double> step_levels(const ScenarioConfig& cfg) {
  std::vector<double> out;
  double s = 4e-2;
  for (int k = 0; k < std::max(cfg.refinements, 3); ++k) {
    out.push_back(s);
    s *= 0.5;
  }
  return out;
}

// Stamp plan: the evolution-check cluster merged with the estimate stamps.
struct StampPlan {
  std::vector<double> stamps;
  std::vector<size_t> check_index;  // indices of cfg.check_stamps
  size_t evolution_center = 0;
};

StampPlan plan_stamps(const ScenarioConfig& cfg, bool with_cluster) {
  const double delta = 0.01;
  std::vector<double> raw = cfg.check_stamps;
  if (with_cluster) {
    for (int k = -2; k <= 2; ++k)
      raw.push_back(cfg.evolution_time + k * delta);
  }
  std::sort(raw.begin(), raw.end());
  StampPlan plan;
  for (double t : raw) {
    if (t <= 0.0) continue;
    if (!plan.stamps.empty() && std::abs(t - plan.stamps.back()) < 1e-12)
      continue;
    plan.stamps.push_back(t);
  }
  auto locate = [&](double t) {
    for (size_t s = 0; s < plan.stamps.size(); ++s)
      if (std::abs(plan.stamps[s] - t) < 1e-12) return s;
    fail(Error::Kind::Config, "stamp planning lost a requested time");
  };
  for (double t : cfg.check_stamps) plan.check_index.push_back(locate(t));
  if (with_cluster) plan.evolution_center = locate(cfg.evolution_time);
  return plan;
}

FlowDiagnostics flow_diagnostics(const FlowTrajectory& traj,
                                 const ScenarioConfig& cfg,
                                 const CheckTolerances& tol) {
  FlowDiagnostics d;
  d.dt_internal = traj.dt_internal;
  d.mass_initial = traj.at(0).mass;
  for (const FlowStamp& s : traj.stamps)
    d.mass_drift_rel =
        std::max(d.mass_drift_rel,
                 std::abs(s.mass - d.mass_initial) /
                     std::max(std::abs(d.mass_initial), 1e-300));
  if (cfg.build_metric().is_static()) {
    d.minmax_checked = true;
    for (size_t s = 1; s < traj.size(); ++s) {
      d.min_drop = std::max(
          d.min_drop, traj.at(s - 1).min_u - traj.at(s).min_u);
      d.max_rise = std::max(
          d.max_rise, traj.at(s).max_u - traj.at(s - 1).max_u);
    }
  }
  d.pass = d.mass_drift_rel <= tol.mass_drift &&
           (!d.minmax_checked ||
            (d.min_drop <= tol.minmax_slack && d.max_rise <= tol.minmax_slack));
  return d;
}

void ensure_writable(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(Error::Kind::Io, "cannot create output directory " + dir);
  std::string probe = dir + "/.write_probe";
  {
    std::ofstream f(probe);
    if (!f) fail(Error::Kind::Io, "output directory not writable: " + dir);
  }
  std::filesystem::remove(probe, ec);
}

}  // namespace

RunReport run_scenario(const ScenarioConfig& cfg, const RunSelection& sel,
                       const CheckTolerances& tol) {
  RunReport report;
  report.config = cfg;
  report.selection = sel;
  ensure_writable(cfg.output_directory);
  set_thread_count(cfg.threads);

  MetricFamily metric = cfg.build_metric();
  MeasureSpec measure = cfg.build_measure();
  GridSpec grid = cfg.build_grid_spec();
  EstimateConfig est = cfg.estimate_config();
  DiffConfig dc;

  auto record = [&](const std::string& name, bool pass, double value,
                    double threshold) {
    report.rollup.push_back({name, pass, value, threshold});
  };

  try {
    if (sel.estimates) {
      Stopwatch sw(report, "estimate_constants");
      EstimateSampling sampling{cfg.directions, cfg.grid_stride};
      report.constants = estimate_constants(metric, measure, grid,
                                            cfg.check_stamps, cfg.N, sampling,
                                            dc);
      report.q = compute_q(*report.constants, cfg.alpha, cfg.epsilon, cfg.N);
      report.q_sharp_variant = compute_q_sharp_variant(
          *report.constants, cfg.alpha, cfg.epsilon, cfg.N);
      auto [eps_min, q_min] =
          q_min_over_epsilon(*report.constants, cfg.alpha, cfg.N, cfg.epsilon);
      report.q_min_epsilon = eps_min;
      report.q_min_value = q_min;
    }

    if (sel.identities) {
      std::vector<GridSpec> levels = grid_levels(cfg);
      std::vector<double> steps = step_levels(cfg);

      if (cfg.identity_enabled("bochner")) {
        Stopwatch sw(report, "check_bochner");
        ResidualReport r = check_bochner_refined(
            metric, measure, script_cos_mix(), cfg.identity_time, levels, dc);
        record("identity bochner", r.relative_sup() <= tol.bochner,
               r.relative_sup(), tol.bochner);
        report.identities.push_back(std::move(r));
      }
      if (cfg.identity_enabled("energy-evolution")) {
        Stopwatch sw(report, "check_energy_evolution");
        ResidualReport r = check_energy_evolution_refined(
            metric, measure, script_decaying_mix(), cfg.identity_time, grid,
            cfg.probes, cfg.seed, steps, cfg.identity_t_step, dc);
        record("identity energy-evolution", r.relative_sup() <= tol.energy_evolution,
               r.relative_sup(), tol.energy_evolution);
        report.identities.push_back(std::move(r));
      }
      if (cfg.identity_enabled("exchange")) {
        Stopwatch sw(report, "check_exchange");
        ExchangeReports r = check_exchange_refined(
            metric, measure, script_decaying_mix(), cfg.identity_time, grid,
            cfg.probes, cfg.seed + 1, steps, cfg.identity_t_step, dc);
        record("identity gradient-commutator", r.gradient.relative_sup() <= tol.exchange,
               r.gradient.relative_sup(), tol.exchange);
        record("identity laplacian-commutator",
               r.laplacian.relative_sup() <= tol.exchange,
               r.laplacian.relative_sup(), tol.exchange);
        report.identities.push_back(std::move(r.gradient));
        report.identities.push_back(std::move(r.laplacian));
      }
      if (cfg.identity_enabled("defect-quadrature")) {
        Stopwatch sw(report, "check_defect_quadrature");
        ResidualReport r = check_defect_quadrature(
            metric, measure, script_sine_mix(), script_test_function(),
            cfg.identity_time, grid, dc);
        record("identity defect-quadrature", r.relative_sup() <= tol.defect_quadrature,
               r.relative_sup(), tol.defect_quadrature);
        report.identities.push_back(std::move(r));
      }
    }

    // The heavy phase: trajectories. The evolution-style identity checks ride
    // on the same integrator output.
    bool need_traj = sel.heat_flow || sel.gradient_estimate || sel.harnack ||
                     (sel.identities && (cfg.identity_enabled("log-heat") ||
                                         cfg.identity_enabled("evolution") ||
                                         cfg.identity_enabled("hessian-trace")));
    std::optional<FlowTrajectory> traj;
    StampPlan plan;
    if (need_traj) {
      Stopwatch sw(report, "run_heat_flow");
      bool cluster = sel.identities && (cfg.identity_enabled("log-heat") ||
                                        cfg.identity_enabled("evolution"));
      plan = plan_stamps(cfg, cluster);
      HeatFlowConfig hc;
      traj = run_heat_flow(metric, measure, cfg.build_initial_data(),
                           plan.stamps, hc);
      report.flow = flow_diagnostics(*traj, cfg, tol);
      record("flow mass-conservation",
             report.flow->mass_drift_rel <= tol.mass_drift,
             report.flow->mass_drift_rel, tol.mass_drift);
      if (report.flow->minmax_checked)
        record("flow min-max-principle",
               report.flow->min_drop <= tol.minmax_slack &&
                   report.flow->max_rise <= tol.minmax_slack,
               std::max(report.flow->min_drop, report.flow->max_rise),
               tol.minmax_slack);
      if (cfg.dump_trajectory) dump_trajectory(*traj, cfg.output_directory);
    }

    if (sel.identities && traj) {
      // Refinement trajectories (cluster stamps only) for the order columns.
      std::vector<GridSpec> levels = grid_levels(cfg);
      std::vector<FlowTrajectory> level_trajs;
      std::vector<size_t> level_centers;
      bool cluster_checks = cfg.identity_enabled("log-heat") ||
                            cfg.identity_enabled("evolution");
      if (cluster_checks) {
        Stopwatch sw(report, "refinement_trajectories");
        for (const GridSpec& g : levels) {
          if (g.resolution == grid.resolution) continue;
          ScenarioConfig sub = cfg;
          sub.resolution = g.resolution;
          StampPlan p2;
          const double delta = 0.01;
          for (int k = -2; k <= 2; ++k)
            p2.stamps.push_back(cfg.evolution_time + k * delta);
          p2.evolution_center = 2;
          level_trajs.push_back(run_heat_flow(metric, measure,
                                              sub.build_initial_data(),
                                              p2.stamps, HeatFlowConfig{}));
          level_centers.push_back(p2.evolution_center);
        }
      }

      // Evaluate each trajectory-based check once per refinement level; the
      // main-resolution result is the headline, coarser/finer levels feed
      // the order fit.
      auto merge_level = [&](ResidualReport& combined, ResidualReport&& one,
                             bool is_main) {
        combined.levels.push_back(one.headline);
        if (is_main || combined.tag.empty()) {
          std::vector<ResidualLevel> kept = std::move(combined.levels);
          combined = std::move(one);
          combined.levels = std::move(kept);
        }
      };

      ResidualReport log_heat_report, sigma_report, sf_report;
      size_t li = 0;
      for (const GridSpec& g : levels) {
        const FlowTrajectory* tr = nullptr;
        size_t center = 0;
        bool is_main = g.resolution == grid.resolution;
        if (is_main) {
          tr = &*traj;
          center = plan.evolution_center;
        } else if (li < level_trajs.size()) {
          tr = &level_trajs[li];
          center = level_centers[li];
          ++li;
        } else {
          continue;
        }
        if (cfg.identity_enabled("log-heat")) {
          Stopwatch sw(report, "check_log_heat");
          merge_level(log_heat_report, check_log_heat(*tr, center), is_main);
        }
        if (cfg.identity_enabled("evolution")) {
          Stopwatch sw(report, "check_evolution");
          EvolutionReports ev = check_evolution_pdes(*tr, cfg.alpha, center, dc);
          merge_level(sigma_report, std::move(ev.sigma), is_main);
          merge_level(sf_report, std::move(ev.script_f), is_main);
        }
      }
      if (cfg.identity_enabled("log-heat")) {
        finalize_order(log_heat_report);
        record("identity log-heat",
               log_heat_report.relative_sup() <= tol.log_heat,
               log_heat_report.relative_sup(), tol.log_heat);
        report.identities.push_back(std::move(log_heat_report));
      }
      if (cfg.identity_enabled("evolution")) {
        finalize_order(sigma_report);
        finalize_order(sf_report);
        record("identity sigma-evolution", sigma_report.relative_sup() <= tol.evolution,
               sigma_report.relative_sup(), tol.evolution);
        record("identity scriptf-evolution", sf_report.relative_sup() <= tol.evolution,
               sf_report.relative_sup(), tol.evolution);
        report.identities.push_back(std::move(sigma_report));
        report.identities.push_back(std::move(sf_report));
      }
      if (cfg.identity_enabled("hessian-trace")) {
        Stopwatch sw(report, "check_hessian_trace");
        double min_slack = std::numeric_limits<double>::infinity();
        ResidualReport worst;
        for (size_t idx : plan.check_index) {
          ResidualReport r =
              check_hessian_trace_inequality(*traj, idx, cfg.N, dc);
          if (r.headline.sup_residual < min_slack) {
            min_slack = r.headline.sup_residual;
            worst = r;
          }
        }
        record("identity hessian-trace",
               min_slack >= tol.hessian_trace_slack, min_slack,
               tol.hessian_trace_slack);
        report.identities.push_back(std::move(worst));
      }
    }

    if (sel.gradient_estimate && traj && report.constants) {
      Stopwatch sw(report, "gradient_estimate_sweep");
      // Restrict the sweep to the configured check stamps.
      FlowTrajectory sweep;
      sweep.metric = traj->metric;
      sweep.measure = traj->measure;
      sweep.grid = traj->grid;
      sweep.dt_internal = traj->dt_internal;
      for (size_t idx : plan.check_index) sweep.stamps.push_back(traj->at(idx));
      report.gradient_estimate =
          gradient_estimate_check(sweep, *report.constants, est);
      record("gradient-estimate margin", report.gradient_estimate->pass,
             report.gradient_estimate->min_margin, -report.gradient_estimate->tolerance);

      EstimateConfig est_min = est;
      est_min.epsilon = report.q_min_epsilon;
      report.gradient_estimate_eps_min =
          gradient_estimate_check(sweep, *report.constants, est_min);
      record("gradient-estimate margin at epsilon minimizer",
             report.gradient_estimate_eps_min->pass, report.gradient_estimate_eps_min->min_margin,
             -report.gradient_estimate_eps_min->tolerance);

      if (metric.is_static()) {
        report.static_reduction =
            static_reduction_compare(sweep, *report.constants, est);
        record("gradient-estimate static-reduction agreement",
               report.static_reduction->max_margin_difference <= 1e-9,
               report.static_reduction->max_margin_difference, 1e-9);
      }
    }

    if (sel.harnack && traj && report.constants) {
      Stopwatch sw(report, "harnack_pairs");
      FlowTrajectory sweep;
      sweep.metric = traj->metric;
      sweep.measure = traj->measure;
      sweep.grid = traj->grid;
      sweep.dt_internal = traj->dt_internal;
      for (size_t idx : plan.check_index) sweep.stamps.push_back(traj->at(idx));
      std::vector<HarnackPair> pairs =
          draw_harnack_pairs(sweep, cfg.harnack_pairs, cfg.seed + 2,
                             cfg.harnack_min_dt, cfg.harnack_max_dt,
                             cfg.curve_samples);
      report.harnack_report = harnack_check(sweep, *report.constants, est, pairs);
      record("harnack margin", report.harnack_report->pass,
             report.harnack_report->min_margin, -report.harnack_report->tolerance);
    }
  } catch (const Error& e) {
    report.partial = true;
    report.failure = e.what();
  }

  report.pass = !report.partial;
  for (const CheckOutcome& c : report.rollup)
    if (!c.pass) report.pass = false;
  return report;
}

namespace {

void write_residual_block(StructuredWriter& w, const ResidualReport& r) {
  w.open_block("identity " + r.tag);
  w.field("samples", r.sample_description);
  w.field("sup_residual", r.headline.sup_residual);
  w.field("scale", r.headline.scale);
  w.field("relative_sup", r.relative_sup());
  w.field("sample_count", static_cast<long long>(r.headline.samples));
  if (r.levels.size() >= 2) {
    std::vector<double> params, residuals;
    for (const ResidualLevel& l : r.levels) {
      params.push_back(l.parameter);
      residuals.push_back(l.relative());
    }
    w.field_list("refinement_parameters", params);
    w.field_list("refinement_relative_residuals", residuals);
  }
  if (r.order) w.field("convergence_order", *r.order);
  w.field("reliable", r.reliable);
  if (!r.note.empty()) w.field("note", r.note);
  for (const auto& [k, v] : r.extras) w.field(k, v);
  w.close_block();
}

void write_constants(StructuredWriter& w, const HypothesisConstants& c) {
  w.open_block("hypothesis_constants");
  w.field("n", c.n);
  w.field("N", c.N);
  w.field("K", c.K);
  w.field("K_prime", c.K_prime);
  w.field("K_prime_unsquared", c.K_prime_unsquared);
  w.field("L1", c.L1);
  w.field("L2", c.L2);
  w.field("L3", c.L3);
  w.field("census_points", c.census_points);
  w.field("census_directions", c.census_directions);
  w.field("census_times", c.census_times);
  w.close_block();
}

void write_margin(StructuredWriter& w, const MarginReport& m) {
  w.open_block(m.tag);
  w.field("alpha", m.alpha);
  w.field("epsilon", m.epsilon);
  w.field("N", m.N);
  w.field("Q", m.q_used);
  w.field("Q_sharp_variant", m.q_sharp_variant);
  w.field("min_margin", m.min_margin);
  w.field("rhs_scale", m.rhs_scale);
  w.field("tolerance", m.tolerance);
  w.field("verdict", std::string(m.pass ? "PASS" : "FAIL"));
  w.close_block();
}

}  // namespace

std::vector<std::string> emit_report(const RunReport& report) {
  const std::string& dir = report.config.output_directory;
  ensure_writable(dir);
  std::vector<std::string> files;

  auto write_file = [&](const std::string& name, const std::string& text) {
    std::string path = dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Error::Kind::Io, "cannot write " + path);
    out << text;
    files.push_back(name);
  };

  // Main structured-text report (fully deterministic).
  {
    StructuredWriter w;
    w.open_block("finsler_flow_report");
    w.open_block("config_echo");
    std::istringstream cfg_lines(emit_scenario(report.config));
    std::string line;
    int n = 0;
    while (std::getline(cfg_lines, line)) {
      if (line.empty() || line[0] == '#') continue;
      w.field("line_" + std::to_string(n++), line);
    }
    w.close_block();

    if (report.constants) {
      write_constants(w, *report.constants);
      w.open_block("q_constant");
      w.field("Q", report.q);
      w.field("Q_sharp_variant", report.q_sharp_variant);
      w.field("epsilon_grid_minimizer", report.q_min_epsilon);
      w.field("Q_at_minimizer", report.q_min_value);
      w.close_block();
    }
    for (const ResidualReport& r : report.identities)
      write_residual_block(w, r);
    if (report.flow) {
      w.open_block("heat_flow");
      w.field("internal_dt", report.flow->dt_internal);
      w.field("mass_initial", report.flow->mass_initial);
      w.field("mass_drift_relative", report.flow->mass_drift_rel);
      if (report.flow->minmax_checked) {
        w.field("min_principle_worst_drop", report.flow->min_drop);
        w.field("max_principle_worst_rise", report.flow->max_rise);
      }
      w.close_block();
    }
    if (report.gradient_estimate) write_margin(w, *report.gradient_estimate);
    if (report.gradient_estimate_eps_min) {
      w.open_block("gradient-estimate-at-epsilon-minimizer");
      w.field("epsilon", report.gradient_estimate_eps_min->epsilon);
      w.field("min_margin", report.gradient_estimate_eps_min->min_margin);
      w.field("verdict",
              std::string(report.gradient_estimate_eps_min->pass ? "PASS" : "FAIL"));
      w.close_block();
    }
    if (report.harnack_report) write_margin(w, *report.harnack_report);
    if (report.static_reduction) {
      w.open_block("static_reduction");
      w.field("max_margin_difference",
              report.static_reduction->max_margin_difference);
      w.close_block();
    }
    if (report.partial) {
      w.open_block("failure");
      w.field("message", report.failure);
      w.close_block();
    }
    w.open_block("rollup");
    for (const CheckOutcome& c : report.rollup) {
      w.open_block(c.name);
      w.field("pass", c.pass);
      w.field("value", c.value);
      w.field("threshold", c.threshold);
      w.close_block();
    }
    w.field("verdict", std::string(report.pass ? "PASS" : "FAIL"));
    w.close_block();
    w.close_block();
    write_file("report.txt", w.text());
  }

  // Identity reports as their own structured-text document.
  if (!report.identities.empty()) {
    StructuredWriter w;
    for (const ResidualReport& r : report.identities)
      write_residual_block(w, r);
    write_file("identities.txt", w.text());
  }

  if (report.constants) {
    std::string csv = "constant,value\n";
    const HypothesisConstants& c = *report.constants;
    csv += "n," + format_double(c.n) + "\n";
    csv += "N," + format_double(c.N) + "\n";
    csv += "K," + format_double(c.K) + "\n";
    csv += "K_prime," + format_double(c.K_prime) + "\n";
    csv += "K_prime_unsquared," + format_double(c.K_prime_unsquared) + "\n";
    csv += "L1," + format_double(c.L1) + "\n";
    csv += "L2," + format_double(c.L2) + "\n";
    csv += "L3," + format_double(c.L3) + "\n";
    csv += "Q," + format_double(report.q) + "\n";
    csv += "Q_sharp_variant," + format_double(report.q_sharp_variant) + "\n";
    write_file("constants.csv", csv);
  }

  if (report.gradient_estimate) {
    std::string csv = "stamp_time,min_margin,argmin_i,argmin_j\n";
    for (const StampMargin& s : report.gradient_estimate->per_stamp)
      csv += format_double(s.time) + ',' + format_double(s.min_margin) + ',' +
             std::to_string(s.argmin_i) + ',' + std::to_string(s.argmin_j) +
             "\n";
    write_file("margins_gradient_estimate.csv", csv);
  }
  if (report.harnack_report) {
    std::string csv = "pair_dt,log_margin\n";
    for (const StampMargin& s : report.harnack_report->per_stamp)
      csv += format_double(s.time) + ',' + format_double(s.min_margin) + "\n";
    write_file("margins_harnack.csv", csv);
  }

  // Wall-clock timings; excluded from the determinism contract.
  {
    std::string csv = "phase,seconds\n";
    for (const auto& [k, v] : report.timings_seconds)
      csv += k + ',' + format_double(v) + "\n";
    write_file("timings.csv", csv);
  }

  // Index of artifacts.
  {
    std::string idx = "artifacts:\n";
    for (const std::string& f : files) idx += "  " + f + "\n";
    if (report.identities.empty())
      idx += "note: identity section disabled; identities.txt omitted\n";
    idx += "note: timings.csv varies run to run and is excluded from the "
           "byte-determinism contract\n";
    std::string path = dir + "/index.txt";
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Error::Kind::Io, "cannot write " + path);
    out << idx;
    files.push_back("index.txt");
  }
  return files;
}

}  // namespace finsler

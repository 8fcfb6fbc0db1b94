// Acceptance suite: one line per criterion, nonzero exit if any fails.
//
// Each criterion pins its tolerance in code; the scenarios are the bundled
// presets (flat-static, randers-static, randers-shrink, conformal-static).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "finsler/runner.hpp"

using namespace finsler;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

int g_failures = 0;

void criterion(int n, const std::string& what, bool pass,
               const std::string& detail) {
  std::printf("%-4s criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", n,
              what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

GridSpec grid_n(int n) { return build_grid({n, n}, {kTwoPi, kTwoPi}); }

// Closed-form Legendre transform for F = |y| + b.y (independent oracle).
Vec2 randers_legendre_oracle(Vec2 b, Vec2 xi) {
  double bb = b[0] * b[0] + b[1] * b[1];
  double lam = 1.0 - bb;
  Mat2 astar;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      astar[i][j] = ((i == j ? lam : 0.0) + b[i] * b[j]) / (lam * lam);
  Vec2 bstar{-b[0] / lam, -b[1] / lam};
  Vec2 axi = mul(astar, xi);
  double alpha_star = std::sqrt(dot(xi, axi));
  double fstar = alpha_star + dot(bstar, xi);
  return {fstar * (axi[0] / alpha_star + bstar[0]),
          fstar * (axi[1] / alpha_star + bstar[1])};
}

struct ScenarioContext {
  std::string name;
  MetricFamily metric;
  MeasureSpec measure;
  GridSpec grid;
  FlowTrajectory trajectory;  // at the five check stamps
  HypothesisConstants constants;
  EstimateConfig config;
};

ScenarioContext make_context(const std::string& preset) {
  ScenarioConfig cfg = resolve_scenario(preset);
  ScenarioContext ctx{preset,
                      cfg.build_metric(),
                      cfg.build_measure(),
                      cfg.build_grid_spec(),
                      {},
                      {},
                      cfg.estimate_config()};
  ctx.trajectory = run_heat_flow(ctx.metric, ctx.measure,
                                 cfg.build_initial_data(), cfg.check_stamps);
  EstimateSampling sampling{cfg.directions, cfg.grid_stride};
  ctx.constants = estimate_constants(ctx.metric, ctx.measure, ctx.grid,
                                     cfg.check_stamps, cfg.N, sampling);
  return ctx;
}

// --------------------------------------------------------------------------

void criterion_1_heat_oracle() {
  auto start = std::chrono::steady_clock::now();
  GridSpec g = grid_n(64);
  MetricFamily eu = MetricFamily::euclidean();
  MeasureSpec mu;
  ScalarField u0 = sample(g, 0.0, [](Vec2 x) { return 2.0 + std::cos(x[0]); });
  FlowTrajectory traj = run_heat_flow(eu, mu, u0, {0.5});
  double seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  double decay = std::exp(-0.5);
  double err = 0.0;
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) {
      double want = 2.0 + decay * std::cos(g.node(i, j)[0]);
      err = std::max(err,
                     std::abs(traj.at(0).u.at(i, j) - want) / std::abs(want));
    }
  criterion(1, "flat-torus heat oracle u(t) = 2 + e^{-t} cos x1",
            err <= 1e-5 && seconds <= 30.0,
            "max rel err " + fmt(err) + " <= 1e-5, runtime " + fmt(seconds) +
                " s <= 30 s");
}

void criterion_2_legendre_duality() {
  Vec2 b{0.3, 0.0};
  MetricFamily m = MetricFamily::randers(b);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> ux(0.0, kTwoPi);
  double worst_duality = 0.0, worst_oracle = 0.0;
  int done = 0;
  while (done < 500) {
    Vec2 xi{u(rng), u(rng)};
    if (std::hypot(xi[0], xi[1]) < 1e-6) continue;
    Vec2 x{ux(rng), ux(rng)};
    Vec2 y = legendre_transform(m, x, 0.0, xi);
    double fy = m.norm(x, y, 0.0);
    double fs = m.dual_norm(x, xi, 0.0);
    worst_duality = std::max(worst_duality, std::abs(fy - fs) / fs);
    Vec2 want = randers_legendre_oracle(b, xi);
    double scale = std::hypot(want[0], want[1]);
    worst_oracle = std::max(
        worst_oracle, std::hypot(y[0] - want[0], y[1] - want[1]) / scale);
    ++done;
  }
  criterion(2, "Legendre duality on the Randers family (b = 0.3)",
            worst_duality <= 1e-9 && worst_oracle <= 1e-10,
            "|F(grad) - F*(df)| rel " + fmt(worst_duality) +
                " <= 1e-9, Newton vs oracle " + fmt(worst_oracle) +
                " <= 1e-10, 500 covectors");
}

void criterion_3_tensor_identities() {
  struct Family {
    std::string name;
    MetricFamily m;
  };
  std::vector<Family> fams;
  fams.push_back({"flat-static", MetricFamily::euclidean()});
  fams.push_back(
      {"randers-static", MetricFamily::randers({0.0, 0.0}, {0.2, 0.0})});
  MetricParams base;
  base.randers_b = {0.2, 0.0};
  fams.push_back({"randers-shrink", MetricFamily::shrinking(base, 0.1)});

  MeasureSpec mu;
  bool pass = true;
  std::string worst_detail = "all within tolerance";
  double worst = 0.0;
  for (const Family& fam : fams) {
    std::mt19937_64 rng(908);
    std::uniform_real_distribution<double> ux(0.0, kTwoPi);
    std::uniform_real_distribution<double> ut(0.0, 0.5);
    TensorEvaluator g_eval = fundamental_evaluator(fam.m);
    for (int s = 0; s < 200; ++s) {
      Vec2 x{ux(rng), ux(rng)};
      double th = ux(rng);
      Vec2 y{std::cos(th), std::sin(th)};
      double t = fam.m.is_static() ? 0.0 : ut(rng);

      auto track = [&](const std::string& what, double value, double tol) {
        if (value > tol) pass = false;
        if (value / tol > worst) {
          worst = value / tol;
          worst_detail = fam.name + " " + what + " " + fmt(value);
        }
      };

      double f1 = fam.m.norm(x, y, t);
      for (double c : {0.5, 2.0, 3.0}) {
        Vec2 cy{c * y[0], c * y[1]};
        track("F 1-homogeneity",
              std::abs(fam.m.norm(x, cy, t) - c * f1) / (c * f1), 1e-8);
        Mat2 g1 = fundamental_tensor(fam.m, x, y, t);
        Mat2 g2 = fundamental_tensor(fam.m, x, cy, t);
        double gd = 0.0;
        for (int a = 0; a < 2; ++a)
          for (int bb = 0; bb < 2; ++bb)
            gd = std::max(gd, std::abs(g1[a][bb] - g2[a][bb]));
        track("g 0-homogeneity", gd, 1e-8);
      }

      Ten3 c3 = cartan_tensor(fam.m, x, y, t);
      double cmax = 0.0;
      for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb)
          cmax = std::max(
              cmax, std::abs(c3[a][bb][0] * y[0] + c3[a][bb][1] * y[1]));
      track("Cartan y-contraction", cmax, 1e-9);

      ChernDerivatives d = chern_derivatives(fam.m, g_eval, x, y, t);
      double gh = 0.0;
      for (double v : d.horizontal) gh = std::max(gh, std::abs(v));
      track("g horizontal derivative", gh, 2e-7);

      Vec2 g0 = spray(fam.m, x, y, t);
      Ten3 gamma = chern_connection(fam.m, x, y, t);
      double sd = 0.0;
      for (int a = 0; a < 2; ++a) {
        double acc = 0.0;
        for (int bb = 0; bb < 2; ++bb)
          for (int cc = 0; cc < 2; ++cc)
            acc += 0.5 * gamma[a][bb][cc] * y[bb] * y[cc];
        sd = std::max(sd, std::abs(acc - g0[a]));
      }
      track("G = 1/2 Gamma y y", sd, 1e-8);

      if (s % 20 == 0) {
        for (double c : {0.5, 2.0}) {
          Vec2 cy{c * y[0], c * y[1]};
          Vec2 G1 = spray(fam.m, x, y, t);
          Vec2 G2 = spray(fam.m, x, cy, t);
          double dG = std::max(std::abs(G2[0] - c * c * G1[0]),
                               std::abs(G2[1] - c * c * G1[1]));
          track("G 2-homogeneity", dG / std::max(1.0, c * c * norm2(G1)),
                1e-8);
          double r1 = ricci(fam.m, x, y, t);
          double r2 = ricci(fam.m, x, cy, t);
          track("Ric 2-homogeneity",
                std::abs(r2 - c * c * r1) / std::max(1.0, std::abs(r2)), 1e-8);
          SCurvatureData s1 = s_curvature(fam.m, mu, x, y, t);
          SCurvatureData s2 = s_curvature(fam.m, mu, x, cy, t);
          track("S 1-homogeneity",
                std::abs(s2.S - c * s1.S) / std::max(1.0, std::abs(s2.S)),
                1e-8);
          track("tau 0-homogeneity", std::abs(s2.tau - s1.tau), 1e-8);
        }
      }
    }
  }
  criterion(3, "tensor identity suite at 200 random samples per scenario",
            pass, "worst ratio to tolerance " + fmt(worst) + " (" +
                      worst_detail + ")");
}

void criterion_4_bochner() {
  ScenarioConfig cfg = resolve_scenario("conformal-static");
  MetricFamily m = cfg.build_metric();
  MeasureSpec mu = cfg.build_measure();
  ScriptedField u{"trig-mix",
                  [](Vec2 x, double) {
                    return 2.0 + std::cos(x[0]) + 0.3 * std::sin(x[1]);
                  },
                  [](Vec2, double) { return 0.0; }};
  ResidualReport r = check_bochner_refined(
      m, mu, u, 0.25, {grid_n(32), grid_n(64), grid_n(128)});
  double rel64 = r.levels[1].relative();
  bool pass = rel64 <= 1e-3 && r.order.has_value() && *r.order >= 2.0;
  criterion(4, "Bochner-Weitzenbock residual on the conformal scenario", pass,
            "rel sup " + fmt(rel64) + " <= 1e-3 at 64^2, order " +
                (r.order ? fmt(*r.order) : std::string("n/a")) + " >= 2");
}

void criterion_5_evolution_identities() {
  MetricParams base;
  base.randers_b = {0.2, 0.0};
  MetricFamily sh = MetricFamily::shrinking(base, 0.1);
  MeasureSpec mu;
  GridSpec g = grid_n(64);
  std::vector<double> steps{4e-2, 2e-2, 1e-2};
  double t = 0.25;

  ResidualReport l31 = check_energy_evolution_refined(
      sh, mu, script_decaying_sine(), t, g, 100, 501, steps, 1e-4);
  ExchangeReports l32 = check_exchange_refined(
      sh, mu, script_decaying_sine(), t, g, 100, 502, steps, 1e-4);
  ResidualReport l33 = check_defect_quadrature(
      sh, mu, script_sine_mix(), script_test_function(), t, g);

  bool pass = l31.relative_sup() <= 5e-4 && l31.order && *l31.order >= 1.5 &&
              l32.gradient.relative_sup() <= 5e-4 && l32.gradient.order &&
              *l32.gradient.order >= 1.5 &&
              l32.laplacian.relative_sup() <= 5e-4 && l32.laplacian.order &&
              *l32.laplacian.order >= 1.5 && l33.relative_sup() <= 5e-4;

  // Symbolic reduction on the flat base: J = lambda Delta f within 1e-6.
  MetricParams flat_base;
  MetricFamily shf = MetricFamily::shrinking(flat_base, 0.1);
  ScalarField f = sample(g, t, [](Vec2 x) {
    return std::sin(x[0]) + 0.3 * std::sin(x[1]);
  });
  FieldGradient gf = gradient_field(shf, f, t);
  ScalarField lap = finsler_laplacian(mu, gf);
  HessianField hess(shf, f, gf, t);
  std::vector<std::uint8_t> safe = robust_mask(g, gf.df);
  double jdev = 0.0;
  for (int i = 0; i < 64; i += 2)
    for (int j = 0; j < 64; j += 2) {
      int k = g.index(i, j);
      if (!safe[k]) continue;
      JBreakdown jb = j_quantity(shf, mu, gf, hess, i, j, t);
      jdev = std::max(jdev, std::abs(jb.total - 0.1 * lap.values[k]));
    }
  pass = pass && jdev <= 1e-6;

  criterion(5, "flow evolution identities on randers-shrink", pass,
            "rel residuals " + fmt(l31.relative_sup()) + "/" +
                fmt(l32.gradient.relative_sup()) + "/" +
                fmt(l32.laplacian.relative_sup()) + "/" +
                fmt(l33.relative_sup()) + " <= 5e-4; orders " +
                fmt(l31.order.value_or(0)) + "/" +
                fmt(l32.gradient.order.value_or(0)) + "/" +
                fmt(l32.laplacian.order.value_or(0)) +
                " >= 1.5; flat-base J vs lambda*Delta f " + fmt(jdev) +
                " <= 1e-6");
}

void criterion_6_trajectory_identities() {
  MetricParams base;
  base.randers_b = {0.2, 0.0};
  MetricFamily sh = MetricFamily::shrinking(base, 0.1);
  MeasureSpec mu;
  std::vector<double> stamps;
  for (int k = -2; k <= 2; ++k) stamps.push_back(0.06 + 0.01 * k);

  // The evolution equations need an eight-node margin from the critical
  // lines, which only exists at 64^2 and finer; refine upward from there.
  ResidualReport l34, l35, l36;
  for (int n : {64, 96, 128}) {
    GridSpec g = grid_n(n);
    // The randers-shrink scenario's initial data: isolated critical points,
    // matching the strong-form statements on M_f.
    ScalarField u0 = sample(g, 0.0, [](Vec2 x) {
      return 2.0 + std::cos(x[0]) + 0.3 * std::sin(x[1]);
    });
    FlowTrajectory traj = run_heat_flow(sh, mu, u0, stamps);
    ResidualReport a = check_log_heat(traj, 2);
    EvolutionReports b = check_evolution_pdes(traj, 2.0, 2);
    l34.levels.push_back(a.headline);
    l35.levels.push_back(b.sigma.headline);
    l36.levels.push_back(b.script_f.headline);
    if (n == 64) {
      l34.headline = a.headline;
      l35.headline = b.sigma.headline;
      l36.headline = b.script_f.headline;
    }
  }
  finalize_order(l34);
  finalize_order(l35);
  finalize_order(l36);

  bool pass = l34.relative_sup() <= 5e-3 && l35.relative_sup() <= 5e-3 &&
              l36.relative_sup() <= 5e-3 && l34.order && *l34.order >= 1.5 &&
              l35.order && *l35.order >= 1.5 && l36.order && *l36.order >= 1.5;
  criterion(6, "log-heat and sigma/script-F equations on trajectories", pass,
            "rel residuals at 64^2 " + fmt(l34.relative_sup()) + "/" +
                fmt(l35.relative_sup()) + "/" + fmt(l36.relative_sup()) +
                " <= 5e-3; orders " + fmt(l34.order.value_or(0)) + "/" +
                fmt(l35.order.value_or(0)) + "/" +
                fmt(l36.order.value_or(0)) + " >= 1.5");
}

void criterion_7_constants() {
  MetricParams base;  // Euclidean base
  MetricFamily sh = MetricFamily::shrinking(base, 0.1);
  MeasureSpec mu;
  HypothesisConstants c = estimate_constants(
      sh, mu, grid_n(64), {0.05, 0.2, 0.4}, 4.0, {16, 4});
  bool pass = std::abs(c.L1 - 0.1) <= 1e-6 && c.L2 <= 1e-6 && c.L3 <= 1e-6 &&
              c.K <= 1e-6 && c.K_prime <= 1e-6;
  criterion(7, "constant estimation on the flat-base shrink flow", pass,
            "L1 - 0.1 = " + fmt(c.L1 - 0.1) + ", L2 " + fmt(c.L2) + ", L3 " +
                fmt(c.L3) + ", K " + fmt(c.K) + ", K' " + fmt(c.K_prime) +
                " all within 1e-6");
}

void criteria_8_9_10_bounds() {
  std::vector<ScenarioContext> ctxs;
  for (const std::string name :
       {"flat-static", "randers-static", "randers-shrink"})
    ctxs.push_back(make_context(name));

  bool pass8 = true;
  std::string det8;
  for (ScenarioContext& ctx : ctxs) {
    MarginReport m = gradient_estimate_check(ctx.trajectory, ctx.constants,
                                             ctx.config);
    pass8 = pass8 && m.pass;
    det8 += ctx.name + " min margin " + fmt(m.min_margin) + "; ";
  }
  criterion(8, "gradient-estimate margins over nodes and stamps in [0.05, 0.5]", pass8,
            det8 + "alpha 2, N 4, eps 0.05");

  bool pass9 = true;
  std::string det9;
  for (ScenarioContext& ctx : ctxs) {
    std::vector<HarnackPair> pairs =
        draw_harnack_pairs(ctx.trajectory, 20, 777, 0.05, 0.3);
    MarginReport m =
        harnack_check(ctx.trajectory, ctx.constants, ctx.config, pairs);
    pass9 = pass9 && m.pass;
    det9 += ctx.name + " min log-margin " + fmt(m.min_margin) + "; ";
  }
  {
    GridSpec g = grid_n(48);
    MetricFamily eu = MetricFamily::euclidean();
    MeasureSpec mu;
    ScalarField c0 = sample(g, 0.0, [](Vec2) { return 2.0; });
    FlowTrajectory tc = run_heat_flow(eu, mu, c0, {0.1, 0.3});
    HypothesisConstants zc;
    zc.N = 4.0;
    HarnackPair same;
    same.x1 = same.x2 = Vec2{1.0, 1.0};
    same.stamp1 = 0;
    same.stamp2 = 1;
    EstimateConfig cfg;
    MarginReport m0 = harnack_check(tc, zc, cfg, {same});
    pass9 = pass9 && m0.pass;
    det9 += "x1 = x2 constant case margin " + fmt(m0.min_margin);
  }
  criterion(9, "Harnack pairs with straight connecting curves",
            pass9, det9);

  bool pass10 = true;
  double worst_slack = std::numeric_limits<double>::infinity();
  for (ScenarioContext& ctx : ctxs) {
    for (size_t s = 0; s < ctx.trajectory.size(); ++s) {
      ResidualReport r =
          check_hessian_trace_inequality(ctx.trajectory, s, ctx.config.N);
      worst_slack = std::min(worst_slack, r.headline.sup_residual);
    }
  }
  pass10 = worst_slack >= -1e-8;
  criterion(10, "Hessian trace inequality minimum slack", pass10,
            "min slack " + fmt(worst_slack) + " >= -1e-8 across scenario trajectories");
}

void criterion_11_determinism() {
  ScenarioConfig cfg = resolve_scenario("flat-static");
  cfg.dump_trajectory = false;

  auto run_to = [&](const std::string& dir) {
    ScenarioConfig c = cfg;
    c.output_directory = dir;
    RunReport r = run_scenario(c);
    emit_report(r);
    std::ifstream in(dir + "/report.txt", std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  std::string a = run_to("/tmp/finsler_acceptance_det");
  std::string b = run_to("/tmp/finsler_acceptance_det");
  criterion(11, "byte-identical report on rerun with the same seed",
            !a.empty() && a == b,
            "report.txt " + std::to_string(a.size()) + " bytes, identical");
}

}  // namespace

int main() {
  std::printf("finsler-flow acceptance suite\n");
  criterion_1_heat_oracle();
  criterion_2_legendre_duality();
  criterion_3_tensor_identities();
  criterion_4_bochner();
  criterion_5_evolution_identities();
  criterion_6_trajectory_identities();
  criterion_7_constants();
  criteria_8_9_10_bounds();
  criterion_11_determinism();
  std::printf("%d criterion(s) failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}

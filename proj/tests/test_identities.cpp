#include <doctest.h>

#include <cmath>

#include "finsler/identities.hpp"

using namespace finsler;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

GridSpec grid_n(int n) { return build_grid({n, n}, {kTwoPi, kTwoPi}); }

// Bakry-Emery Bochner oracle for g = e^{2 phi} delta with phi = a cos x1,
// weight Phi = q cos x1 cos x2 and u = 2 + cos x1 + 0.3 sin x2. Everything is
// closed form; the oracle's own two sides must agree to roundoff, which
// guards the hand algebra.
struct ConformalBochnerOracle {
  double a = 0.1;
  double q = 0.05;

  double phi(Vec2 x) const { return a * std::cos(x[0]); }
  Vec2 dphi(Vec2 x) const { return {-a * std::sin(x[0]), 0.0}; }
  double lap0_phi(Vec2 x) const { return -a * std::cos(x[0]); }
  Mat2 d2phi(Vec2 x) const {
    return {{{-a * std::cos(x[0]), 0.0}, {0.0, 0.0}}};
  }

  double Phi(Vec2 x) const { return q * std::cos(x[0]) * std::cos(x[1]); }
  Vec2 dPhi(Vec2 x) const {
    return {-q * std::sin(x[0]) * std::cos(x[1]),
            -q * std::cos(x[0]) * std::sin(x[1])};
  }
  Mat2 d2Phi(Vec2 x) const {
    double c1 = std::cos(x[0]), s1 = std::sin(x[0]);
    double c2 = std::cos(x[1]), s2 = std::sin(x[1]);
    return {{{-q * c1 * c2, q * s1 * s2}, {q * s1 * s2, -q * c1 * c2}}};
  }

  double u(Vec2 x) const { return 2.0 + std::cos(x[0]) + 0.3 * std::sin(x[1]); }
  Vec2 du(Vec2 x) const { return {-std::sin(x[0]), 0.3 * std::cos(x[1])}; }
  Mat2 d2u(Vec2 x) const {
    return {{{-std::cos(x[0]), 0.0}, {0.0, -0.3 * std::sin(x[1])}}};
  }
  double u111(Vec2 x) const { return std::sin(x[0]); }
  double u222(Vec2 x) const { return -0.3 * std::cos(x[1]); }

  // Delta u = e^{-2 phi} [lap0 u + du . (dPhi - 2 dphi)] in dimension two.
  double bracket(Vec2 x) const {
    Mat2 h = d2u(x);
    Vec2 g1 = du(x), p = dPhi(x), f = dphi(x);
    return h[0][0] + h[1][1] + g1[0] * (p[0] - 2.0 * f[0]) +
           g1[1] * (p[1] - 2.0 * f[1]);
  }
  double lap_u(Vec2 x) const {
    return std::exp(-2.0 * phi(x)) * bracket(x);
  }

  Vec2 grad_bracket(Vec2 x) const {
    Vec2 g1 = du(x);
    Mat2 h = d2u(x);
    Vec2 p = dPhi(x), f = dphi(x);
    Mat2 hp = d2Phi(x), hf = d2phi(x);
    Vec2 out{u111(x), u222(x)};  // flat gradient of lap0 u
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        out[k] += h[i][k] * (p[i] - 2.0 * f[i]) +
                  g1[i] * (hp[i][k] - 2.0 * hf[i][k]);
    return out;
  }

  Vec2 grad_lap_u(Vec2 x) const {
    double e = std::exp(-2.0 * phi(x));
    Vec2 f = dphi(x);
    double br = bracket(x);
    Vec2 gb = grad_bracket(x);
    return {e * (gb[0] - 2.0 * f[0] * br), e * (gb[1] - 2.0 * f[1] * br)};
  }

  double term_grad(Vec2 x) const {  // 2 du(nabla^{nabla u} Delta u)
    Vec2 g1 = du(x), gl = grad_lap_u(x);
    return 2.0 * std::exp(-2.0 * phi(x)) * (g1[0] * gl[0] + g1[1] * gl[1]);
  }

  // Levi-Civita Hessian of a scalar v given dv and flat d2v, for the
  // conformal Christoffels G^k_{ij} = f_i d_jk + f_j d_ik - f_k d_ij.
  Mat2 lc_hessian(Vec2 x, const Vec2& dv, const Mat2& d2v) const {
    Vec2 f = dphi(x);
    Mat2 out;
    double fg = f[0] * dv[0] + f[1] * dv[1];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        out[i][j] = d2v[i][j] - (f[j] * dv[i] + f[i] * dv[j]) +
                    (i == j ? fg : 0.0);
    return out;
  }

  double term_hessian(Vec2 x) const {  // 2 ||Hess u||^2_{HS}
    Mat2 h = lc_hessian(x, du(x), d2u(x));
    double e4 = std::exp(-4.0 * phi(x));
    double acc = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) acc += h[i][j] * h[i][j];
    return 2.0 * e4 * acc;
  }

  double term_ric(Vec2 x) const {  // 2 Ric^inf(nabla u)
    double K = -std::exp(-2.0 * phi(x)) * lap0_phi(x);
    Vec2 g1 = du(x);
    double du2 = g1[0] * g1[0] + g1[1] * g1[1];
    double ric_part = K * std::exp(-2.0 * phi(x)) * du2;
    // tau = 2 phi - Phi; Ric^inf = Ric + Hess tau.
    Vec2 dtau{2.0 * dphi(x)[0] - dPhi(x)[0], 2.0 * dphi(x)[1] - dPhi(x)[1]};
    Mat2 d2tau;
    Mat2 hf = d2phi(x), hp = d2Phi(x);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) d2tau[i][j] = 2.0 * hf[i][j] - hp[i][j];
    Mat2 ht = lc_hessian(x, dtau, d2tau);
    double hess_tau = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) hess_tau += ht[i][j] * g1[i] * g1[j];
    hess_tau *= std::exp(-4.0 * phi(x));
    return 2.0 * (ric_part + hess_tau);
  }

  double lhs(Vec2 x) const {  // Delta^{nabla u} (F^2(nabla u))
    Vec2 g1 = du(x);
    Mat2 h = d2u(x);
    Vec2 f = dphi(x);
    Mat2 hf = d2phi(x);
    double P = g1[0] * g1[0] + g1[1] * g1[1];
    Vec2 dP{2.0 * (g1[0] * h[0][0] + g1[1] * h[1][0]),
            2.0 * (g1[0] * h[0][1] + g1[1] * h[1][1])};
    double lap0P = 2.0 * (h[0][0] * h[0][0] + g1[0] * u111(x)) +
                   2.0 * h[1][0] * h[1][0] + 2.0 * h[0][1] * h[0][1] +
                   2.0 * (h[1][1] * h[1][1] + g1[1] * u222(x));
    double e = std::exp(-2.0 * phi(x));
    Vec2 dw{e * (dP[0] - 2.0 * f[0] * P), e * (dP[1] - 2.0 * f[1] * P)};
    double lap0w =
        e * (lap0P - 2.0 * (hf[0][0] + hf[1][1]) * P - 4.0 * f[0] * dP[0] -
             4.0 * f[1] * dP[1] + 4.0 * (f[0] * f[0] + f[1] * f[1]) * P);
    Vec2 p = dPhi(x);
    return e * (lap0w + dw[0] * (p[0] - 2.0 * f[0]) +
                dw[1] * (p[1] - 2.0 * f[1]));
  }

  double rhs(Vec2 x) const {
    return term_grad(x) + term_hessian(x) + term_ric(x);
  }
};

}  // namespace

TEST_CASE("conformal Bochner oracle is internally consistent") {
  ConformalBochnerOracle o;
  for (Vec2 x : {Vec2{0.4, 1.2}, Vec2{2.8, 5.1}, Vec2{4.0, 0.3}}) {
    CHECK(o.lhs(x) == doctest::Approx(o.rhs(x)).epsilon(1e-10));
  }
}

TEST_CASE("Bochner: flat case reduces to the classical identity") {
  MetricFamily eu = MetricFamily::euclidean();
  MeasureSpec mu;
  ScriptedField u{"two-plus-cos",
                  [](Vec2 x, double) { return 2.0 + std::cos(x[0]); },
                  [](Vec2, double) { return 0.0; }};
  ResidualReport r = check_bochner(eu, mu, u, 0.0, grid_n(64));
  CHECK(r.relative_sup() <= 1e-4);
  CHECK(r.headline.samples > 500);

  ResidualReport rr = check_bochner_refined(
      eu, mu, u, 0.0, {grid_n(32), grid_n(64), grid_n(128)});
  REQUIRE(rr.order.has_value());
  CHECK(*rr.order >= 2.0);
}

TEST_CASE("Bochner: constant field gives an empty, zero report") {
  MetricFamily eu = MetricFamily::euclidean();
  MeasureSpec mu;
  ScriptedField c{"const", [](Vec2, double) { return 1.5; },
                  [](Vec2, double) { return 0.0; }};
  ResidualReport r = check_bochner(eu, mu, c, 0.0, grid_n(32));
  CHECK(r.headline.sup_residual == 0.0);
  CHECK(r.headline.samples == 0);
}

TEST_CASE("Bochner matches the weighted Riemannian oracle within 1e-3") {
  ConformalBochnerOracle o;
  MetricFamily m = MetricFamily::riemannian_conformal(o.a);
  MeasureSpec mu(MeasureSpec::Kind::CosineBump, o.q);
  GridSpec g = grid_n(64);
  ScriptedField u{"trig-mix",
                  [](Vec2 x, double) {
                    return 2.0 + std::cos(x[0]) + 0.3 * std::sin(x[1]);
                  },
                  [](Vec2, double) { return 0.0; }};

  ResidualReport r = check_bochner(m, mu, u, 0.0, g);
  CHECK(r.relative_sup() <= 1e-3);

  // Pipeline LHS against the oracle LHS at interior nodes.
  ScalarField uf = sample(g, 0.0, [&](Vec2 x) { return u.value(x, 0.0); });
  FieldGradient gf = gradient_field(m, uf, 0.0);
  ScalarField w(g, 0.0);
  for (int k = 0; k < g.nodes(); ++k)
    w.values[k] = gf.fnorm.values[k] * gf.fnorm.values[k];
  ScalarField lhs = linearized_laplacian(m, mu, gf.grad, w, 0.0);
  double scale = sup_abs(lhs.values);
  std::vector<std::uint8_t> safe = robust_mask(g, gf.df, 0.45, 7);
  double err = 0.0;
  int used = 0;
  for (int i = 0; i < 64; i += 3)
    for (int j = 0; j < 64; j += 3) {
      int k = g.index(i, j);
      if (!safe[k]) continue;
      err = std::max(err, std::abs(lhs.values[k] - o.lhs(g.node(i, j))));
      ++used;
    }
  CHECK(used > 50);
  CHECK(err / scale <= 1e-3);
}

TEST_CASE("gradient-energy evolution: static cases and analytic reductions") {
  MeasureSpec mu;
  GridSpec g = grid_n(48);

  MetricFamily stat = MetricFamily::randers({0.2, 0.0});
  ResidualReport r0 =
      check_energy_evolution(stat, mu, script_sine_mix(), 0.2, g, 50, 7);
  CHECK(r0.headline.sup_residual <= 1e-10);

  MetricFamily eu = MetricFamily::euclidean();
  ResidualReport r1 =
      check_energy_evolution(eu, mu, script_decaying_sine(), 0.3, g, 60, 11);
  CHECK(r1.relative_sup() <= 1e-6);

  MetricParams base;
  MetricFamily sh = MetricFamily::shrinking(base, 0.1);
  ResidualReport r2 = check_energy_evolution(sh, mu, script_sine_mix(), 0.2, g, 60, 13);
  CHECK(r2.relative_sup() <= 1e-6);
}

TEST_CASE("gradient-energy evolution converges in the differencing step") {
  MeasureSpec mu;
  MetricParams base;
  base.randers_b = {0.2, 0.0};
  MetricFamily sh = MetricFamily::shrinking(base, 0.1);
  ResidualReport r = check_energy_evolution_refined(
      sh, mu, script_decaying_sine(), 0.2, grid_n(48), 40, 17,
      {4e-2, 2e-2, 1e-2}, 1e-4);
  REQUIRE(r.order.has_value());
  CHECK(*r.order >= 1.5);
  CHECK(r.relative_sup() <= 5e-4);
}

TEST_CASE("exchange formulae: static commutators vanish; shrink-flat reduction") {
  MeasureSpec mu;
  GridSpec g = grid_n(48);

  MetricFamily stat = MetricFamily::randers({0.2, 0.0});
  ExchangeReports r0 =
      check_exchange(stat, mu, script_sine_mix(), 0.2, g, 40, 19);
  CHECK(r0.gradient.headline.sup_residual <= 1e-9);
  CHECK(r0.laplacian.headline.sup_residual <= 1e-8);

  MetricParams base;
  MetricFamily sh = MetricFamily::shrinking(base, 0.1);
  ExchangeReports r1 =
      check_exchange(sh, mu, script_sine_mix(), 0.2, g, 60, 23, 1e-4);
  CHECK(r1.laplacian.relative_sup() <= 1e-5);
  CHECK(r1.gradient.relative_sup() <= 1e-5);
}

TEST_CASE("exchange formulae on the randers-shrink family with step refinement") {
  MeasureSpec mu;
  MetricParams base;
  base.randers_b = {0.2, 0.0};
  MetricFamily sh = MetricFamily::shrinking(base, 0.1);
  ExchangeReports r = check_exchange_refined(
      sh, mu, script_decaying_sine(), 0.2, grid_n(48), 40, 29,
      {4e-2, 2e-2, 1e-2}, 1e-4);
  CHECK(r.gradient.relative_sup() <= 5e-4);
  CHECK(r.laplacian.relative_sup() <= 5e-4);
  REQUIRE(r.gradient.order.has_value());
  REQUIRE(r.laplacian.order.has_value());
  CHECK(*r.gradient.order >= 1.5);
  CHECK(*r.laplacian.order >= 1.5);
}

TEST_CASE("exchange residuals are invariant under f -> f + constant") {
  MeasureSpec mu;
  MetricParams base;
  base.randers_b = {0.2, 0.0};
  MetricFamily sh = MetricFamily::shrinking(base, 0.1);
  GridSpec g = grid_n(48);
  ScriptedField shifted{
      "decaying-sine-shifted",
      [](Vec2 x, double t) { return 17.5 + std::exp(-t) * std::sin(x[0]); },
      [](Vec2 x, double t) { return -std::exp(-t) * std::sin(x[0]); }};
  ExchangeReports a =
      check_exchange(sh, mu, script_decaying_sine(), 0.2, g, 40, 31);
  ExchangeReports b = check_exchange(sh, mu, shifted, 0.2, g, 40, 31);
  CHECK(a.laplacian.headline.sup_residual ==
        doctest::Approx(b.laplacian.headline.sup_residual)
            .epsilon(1e-4));
  CHECK(a.gradient.headline.sup_residual ==
        doctest::Approx(b.gradient.headline.sup_residual).epsilon(1e-4));
}

TEST_CASE("flow-defect quadrature identity") {
  MeasureSpec mu;
  GridSpec g = grid_n(64);

  MetricFamily stat = MetricFamily::randers({0.2, 0.0});
  ResidualReport r0 = check_defect_quadrature(
      stat, mu, script_sine_mix(), script_test_function(), 0.2, g);
  CHECK(r0.headline.sup_residual <= 1e-12);

  MetricParams base;
  MetricFamily sh = MetricFamily::shrinking(base, 0.1);
  ResidualReport r1 = check_defect_quadrature(
      sh, mu, script_sine_mix(), script_test_function(), 0.2, g);
  CHECK(r1.relative_sup() <= 1e-5);
  CHECK(r1.reliable);
  double div_term = 1.0;
  for (const auto& [k, v] : r1.extras)
    if (k == "divergence_correction") div_term = v;
  CHECK(std::abs(div_term) <= 1e-9);

  // Linearity in the test function.
  ScriptedField phi2{"2cos-x2",
                     [](Vec2 x, double) { return 2.0 * std::cos(x[1]); },
                     [](Vec2, double) { return 0.0; }};
  ResidualReport r2 =
      check_defect_quadrature(sh, mu, script_sine_mix(), phi2, 0.2, g);
  CHECK(std::abs(r2.headline.sup_residual -
                 2.0 * r1.headline.sup_residual) <=
        1e-12 * std::max(1.0, r2.headline.sup_residual));
}

TEST_CASE("log-heat equation strong form on solver trajectories") {
  GridSpec g = grid_n(64);
  MetricFamily eu = MetricFamily::euclidean();
  MeasureSpec mu;
  ScalarField u0 = sample(g, 0.0, [](Vec2 x) { return 2.0 + std::cos(x[0]); });

  std::vector<double> stamps;
  for (int k = -2; k <= 2; ++k) stamps.push_back(0.2 + 0.01 * k);
  FlowTrajectory traj = run_heat_flow(eu, mu, u0, stamps);
  ResidualReport r = check_log_heat(traj, 2);
  CHECK(r.relative_sup() <= 1e-4);

  ScalarField c0 = sample(g, 0.0, [](Vec2) { return 2.0; });
  FlowTrajectory tc = run_heat_flow(eu, mu, c0, stamps);
  ResidualReport rc = check_log_heat(tc, 2);
  CHECK(rc.headline.sup_residual <= 1e-12);

  // Boundary stamps fall back to one-sided differencing and say so.
  ResidualReport re = check_log_heat(traj, 0);
  CHECK(re.note.find("one-sided") != std::string::npos);
}

TEST_CASE("log-heat equation order under grid refinement") {
  MetricFamily eu = MetricFamily::euclidean();
  MeasureSpec mu;
  std::vector<double> stamps;
  for (int k = -2; k <= 2; ++k) stamps.push_back(0.1 + 0.01 * k);

  ResidualReport combined;
  for (int n : {32, 64, 128}) {
    GridSpec g = grid_n(n);
    ScalarField u0 =
        sample(g, 0.0, [](Vec2 x) { return 2.0 + std::cos(x[0]); });
    FlowTrajectory traj = run_heat_flow(eu, mu, u0, stamps);
    ResidualReport r = check_log_heat(traj, 2);
    combined.levels.push_back(r.headline);
    combined.headline = r.headline;
  }
  finalize_order(combined);
  REQUIRE(combined.order.has_value());
  CHECK(*combined.order >= 2.0);
}

TEST_CASE("sigma and script-F equations on the flat analytic trajectory") {
  GridSpec g = grid_n(64);
  MetricFamily eu = MetricFamily::euclidean();
  MeasureSpec mu;
  ScalarField u0 = sample(g, 0.0, [](Vec2 x) { return 2.0 + std::cos(x[0]); });
  std::vector<double> stamps;
  for (int k = -2; k <= 2; ++k) stamps.push_back(0.1 + 0.01 * k);
  FlowTrajectory traj = run_heat_flow(eu, mu, u0, stamps);

  EvolutionReports r = check_evolution_pdes(traj, 2.0, 2);
  CHECK(r.sigma.relative_sup() <= 5e-4);
  CHECK(r.script_f.relative_sup() <= 5e-4);

  CHECK_THROWS_AS(check_evolution_pdes(traj, 1.0, 2), Error);
  CHECK_THROWS_AS(check_evolution_pdes(traj, 2.0, 0), Error);

  ScalarField c0 = sample(g, 0.0, [](Vec2) { return 3.0; });
  FlowTrajectory tc = run_heat_flow(eu, mu, c0, stamps);
  EvolutionReports rc = check_evolution_pdes(tc, 2.0, 2);
  CHECK(rc.sigma.headline.sup_residual <= 1e-12);
  CHECK(rc.script_f.headline.sup_residual <= 1e-12);
}

TEST_CASE("hessian trace inequality on a randers-shrink trajectory") {
  GridSpec g = grid_n(48);
  MetricParams base;
  base.randers_b = {0.2, 0.0};
  MetricFamily sh = MetricFamily::shrinking(base, 0.1);
  MeasureSpec mu;
  ScalarField u0 = sample(g, 0.0, [](Vec2 x) { return 2.0 + std::cos(x[0]); });
  FlowTrajectory traj = run_heat_flow(sh, mu, u0, {0.1, 0.2});

  ResidualReport r = check_hessian_trace_inequality(traj, 1, 4.0);
  CHECK(r.headline.sup_residual >= -1e-8);

  double mid = -1.0;
  for (const auto& [k, v] : r.extras)
    if (k == "min_slack_mid_link") mid = v;
  CHECK(mid >= -1e-8);

  CHECK_THROWS_AS(check_hessian_trace_inequality(traj, 1, 2.0), Error);
}

TEST_CASE("hessian trace slack diverges as N -> n+ when S is nonzero") {
  GridSpec g = grid_n(32);
  MetricFamily eu = MetricFamily::euclidean();
  MeasureSpec mu(MeasureSpec::Kind::CosineBump, 0.3);  // S = -dPhi(y) != 0
  ScalarField u0 = sample(g, 0.0, [](Vec2 x) { return 2.0 + std::cos(x[0]); });
  FlowTrajectory traj = run_heat_flow(eu, mu, u0, {0.1});

  ResidualReport wide = check_hessian_trace_inequality(traj, 0, 4.0);
  ResidualReport tight = check_hessian_trace_inequality(traj, 0, 2.0001);
  CHECK(wide.headline.sup_residual >= -1e-8);
  CHECK(tight.headline.sup_residual > 10.0 * std::abs(wide.headline.sup_residual));
}

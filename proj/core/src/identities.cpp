#include "finsler/identities.hpp"

#include <algorithm>
#include <cmath>

#include "finsler/parallel.hpp"

namespace finsler {

void finalize_order(ResidualReport& report) {
  if (report.levels.size() < 3) return;
  // Least-squares slope of log residual against log parameter.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const ResidualLevel& l : report.levels) {
    if (l.sup_residual <= 0.0 || l.parameter <= 0.0) continue;
    double lx = std::log(l.parameter);
    double ly = std::log(l.relative());
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 3) return;
  double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-30) return;
  report.order = (n * sxy - sx * sy) / denom;
}

ScriptedField script_decaying_sine() {
  return {"decaying-sine",
          [](Vec2 x, double t) { return std::exp(-t) * std::sin(x[0]); },
          [](Vec2 x, double t) { return -std::exp(-t) * std::sin(x[0]); }};
}

ScriptedField script_sine_mix() {
  return {"sine-mix",
          [](Vec2 x, double) { return std::sin(x[0]) + 0.3 * std::sin(x[1]); },
          [](Vec2, double) { return 0.0; }};
}

ScriptedField script_cos_mix() {
  return {"cos-mix",
          [](Vec2 x, double) {
            return 2.0 + std::cos(x[0]) + 0.3 * std::sin(x[1]);
          },
          [](Vec2, double) { return 0.0; }};
}

ScriptedField script_test_function() {
  return {"cos-x2", [](Vec2 x, double) { return std::cos(x[1]); },
          [](Vec2, double) { return 0.0; }};
}

namespace {

ScalarField sample_script(const ScriptedField& s, const GridSpec& grid,
                          double t) {
  return sample(grid, t, [&](Vec2 x) { return s.value(x, t); });
}

ScalarField sample_script_dt(const ScriptedField& s, const GridSpec& grid,
                             double t) {
  return sample(grid, t, [&](Vec2 x) { return s.dt(x, t); });
}

}  // namespace

std::vector<std::uint8_t> robust_mask(const GridSpec& grid,
                                      const VectorField& df, double frac,
                                      int erode) {
  double sup = 0.0;
  for (int k = 0; k < grid.nodes(); ++k)
    sup = std::max(sup, std::hypot(df.comp[0][k], df.comp[1][k]));
  // The absolute floor keeps fields that are constant up to rounding from
  // producing a spurious all-true mask.
  double threshold = std::max(frac * sup, 1e-12);
  std::vector<std::uint8_t> mask(grid.nodes(), 0);
  for (int k = 0; k < grid.nodes(); ++k)
    mask[k] = std::hypot(df.comp[0][k], df.comp[1][k]) > threshold ? 1 : 0;
  return erode_mask(grid, mask, erode);
}

namespace {

struct ResidualAccumulator {
  double sup = 0.0;
  double scale = 0.0;
  long long n = 0;

  void add(double residual, std::initializer_list<double> terms) {
    sup = std::max(sup, std::abs(residual));
    for (double t : terms) scale = std::max(scale, std::abs(t));
    ++n;
  }
  void merge(const ResidualAccumulator& o) {
    sup = std::max(sup, o.sup);
    scale = std::max(scale, o.scale);
    n += o.n;
  }
  ResidualLevel level(double parameter) const {
    return ResidualLevel{parameter, sup, scale, n};
  }
};

}  // namespace

std::vector<std::pair<int, int>> draw_probes(
    const GridSpec& g, const std::vector<std::uint8_t>& mask, int count,
    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> di(0, g.resolution[0] - 1);
  std::uniform_int_distribution<int> dj(0, g.resolution[1] - 1);
  std::vector<std::pair<int, int>> probes;
  int attempts = 0;
  while (static_cast<int>(probes.size()) < count && attempts < 100 * count) {
    int i = di(rng), j = dj(rng);
    ++attempts;
    if (mask[g.index(i, j)]) probes.emplace_back(i, j);
  }
  return probes;
}

// ---------------------------------------------------------------------------
// Bochner-Weitzenboeck
// ---------------------------------------------------------------------------

ResidualReport check_bochner(const MetricFamily& m, const MeasureSpec& mu,
                             const ScriptedField& u, double t,
                             const GridSpec& grid, const DiffConfig& dc) {
  ScalarField uf = sample_script(u, grid, t);
  FieldGradient gf = gradient_field(m, uf, t);

  ScalarField w(grid, t);  // F^2(nabla u)
  for (int k = 0; k < grid.nodes(); ++k)
    w.values[k] = gf.fnorm.values[k] * gf.fnorm.values[k];

  ScalarField lhs = linearized_laplacian(m, mu, gf.grad, w, t);
  ScalarField lap = finsler_laplacian(mu, gf);
  VectorField dlap = differential(lap);
  HessianField hess(m, uf, gf, t, dc);

  std::vector<std::uint8_t> mask = robust_mask(grid, gf.df, 0.45, 4);

  std::vector<ResidualAccumulator> rows(grid.resolution[0]);
  parallel_rows(grid.resolution[0], [&](int i) {
    for (int j = 0; j < grid.resolution[1]; ++j) {
      int k = grid.index(i, j);
      if (!mask[k]) continue;
      Vec2 x = grid.node(i, j);
      Vec2 v = gf.grad.at(i, j);
      Mat2 ginv = inverse(fundamental_tensor(m, x, v, t));
      double grad_term = 2.0 * dot(gf.df.at(i, j), mul(ginv, dlap.at(i, j)));
      HessianData hd = hess.at(i, j);
      double hs2 = 2.0 * hd.hs_norm * hd.hs_norm;
      MeasureGeometry geo = eval_measure_geometry(m, mu, x, v, t, dc);
      double ric_inf = 2.0 * geo.ric_inf();
      double res = lhs.values[k] - grad_term - hs2 - ric_inf;
      rows[i].add(res, {lhs.values[k], grad_term, hs2, ric_inf});
    }
  });
  ResidualAccumulator acc;
  for (const auto& r : rows) acc.merge(r);

  ResidualReport report;
  report.tag = "bochner-weitzenbock";
  report.sample_description =
      "masked grid nodes, script " + u.name + ", t = " + std::to_string(t);
  report.headline = acc.level(grid.spacing(0));
  report.levels.push_back(report.headline);
  return report;
}

ResidualReport check_bochner_refined(const MetricFamily& m,
                                     const MeasureSpec& mu,
                                     const ScriptedField& u, double t,
                                     const std::vector<GridSpec>& grids,
                                     const DiffConfig& dc) {
  ResidualReport report;
  for (const GridSpec& g : grids) {
    ResidualReport one = check_bochner(m, mu, u, t, g, dc);
    report.levels.push_back(one.headline);
    report.headline = one.headline;
    report.sample_description = one.sample_description;
  }
  report.tag = "bochner-weitzenbock";
  finalize_order(report);
  return report;
}

// ---------------------------------------------------------------------------
// Gradient-energy evolution
// ---------------------------------------------------------------------------

namespace {

// F^2(nabla f) as a full field at time tt (metric and script both at tt).
ScalarField f2_grad_field(const MetricFamily& m, const ScriptedField& s,
                          const GridSpec& grid, double tt) {
  ScalarField f = sample_script(s, grid, tt);
  FieldGradient gf = gradient_field(m, f, tt);
  ScalarField out(grid, tt);
  for (int k = 0; k < grid.nodes(); ++k)
    out.values[k] = gf.fnorm.values[k] * gf.fnorm.values[k];
  return out;
}

ResidualReport energy_evolution_at_step(const MetricFamily& m, const ScriptedField& s,
                               double t, const GridSpec& grid,
                               const std::vector<std::pair<int, int>>& probes,
                               double t_step, const DiffConfig& dc) {
  ScalarField f0 = sample_script(s, grid, t);
  FieldGradient gf = gradient_field(m, f0, t);
  VectorField dft = differential(sample_script_dt(s, grid, t));

  ScalarField plus = f2_grad_field(m, s, grid, t + t_step);
  ScalarField minus = f2_grad_field(m, s, grid, t - t_step);

  ResidualAccumulator acc;
  for (auto [i, j] : probes) {
    int k = grid.index(i, j);
    double lhs = (plus.values[k] - minus.values[k]) / (2.0 * t_step);
    Vec2 x = grid.node(i, j);
    Vec2 v = gf.grad.at(i, j);
    Mat2 h = flow_h(m, x, v, t, dc);
    double h_term = 2.0 * quad(h, v, v);
    double dft_term = 2.0 * dot(dft.at(i, j), v);
    acc.add(lhs - h_term - dft_term, {lhs, h_term, dft_term});
  }

  ResidualReport report;
  report.tag = "energy-evolution";
  report.sample_description =
      std::to_string(probes.size()) + " probe nodes, script " + s.name;
  report.headline = acc.level(t_step);
  report.levels.push_back(report.headline);
  return report;
}

}  // namespace

ResidualReport check_energy_evolution(const MetricFamily& m, const MeasureSpec& mu,
                             const ScriptedField& f, double t,
                             const GridSpec& grid, int probes,
                             std::uint64_t seed, double t_step,
                             const DiffConfig& dc) {
  (void)mu;
  ScalarField f0 = sample_script(f, grid, t);
  FieldGradient gf = gradient_field(m, f0, t);
  auto nodes = draw_probes(grid, robust_mask(grid, gf.df), probes, seed);
  return energy_evolution_at_step(m, f, t, grid, nodes, t_step, dc);
}

ResidualReport check_energy_evolution_refined(const MetricFamily& m,
                                     const MeasureSpec& mu,
                                     const ScriptedField& f, double t,
                                     const GridSpec& grid, int probes,
                                     std::uint64_t seed,
                                     const std::vector<double>& steps,
                                     double headline_step,
                                     const DiffConfig& dc) {
  (void)mu;
  ScalarField f0 = sample_script(f, grid, t);
  FieldGradient gf = gradient_field(m, f0, t);
  auto nodes = draw_probes(grid, robust_mask(grid, gf.df), probes, seed);

  ResidualReport report;
  for (double s : steps) {
    ResidualReport one = energy_evolution_at_step(m, f, t, grid, nodes, s, dc);
    report.levels.push_back(one.headline);
  }
  ResidualReport fine = energy_evolution_at_step(m, f, t, grid, nodes, headline_step, dc);
  report.tag = fine.tag;
  report.sample_description = fine.sample_description;
  report.headline = fine.headline;
  finalize_order(report);
  return report;
}

// ---------------------------------------------------------------------------
// Operator exchange formulae
// ---------------------------------------------------------------------------

namespace {

ExchangeReports exchange_at_step(const MetricFamily& m, const MeasureSpec& mu,
                                 const ScriptedField& s, double t,
                                 const GridSpec& grid,
                                 const std::vector<std::pair<int, int>>& probes,
                                 double t_step, const DiffConfig& dc) {
  ScalarField f0 = sample_script(s, grid, t);
  FieldGradient gf = gradient_field(m, f0, t);
  ScalarField ft_field = sample_script_dt(s, grid, t);
  VectorField dft = differential(ft_field);
  HessianField hess(m, f0, gf, t, dc);

  // d/dt of nabla f and of Delta f from gradient fields at t +- step.
  ScalarField fp = sample_script(s, grid, t + t_step);
  ScalarField fm = sample_script(s, grid, t - t_step);
  FieldGradient gp = gradient_field(m, fp, t + t_step);
  FieldGradient gm = gradient_field(m, fm, t - t_step);
  ScalarField lap_p = finsler_laplacian(mu, gp);
  ScalarField lap_m = finsler_laplacian(mu, gm);

  // Delta^{nabla f} f_t at the center time.
  ScalarField lin_ft = linearized_laplacian(m, mu, gf.grad, ft_field, t);

  ResidualAccumulator acc_i, acc_ii;
  for (auto [i, j] : probes) {
    int k = grid.index(i, j);
    Vec2 x = grid.node(i, j);
    Vec2 v = gf.grad.at(i, j);
    Mat2 ginv = inverse(fundamental_tensor(m, x, v, t));
    Mat2 h_raised = flow_h_raised(m, x, v, t, dc);

    // (i): nabla^{nabla f}(f_t) - d/dt nabla f = -2 h^{ij} f_i d_j.
    Vec2 grad_ft = mul(ginv, dft.at(i, j));
    Vec2 dgrad{(gp.grad.at(i, j)[0] - gm.grad.at(i, j)[0]) / (2.0 * t_step),
               (gp.grad.at(i, j)[1] - gm.grad.at(i, j)[1]) / (2.0 * t_step)};
    Vec2 rhs_i = mul(h_raised, gf.df.at(i, j));
    for (int c = 0; c < 2; ++c) {
      double lhs_c = grad_ft[c] - dgrad[c];
      double rhs_c = -2.0 * rhs_i[c];
      // The commutator's operands are the participating terms; using only
      // the cancelled difference would degenerate the normalization when
      // both sides vanish.
      acc_i.add(lhs_c - rhs_c, {grad_ft[c], dgrad[c], rhs_c});
    }

    // (ii): Delta^{nabla f}(f_t) - d/dt Delta f = -2 J.
    double dlap = (lap_p.values[k] - lap_m.values[k]) / (2.0 * t_step);
    double lhs = lin_ft.values[k] - dlap;
    JBreakdown jb = j_quantity(m, mu, gf, hess, i, j, t, dc);
    double rhs = -2.0 * jb.total;
    acc_ii.add(lhs - rhs, {lin_ft.values[k], dlap, rhs});
  }

  ExchangeReports out;
  out.gradient.tag = "gradient-commutator";
  out.gradient.sample_description =
      std::to_string(probes.size()) + " probe nodes, script " + s.name;
  out.gradient.headline = acc_i.level(t_step);
  out.gradient.levels.push_back(out.gradient.headline);
  out.laplacian.tag = "laplacian-commutator";
  out.laplacian.sample_description = out.gradient.sample_description;
  out.laplacian.headline = acc_ii.level(t_step);
  out.laplacian.levels.push_back(out.laplacian.headline);
  return out;
}

}  // namespace

ExchangeReports check_exchange(const MetricFamily& m, const MeasureSpec& mu,
                               const ScriptedField& f, double t,
                               const GridSpec& grid, int probes,
                               std::uint64_t seed, double t_step,
                               const DiffConfig& dc) {
  ScalarField f0 = sample_script(f, grid, t);
  FieldGradient gf = gradient_field(m, f0, t);
  auto nodes = draw_probes(grid, robust_mask(grid, gf.df), probes, seed);
  return exchange_at_step(m, mu, f, t, grid, nodes, t_step, dc);
}

ExchangeReports check_exchange_refined(const MetricFamily& m,
                                       const MeasureSpec& mu,
                                       const ScriptedField& f, double t,
                                       const GridSpec& grid, int probes,
                                       std::uint64_t seed,
                                       const std::vector<double>& steps,
                                       double headline_step,
                                       const DiffConfig& dc) {
  ScalarField f0 = sample_script(f, grid, t);
  FieldGradient gf = gradient_field(m, f0, t);
  auto nodes = draw_probes(grid, robust_mask(grid, gf.df), probes, seed);

  ExchangeReports out;
  for (double s : steps) {
    ExchangeReports one = exchange_at_step(m, mu, f, t, grid, nodes, s, dc);
    out.gradient.levels.push_back(one.gradient.headline);
    out.laplacian.levels.push_back(one.laplacian.headline);
  }
  ExchangeReports fine =
      exchange_at_step(m, mu, f, t, grid, nodes, headline_step, dc);
  out.gradient.tag = fine.gradient.tag;
  out.gradient.sample_description = fine.gradient.sample_description;
  out.gradient.headline = fine.gradient.headline;
  out.laplacian.tag = fine.laplacian.tag;
  out.laplacian.sample_description = fine.laplacian.sample_description;
  out.laplacian.headline = fine.laplacian.headline;
  finalize_order(out.gradient);
  finalize_order(out.laplacian);
  return out;
}

// ---------------------------------------------------------------------------
// Flow-defect quadrature
// ---------------------------------------------------------------------------

ResidualReport check_defect_quadrature(const MetricFamily& m,
                                        const MeasureSpec& mu,
                                        const ScriptedField& f,
                                        const ScriptedField& phi, double t,
                                        const GridSpec& grid,
                                        const DiffConfig& dc) {
  ScalarField ff = sample_script(f, grid, t);
  FieldGradient gf = gradient_field(m, ff, t);
  ScalarField phif = sample_script(phi, grid, t);
  VectorField dphi = differential(phif);
  HessianField hess(m, ff, gf, t, dc);

  ScalarField lhs_integrand(grid, t);
  ScalarField rhs_integrand(grid, t);  // phi * J
  VectorField div_field(grid, t);      // phi * df(h-flat)

  std::vector<long long> off_rows(grid.resolution[0], 0);
  parallel_rows(grid.resolution[0], [&](int i) {
    for (int j = 0; j < grid.resolution[1]; ++j) {
      int k = grid.index(i, j);
      if (!ff.mask[k]) {
        ++off_rows[i];
        continue;
      }
      Vec2 x = grid.node(i, j);
      Vec2 v = gf.grad.at(i, j);
      Mat2 h = flow_h(m, x, v, t, dc);
      Mat2 ginv = inverse(fundamental_tensor(m, x, v, t));
      Vec2 grad_phi = mul(ginv, dphi.at(i, j));
      lhs_integrand.values[k] = quad(h, v, grad_phi);

      JBreakdown jb = j_quantity(m, mu, gf, hess, i, j, t, dc);
      rhs_integrand.values[k] = phif.values[k] * jb.total;

      Mat2 h_raised = mul(mul(ginv, h), ginv);
      Vec2 w = mul(h_raised, gf.df.at(i, j));
      div_field.set(i, j, {phif.values[k] * w[0], phif.values[k] * w[1]});
    }
  });
  long long off_mask = 0;
  for (long long c : off_rows) off_mask += c;

  double lhs = integrate(lhs_integrand, mu);
  double rhs = integrate(rhs_integrand, mu);
  double div_term = integrate(divergence_mu(mu, div_field), mu);

  // Both signed integrals can vanish for symmetric scripts; normalize by the
  // quadrature of the absolute integrands instead.
  ScalarField abs_lhs = lhs_integrand, abs_rhs = rhs_integrand;
  for (double& v : abs_lhs.values) v = std::abs(v);
  for (double& v : abs_rhs.values) v = std::abs(v);
  double scale = std::max(integrate(abs_lhs, mu), integrate(abs_rhs, mu));

  ResidualReport report;
  report.tag = "defect-quadrature";
  report.sample_description =
      "quadrature over the torus, scripts " + f.name + " / " + phi.name;
  ResidualAccumulator acc;
  acc.add(lhs + rhs - div_term, {scale});
  acc.n = grid.nodes() - off_mask;
  report.headline = acc.level(grid.spacing(0));
  report.levels.push_back(report.headline);
  report.extras.emplace_back("lhs_integral", lhs);
  report.extras.emplace_back("rhs_integral", rhs);
  report.extras.emplace_back("divergence_correction", div_term);
  report.extras.emplace_back("off_mask_nodes", static_cast<double>(off_mask));
  if (off_mask > grid.nodes() / 20) {
    report.reliable = false;
    report.note = "mask complement exceeds 5% of nodes";
  }
  return report;
}

// ---------------------------------------------------------------------------
// Log-heat equation on trajectories
// ---------------------------------------------------------------------------

ResidualReport check_log_heat(const FlowTrajectory& traj, size_t stamp) {
  const GridSpec& grid = traj.grid;
  const FlowStamp& st = traj.at(stamp);
  size_t n = traj.size();

  ResidualReport report;
  report.tag = "log-heat";
  report.sample_description = "trajectory stamp t = " + std::to_string(st.time);

  // Time derivative of the stored f by the widest centered stencil available.
  std::vector<double> ft_fd;
  auto fval = [&](size_t s, int k) { return traj.at(s).f.values[k]; };
  bool one_sided = false;
  if (stamp >= 2 && stamp + 2 < n) {
    double d1 = traj.at(stamp + 1).time - st.time;
    double d2 = st.time - traj.at(stamp - 1).time;
    double d3 = traj.at(stamp + 2).time - traj.at(stamp + 1).time;
    double d4 = traj.at(stamp - 1).time - traj.at(stamp - 2).time;
    if (std::abs(d1 - d2) < 1e-12 && std::abs(d3 - d1) < 1e-12 &&
        std::abs(d4 - d1) < 1e-12) {
      ft_fd.assign(grid.nodes(), 0.0);
      for (int k = 0; k < grid.nodes(); ++k)
        ft_fd[k] = (-fval(stamp + 2, k) + 8.0 * fval(stamp + 1, k) -
                    8.0 * fval(stamp - 1, k) + fval(stamp - 2, k)) /
                   (12.0 * d1);
    }
  }
  if (ft_fd.empty()) {
    ft_fd.assign(grid.nodes(), 0.0);
    if (stamp >= 1 && stamp + 1 < n) {
      double dp = traj.at(stamp + 1).time - st.time;
      double dm = st.time - traj.at(stamp - 1).time;
      for (int k = 0; k < grid.nodes(); ++k) {
        double fp = fval(stamp + 1, k), f0 = fval(stamp, k),
               fm = fval(stamp - 1, k);
        ft_fd[k] = (dm * dm * fp + (dp * dp - dm * dm) * f0 - dp * dp * fm) /
                   (dp * dm * (dp + dm));
      }
    } else if (stamp + 1 < n) {
      one_sided = true;
      double dp = traj.at(stamp + 1).time - st.time;
      for (int k = 0; k < grid.nodes(); ++k)
        ft_fd[k] = (fval(stamp + 1, k) - fval(stamp, k)) / dp;
    } else if (stamp >= 1) {
      one_sided = true;
      double dm = st.time - traj.at(stamp - 1).time;
      for (int k = 0; k < grid.nodes(); ++k)
        ft_fd[k] = (fval(stamp, k) - fval(stamp - 1, k)) / dm;
    } else {
      fail(Error::Kind::Domain, "log-heat check needs at least two stamps");
    }
  }
  if (one_sided)
    report.note = "one-sided time differencing at a boundary stamp";

  std::vector<std::uint8_t> mask = robust_mask(grid, st.grad.df, 0.3, 4);
  ResidualAccumulator acc;
  for (int k = 0; k < grid.nodes(); ++k) {
    if (!mask[k]) continue;
    double rhs = st.f_t.values[k];
    acc.add(ft_fd[k] - rhs, {ft_fd[k], rhs});
  }
  report.headline = acc.level(grid.spacing(0));
  report.levels.push_back(report.headline);
  return report;
}

// ---------------------------------------------------------------------------
// Sigma and script-F equations on trajectories
// ---------------------------------------------------------------------------

EvolutionReports check_evolution_pdes(const FlowTrajectory& traj, double alpha,
                                      size_t stamp, const DiffConfig& dc) {
  if (!(alpha > 1.0))
    fail(Error::Kind::Domain, "evolution checks need alpha > 1");
  if (stamp < 1 || stamp + 1 >= traj.size())
    fail(Error::Kind::Domain,
         "evolution checks need an interior stamp with neighbors");

  const MetricFamily& m = *traj.metric;
  const MeasureSpec& mu = *traj.measure;
  const GridSpec& grid = traj.grid;
  const FlowStamp& st = traj.at(stamp);
  double t = st.time;

  bool five_point = stamp >= 2 && stamp + 2 < traj.size();
  double dt = traj.at(stamp + 1).time - t;
  size_t lo = five_point ? stamp - 2 : stamp - 1;
  size_t hi = five_point ? stamp + 2 : stamp + 1;
  for (size_t s = lo; s < hi; ++s) {
    double d = traj.at(s + 1).time - traj.at(s).time;
    if (std::abs(d - dt) > 1e-12)
      fail(Error::Kind::Domain,
           "evolution checks need uniformly spaced stamps around the target");
  }

  auto fields_at = [&](size_t s) { return sigma_f_fields(traj, alpha, s); };
  SigmaFFields c0 = fields_at(stamp);

  std::vector<double> dsigma_dt(grid.nodes()), dsf_dt(grid.nodes());
  if (five_point) {
    SigmaFFields p2 = fields_at(stamp + 2), p1 = fields_at(stamp + 1),
                 m1 = fields_at(stamp - 1), m2 = fields_at(stamp - 2);
    for (int k = 0; k < grid.nodes(); ++k) {
      dsigma_dt[k] = (-p2.sigma.values[k] + 8.0 * p1.sigma.values[k] -
                      8.0 * m1.sigma.values[k] + m2.sigma.values[k]) /
                     (12.0 * dt);
      dsf_dt[k] = (-p2.script_f.values[k] + 8.0 * p1.script_f.values[k] -
                   8.0 * m1.script_f.values[k] + m2.script_f.values[k]) /
                  (12.0 * dt);
    }
  } else {
    SigmaFFields p1 = fields_at(stamp + 1), m1 = fields_at(stamp - 1);
    for (int k = 0; k < grid.nodes(); ++k) {
      dsigma_dt[k] = (p1.sigma.values[k] - m1.sigma.values[k]) / (2.0 * dt);
      dsf_dt[k] = (p1.script_f.values[k] - m1.script_f.values[k]) / (2.0 * dt);
    }
  }

  ScalarField lin_sigma = linearized_laplacian(m, mu, st.grad.grad, c0.sigma, t);
  ScalarField lin_sf = linearized_laplacian(m, mu, st.grad.grad, c0.script_f, t);
  VectorField dsigma = differential(c0.sigma);
  VectorField dsf = differential(c0.script_f);

  ScalarField f_copy = st.f;
  HessianField hess(m, f_copy, st.grad, t, dc);
  // sigma and script-F inherit the jump of Delta f across the critical set;
  // stencils must not read the smeared band (3 nodes of cache pollution plus
  // 3 of stencil reach), and the margin has to stay fixed in chart units or
  // refinement creeps back toward the degeneracy.
  int guard = std::max(
      7, static_cast<int>(std::ceil(0.55 / grid.spacing(0))));
  std::vector<std::uint8_t> mask = robust_mask(grid, st.grad.df, 0.3, guard);

  std::vector<ResidualAccumulator> sig_rows(grid.resolution[0]);
  std::vector<ResidualAccumulator> sf_rows(grid.resolution[0]);
  parallel_rows(grid.resolution[0], [&](int i) {
    for (int j = 0; j < grid.resolution[1]; ++j) {
      int k = grid.index(i, j);
      if (!mask[k]) continue;
      Vec2 x = grid.node(i, j);
      Vec2 v = st.grad.grad.at(i, j);

      Mat2 h = flow_h(m, x, v, t, dc);
      double h_grad = quad(h, v, v);
      JBreakdown jb = j_quantity(m, mu, st.grad, hess, i, j, t, dc);

      double adv_s = 2.0 * dot(dsigma.at(i, j), v);
      double lhs_s =
          dsigma_dt[k] - lin_sigma.values[k] - adv_s - c0.sigma.values[k] / t;
      double rhs_s = 2.0 * t * (h_grad + jb.total);
      sig_rows[i].add(lhs_s - rhs_s, {dsigma_dt[k], lin_sigma.values[k], adv_s,
                                      c0.sigma.values[k] / t, rhs_s});

      HessianData hd = hess.at(i, j);
      MeasureGeometry geo = eval_measure_geometry(m, mu, x, v, t, dc);
      double adv_f = 2.0 * dot(dsf.at(i, j), v);
      double lhs_f =
          dsf_dt[k] - lin_sf.values[k] - adv_f - c0.script_f.values[k] / t;
      double rhs_f = -2.0 * t *
                     ((alpha - 1.0) * h_grad + geo.ric_inf() +
                      hd.hs_norm * hd.hs_norm + alpha * jb.total);
      sf_rows[i].add(lhs_f - rhs_f, {dsf_dt[k], lin_sf.values[k], adv_f,
                                     c0.script_f.values[k] / t, rhs_f});
    }
  });

  ResidualAccumulator acc_sigma, acc_sf;
  for (int i = 0; i < grid.resolution[0]; ++i) {
    acc_sigma.merge(sig_rows[i]);
    acc_sf.merge(sf_rows[i]);
  }

  EvolutionReports out;
  out.sigma.tag = "sigma-evolution";
  out.sigma.sample_description = "trajectory stamp t = " + std::to_string(t) +
                                 ", alpha = " + std::to_string(alpha);
  out.sigma.headline = acc_sigma.level(grid.spacing(0));
  out.sigma.levels.push_back(out.sigma.headline);
  out.script_f.tag = "scriptf-evolution";
  out.script_f.sample_description = out.sigma.sample_description;
  out.script_f.headline = acc_sf.level(grid.spacing(0));
  out.script_f.levels.push_back(out.script_f.headline);
  return out;
}

// ---------------------------------------------------------------------------
// Hessian trace inequality
// ---------------------------------------------------------------------------

ResidualReport check_hessian_trace_inequality(const FlowTrajectory& traj,
                                              size_t stamp, double N,
                                              const DiffConfig& dc) {
  if (!(N > 2.0))
    fail(Error::Kind::Domain, "hessian trace inequality needs N > n = 2");
  const MetricFamily& m = *traj.metric;
  const MeasureSpec& mu = *traj.measure;
  const GridSpec& grid = traj.grid;
  const FlowStamp& st = traj.at(stamp);
  double t = st.time;

  ScalarField f_copy = st.f;
  HessianField hess(m, f_copy, st.grad, t, dc);
  std::vector<std::uint8_t> mask = robust_mask(grid, st.grad.df, 0.3, 4);

  std::vector<double> row_min(grid.resolution[0],
                              std::numeric_limits<double>::infinity());
  std::vector<double> row_min_mid(grid.resolution[0],
                                  std::numeric_limits<double>::infinity());
  std::vector<long long> row_n(grid.resolution[0], 0);
  parallel_rows(grid.resolution[0], [&](int i) {
    for (int j = 0; j < grid.resolution[1]; ++j) {
      int k = grid.index(i, j);
      if (!mask[k]) continue;
      Vec2 x = grid.node(i, j);
      Vec2 v = st.grad.grad.at(i, j);
      HessianData hd = hess.at(i, j);
      SCurvatureData sc = s_curvature(m, mu, x, v, t, dc);
      // Delta f through the trace identity Delta f = tr Hessian - S keeps
      // the pointwise algebra of the inequality chain intact; the flux-form
      // Laplacian enters only through the separately reported slack.
      double lap_f = hd.trace - sc.S;
      double hs2 = hd.hs_norm * hd.hs_norm;
      double slack = hs2 - (lap_f * lap_f / N - sc.S * sc.S / (N - 2.0));
      double mid = hs2 - (lap_f + sc.S) * (lap_f + sc.S) / 2.0;
      row_min[i] = std::min(row_min[i], slack);
      row_min_mid[i] = std::min(row_min_mid[i], mid);
      ++row_n[i];
    }
  });
  double min_slack = std::numeric_limits<double>::infinity();
  double min_slack_mid = std::numeric_limits<double>::infinity();
  long long count = 0;
  for (int i = 0; i < grid.resolution[0]; ++i) {
    min_slack = std::min(min_slack, row_min[i]);
    min_slack_mid = std::min(min_slack_mid, row_min_mid[i]);
    count += row_n[i];
  }

  ResidualReport report;
  report.tag = "hessian-trace-inequality";
  report.sample_description =
      "min slack over mask nodes, stamp t = " + std::to_string(t);
  report.headline = ResidualLevel{grid.spacing(0), min_slack, 1.0, count};
  report.levels.push_back(report.headline);
  report.extras.emplace_back("min_slack", min_slack);
  report.extras.emplace_back("min_slack_mid_link", min_slack_mid);
  report.note = "headline sup_residual holds the minimum slack";
  return report;
}

}  // namespace finsler

#include "finsler/estimates.hpp"

#include <algorithm>
#include <cmath>

#include "finsler/flow_tensors.hpp"
#include "finsler/parallel.hpp"

namespace finsler {

void EstimateConfig::validate() const {
  if (!(alpha > 1.0))
    fail(Error::Kind::Config, "estimate section: alpha must be > 1");
  if (!(epsilon > 0.0))
    fail(Error::Kind::Config, "estimate section: epsilon must be > 0");
  if (!(N > 2.0))
    fail(Error::Kind::Config, "estimate section: N must be > n = 2");
}

HypothesisConstants estimate_constants(const MetricFamily& m,
                                       const MeasureSpec& mu,
                                       const GridSpec& grid,
                                       const std::vector<double>& times,
                                       double N,
                                       const EstimateSampling& sampling,
                                       const DiffConfig& dc) {
  if (sampling.directions < 16)
    fail(Error::Kind::Config, "constant estimation needs >= 16 directions");
  if (times.empty())
    fail(Error::Kind::Config, "constant estimation needs at least one time");
  if (!(N > 2.0)) fail(Error::Kind::Domain, "weighted Ricci needs N > n = 2");

  HypothesisConstants c;
  c.N = N;
  int stride = std::max(1, sampling.grid_stride);
  int rows = (grid.resolution[0] + stride - 1) / stride;

  struct Partial {
    double K = 0, Kp = 0, Kp_u = 0, L1 = 0, L2 = 0, L3 = 0;
    long long points = 0;
  };
  std::vector<Partial> parts(rows);

  for (double t : times) {
    parallel_rows(rows, [&](int r) {
      Partial& p = parts[r];
      int i = r * stride;
      for (int j = 0; j < grid.resolution[1]; j += stride) {
        Vec2 x = grid.node(i, j);
        ++p.points;
        for (const Vec2& y : sphere_sample(m, x, t, sampling.directions)) {
          MeasureGeometry geo = eval_measure_geometry(m, mu, x, y, t, dc);
          p.K = std::max(p.K, -geo.ric_weighted(N));

          Vec2 tau_h = distortion_horizontal(m, mu, x, y, t, dc);
          Mat2 gi = inverse(fundamental_tensor(m, x, y, t));
          Vec2 tau_grad = mul(gi, tau_h);
          double fn = m.norm(x, tau_grad, t);
          p.Kp = std::max(p.Kp, fn * fn);
          p.Kp_u = std::max(p.Kp_u, fn);

          if (!m.is_static()) {
            FlowTensorPackage ft = flow_tensor_suite(m, x, y, t, dc);
            Mat2 g = fundamental_tensor(m, x, y, t);
            p.L1 = std::max(p.L1, spectral_radius_pencil(g, ft.h));
            p.L2 = std::max(p.L2, ft.tr_dual);
            p.L3 = std::max(p.L3, ft.hs_vert);
          }
        }
      }
    });
  }

  for (const Partial& p : parts) {
    c.K = std::max(c.K, p.K);
    c.K_prime = std::max(c.K_prime, p.Kp);
    c.K_prime_unsquared = std::max(c.K_prime_unsquared, p.Kp_u);
    c.L1 = std::max(c.L1, p.L1);
    c.L2 = std::max(c.L2, p.L2);
    c.L3 = std::max(c.L3, p.L3);
  }
  c.K = std::max(c.K, 0.0);  // CD(-K,N) with K read as a nonnegative bound
  c.census_directions = sampling.directions;
  c.census_times = static_cast<long long>(times.size());
  c.census_points = static_cast<long long>(rows) *
                    ((grid.resolution[1] + stride - 1) / stride);
  return c;
}

double compute_q(const HypothesisConstants& c, double alpha, double epsilon,
                 double N) {
  if (!(alpha > 1.0) || !(epsilon > 0.0) || !(N > 2.0))
    fail(Error::Kind::Domain, "Q needs alpha > 1, epsilon > 0, N > n");
  double n = 2.0;
  return (c.K - epsilon) / (alpha - 1.0) +
         c.K_prime / (2.0 * (alpha - 1.0) * (N - n)) +
         (1.0 + std::sqrt(2.0 * (N - n + 4.0))) * c.L1 +
         std::sqrt(2.0 / (epsilon * N)) * c.L2 + std::sqrt(8.0 / N) * c.L3;
}

double compute_q_sharp_variant(const HypothesisConstants& c, double alpha,
                               double epsilon, double N) {
  if (!(alpha > 1.0) || !(epsilon > 0.0) || !(N > 2.0))
    fail(Error::Kind::Domain, "Q needs alpha > 1, epsilon > 0, N > n");
  double n = 2.0;
  return (c.K - epsilon) / (alpha - 1.0) +
         c.K_prime / (2.0 * (alpha - 1.0) * (N - n)) +
         (1.0 + std::sqrt(2.0 * n * (N - n + 4.0) / N)) * c.L1 +
         std::sqrt(2.0 / (epsilon * N)) * c.L2 + std::sqrt(8.0 / N) * c.L3;
}

std::pair<double, double> q_min_over_epsilon(const HypothesisConstants& c,
                                             double alpha, double N,
                                             double eps_reference,
                                             int points) {
  double hi = std::max(c.K, eps_reference);
  double lo = std::max(1e-6, hi * 1e-4);
  double best_eps = lo, best_q = compute_q(c, alpha, lo, N);
  for (int k = 1; k < points; ++k) {
    double eps = lo * std::pow(hi / lo, static_cast<double>(k) / (points - 1));
    double q = compute_q(c, alpha, eps, N);
    if (q < best_q) {
      best_q = q;
      best_eps = eps;
    }
  }
  return {best_eps, best_q};
}

MarginReport gradient_estimate_check(const FlowTrajectory& traj,
                                     const HypothesisConstants& constants,
                                     const EstimateConfig& config) {
  config.validate();
  MarginReport rep;
  rep.tag = "gradient-estimate";
  rep.constants = constants;
  rep.alpha = config.alpha;
  rep.epsilon = config.epsilon;
  rep.N = config.N;
  rep.q_used = compute_q(constants, config.alpha, config.epsilon, config.N);
  rep.q_sharp_variant =
      compute_q_sharp_variant(constants, config.alpha, config.epsilon, config.N);

  double a = config.alpha, N = config.N;
  rep.min_margin = std::numeric_limits<double>::infinity();
  rep.rhs_scale = 0.0;

  const GridSpec& grid = traj.grid;
  for (size_t s = 0; s < traj.size(); ++s) {
    const FlowStamp& st = traj.at(s);
    double rhs = N * a * a / st.time + 0.5 * N * a * a * rep.q_used;
    rep.rhs_scale = std::max(rep.rhs_scale, std::abs(rhs));
    StampMargin sm;
    sm.time = st.time;
    sm.min_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid.resolution[0]; ++i)
      for (int j = 0; j < grid.resolution[1]; ++j) {
        int k = grid.index(i, j);
        double fn = st.grad.fnorm.values[k];
        double lhs = fn * fn - a * st.f_t.values[k];
        double margin = rhs - lhs;
        if (margin < sm.min_margin) {
          sm.min_margin = margin;
          sm.argmin_i = i;
          sm.argmin_j = j;
        }
      }
    rep.per_stamp.push_back(sm);
    if (sm.min_margin < rep.min_margin) {
      rep.min_margin = sm.min_margin;
      rep.argmin = sm;
    }
  }
  rep.tolerance = 1e-6 * std::max(rep.rhs_scale, 1.0);
  rep.pass = rep.min_margin >= -rep.tolerance;
  return rep;
}

std::vector<HarnackPair> draw_harnack_pairs(const FlowTrajectory& traj,
                                            int count, std::uint64_t seed,
                                            double min_dt, double max_dt,
                                            int curve_samples) {
  std::vector<std::pair<size_t, size_t>> stamp_pairs;
  for (size_t a = 0; a < traj.size(); ++a)
    for (size_t b = a + 1; b < traj.size(); ++b) {
      double dt = traj.at(b).time - traj.at(a).time;
      if (dt >= min_dt - 1e-12 && dt <= max_dt + 1e-12)
        stamp_pairs.emplace_back(a, b);
    }
  if (stamp_pairs.empty())
    fail(Error::Kind::Config,
         "no stamp pairs with t2 - t1 in the requested window");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<size_t> pick(0, stamp_pairs.size() - 1);
  const GridSpec& g = traj.grid;

  std::vector<HarnackPair> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    auto [s1, s2] = stamp_pairs[pick(rng)];
    HarnackPair p;
    p.stamp1 = s1;
    p.stamp2 = s2;
    p.x1 = {u01(rng) * g.period[0], u01(rng) * g.period[1]};
    p.x2 = {u01(rng) * g.period[0], u01(rng) * g.period[1]};
    p.curve_samples = curve_samples;
    out.push_back(p);
  }
  return out;
}

MarginReport harnack_check(const FlowTrajectory& traj,
                           const HypothesisConstants& constants,
                           const EstimateConfig& config,
                           const std::vector<HarnackPair>& pairs) {
  config.validate();
  const MetricFamily& m = *traj.metric;
  MarginReport rep;
  rep.tag = "harnack";
  rep.constants = constants;
  rep.alpha = config.alpha;
  rep.epsilon = config.epsilon;
  rep.N = config.N;
  rep.q_used = compute_q(constants, config.alpha, config.epsilon, config.N);
  rep.q_sharp_variant =
      compute_q_sharp_variant(constants, config.alpha, config.epsilon, config.N);
  rep.min_margin = std::numeric_limits<double>::infinity();
  rep.rhs_scale = 0.0;

  double a = config.alpha, N = config.N;
  const GridSpec& g = traj.grid;

  for (const HarnackPair& p : pairs) {
    if (p.stamp1 >= traj.size() || p.stamp2 >= traj.size())
      fail(Error::Kind::Config, "Harnack pair references a missing stamp");
    double t1 = traj.at(p.stamp1).time;
    double t2 = traj.at(p.stamp2).time;
    if (!(t1 < t2))
      fail(Error::Kind::Domain, "Harnack check needs t1 < t2");

    // Shortest periodic image of x1 as seen from x2.
    Vec2 x1 = p.x1;
    for (int axis = 0; axis < 2; ++axis) {
      double d = x1[axis] - p.x2[axis];
      double per = g.period[axis];
      d -= per * std::round(d / per);
      x1[axis] = p.x2[axis] + d;
    }

    CurveSpec curve = straight_curve(p.x2, x1, t1, t2, p.curve_samples);
    double energy = curve_length(curve, m, 2);

    double u1 = interpolate(traj.at(p.stamp1).u, p.x1);
    double u2 = interpolate(traj.at(p.stamp2).u, p.x2);
    double log_rhs = std::log(u2) + N * a * std::log(t2 / t1) +
                     0.25 * a * energy / (t2 - t1) +
                     0.5 * N * a * rep.q_used * (t2 - t1);
    double margin = log_rhs - std::log(u1);

    StampMargin sm;
    sm.time = t2 - t1;
    sm.min_margin = margin;
    rep.per_stamp.push_back(sm);
    rep.rhs_scale = std::max(rep.rhs_scale, std::abs(log_rhs));
    if (margin < rep.min_margin) {
      rep.min_margin = margin;
      rep.argmin = sm;
    }
  }
  rep.tolerance = 1e-6 * std::max(rep.rhs_scale, 1.0);
  rep.pass = rep.min_margin >= -rep.tolerance;
  return rep;
}

StaticReductionRecord static_reduction_compare(
    const FlowTrajectory& traj, const HypothesisConstants& constants,
    const EstimateConfig& config) {
  if (!traj.metric->is_static())
    fail(Error::Kind::Domain,
         "static reduction comparison requires a static metric family");
  StaticReductionRecord rec;
  rec.estimated = gradient_estimate_check(traj, constants, config);
  HypothesisConstants forced = constants;
  forced.L1 = 0.0;
  forced.L2 = 0.0;
  forced.L3 = 0.0;
  rec.forced = gradient_estimate_check(traj, forced, config);
  rec.max_margin_difference = 0.0;
  for (size_t s = 0; s < rec.estimated.per_stamp.size(); ++s)
    rec.max_margin_difference = std::max(
        rec.max_margin_difference,
        std::abs(rec.estimated.per_stamp[s].min_margin -
                 rec.forced.per_stamp[s].min_margin));
  return rec;
}

}  // namespace finsler

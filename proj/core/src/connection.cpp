#include "finsler/connection.hpp"

#include <cmath>

namespace finsler {

ConnectionData eval_connection(const MetricFamily& m, const Vec2& x,
                               const Vec2& y, double t, const DiffConfig& dc) {
  if (y[0] == 0.0 && y[1] == 0.0)
    fail(Error::Kind::Domain, "connection undefined at y = 0");
  ConnectionData out;
  out.spray = spray(m, x, y, t, dc);
  out.nonlinear = nonlinear_connection(m, x, y, t, dc);
  out.chern = chern_connection(m, x, y, t, dc);
  return out;
}

namespace {

struct State {
  Vec2 x;
  Vec2 y;
};

State rk4_step(const MetricFamily& m, const State& s, double t, double h,
               const DiffConfig& dc) {
  auto rhs = [&](const State& q) -> State {
    Vec2 g = spray(m, q.x, q.y, t, dc);
    return {q.y, {-2.0 * g[0], -2.0 * g[1]}};
  };
  State k1 = rhs(s);
  State k2 = rhs({s.x + 0.5 * h * k1.x, s.y + 0.5 * h * k1.y});
  State k3 = rhs({s.x + 0.5 * h * k2.x, s.y + 0.5 * h * k2.y});
  State k4 = rhs({s.x + h * k3.x, s.y + h * k3.y});
  double w = h / 6.0;
  return {s.x + w * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
          s.y + w * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y)};
}

}  // namespace

GeodesicPath integrate_geodesic(const MetricFamily& m, const Vec2& x0,
                                const Vec2& y0, double t, double step,
                                int steps, const DiffConfig& dc) {
  if (y0[0] == 0.0 && y0[1] == 0.0)
    fail(Error::Kind::Domain, "geodesic needs a nonzero initial direction");
  GeodesicPath path;
  path.step = step;
  path.x.reserve(steps + 1);
  path.y.reserve(steps + 1);
  State s{x0, y0};
  path.x.push_back(s.x);
  path.y.push_back(s.y);
  double f0 = m.norm(x0, y0, t);
  for (int k = 0; k < steps; ++k) {
    s = rk4_step(m, s, t, step, dc);
    path.x.push_back(s.x);
    path.y.push_back(s.y);
  }
  double f1 = m.norm(s.x, s.y, t);
  double arclength = std::abs(step) * steps * f0;
  if (arclength > 0.0) {
    double drift = std::abs(f1 - f0) / std::max(f0, 1e-300) / arclength;
    if (drift > 1e-4)
      fail(Error::Kind::Integration,
           "geodesic step too large: F drift per unit arclength = " +
               std::to_string(drift));
  }
  return path;
}

SCurvatureData s_curvature(const MetricFamily& m, const MeasureSpec& mu,
                           const Vec2& x, const Vec2& y, double t,
                           const DiffConfig& dc) {
  double d = dc.geodesic_step;
  double tau_s[5];  // tau at s = -2d, -d, 0, d, 2d along the geodesic
  tau_s[2] = distortion(m, mu, x, y, t);

  State fwd{x, y};
  State bwd{x, y};
  for (int k = 1; k <= 2; ++k) {
    fwd = rk4_step(m, fwd, t, d, dc);
    bwd = rk4_step(m, bwd, t, -d, dc);
    tau_s[2 + k] = distortion(m, mu, fwd.x, fwd.y, t);
    tau_s[2 - k] = distortion(m, mu, bwd.x, bwd.y, t);
  }

  SCurvatureData out;
  out.tau = tau_s[2];
  out.S = (-tau_s[4] + 8.0 * tau_s[3] - 8.0 * tau_s[1] + tau_s[0]) / (12.0 * d);
  out.Sdot = (-tau_s[4] + 16.0 * tau_s[3] - 30.0 * tau_s[2] +
              16.0 * tau_s[1] - tau_s[0]) /
             (12.0 * d * d);
  return out;
}

std::vector<Vec2> sphere_sample(const MetricFamily& m, const Vec2& x, double t,
                                int count) {
  if (count < 1) fail(Error::Kind::Domain, "sphere_sample: count must be >= 1");
  std::vector<Vec2> out;
  out.reserve(count);
  const double two_pi = 6.283185307179586476925286766559;
  for (int k = 0; k < count; ++k) {
    double th = two_pi * k / count;
    Vec2 e{std::cos(th), std::sin(th)};
    double f = m.norm(x, e, t);
    out.push_back({e[0] / f, e[1] / f});
  }
  return out;
}

}  // namespace finsler

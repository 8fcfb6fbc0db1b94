#include "finsler/point_data.hpp"

#include <cmath>

namespace finsler {

SphereBundlePointData evaluate_point(const MetricFamily& m,
                                     const MeasureSpec& mu, const Vec2& x,
                                     const Vec2& y, double t, double N,
                                     const DiffConfig& dc) {
  SphereBundlePointData p;
  p.x = x;
  p.y = y;
  p.t = t;

  FundamentalData fd = eval_fundamental(m, x, y, t);
  p.g = fd.g;
  p.g_inv = fd.g_inv;
  p.cartan = fd.cartan;
  p.F2 = m.f_squared(x, y, t);
  p.F = std::sqrt(p.F2);

  ConnectionData cd = eval_connection(m, x, y, t, dc);
  p.spray = cd.spray;
  p.nonlinear = cd.nonlinear;
  p.chern = cd.chern;

  p.curvature = chern_curvature(m, x, y, t, dc);
  MeasureGeometry geo = eval_measure_geometry(m, mu, x, y, t, dc);
  p.ric = geo.ric;
  p.tau = geo.tau;
  p.S = geo.S;
  p.Sdot = geo.Sdot;
  p.ric_n = ric_weighted(geo, N);

  p.flow = flow_tensor_suite(m, x, y, t, dc);
  return p;
}

}  // namespace finsler

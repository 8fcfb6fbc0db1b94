#include "finsler/legendre.hpp"

#include <cmath>
#include <string>

#include "finsler/connection.hpp"
#include "finsler/parallel.hpp"

namespace finsler {

Vec2 legendre_transform(const MetricFamily& m, const Vec2& x, double t,
                        const Vec2& xi, const LegendreSolveConfig& cfg,
                        const Vec2* warm) {
  cfg.validate();
  if (xi[0] == 0.0 && xi[1] == 0.0) return {0.0, 0.0};

  Vec2 y;
  if (warm && !(warm->at(0) == 0.0 && warm->at(1) == 0.0)) {
    y = *warm;
  } else if (cfg.seed == LegendreSolveConfig::Seed::MetricRaise) {
    y = mul(inverse(fundamental_tensor(m, x, cfg.reference, t)), xi);
  } else {
    y = xi;
  }
  if (y[0] == 0.0 && y[1] == 0.0) y = xi;

  double xi_scale = std::max(norm2(xi), 1e-300);
  auto residual = [&](const Vec2& yy) -> Vec2 {
    Vec2 gy = half_dF2_dy(m, x, yy, t);  // g_{ij}(y) y^j
    return {gy[0] - xi[0], gy[1] - xi[1]};
  };

  Vec2 r = residual(y);
  double rn = norm2(r);
  for (int it = 0; it < cfg.max_iterations; ++it) {
    if (rn <= cfg.tolerance * xi_scale) return y;
    Mat2 g = fundamental_tensor(m, x, y, t);
    Vec2 step = solve_spd(g, {-r[0], -r[1]});
    double damp = 1.0;
    for (int tries = 0; tries < 8; ++tries) {
      Vec2 cand{y[0] + damp * step[0], y[1] + damp * step[1]};
      Vec2 rc = residual(cand);
      double rcn = norm2(rc);
      if (rcn < rn || tries == 7) {
        y = cand;
        r = rc;
        rn = rcn;
        break;
      }
      damp *= 0.5;
    }
  }
  if (rn <= cfg.tolerance * xi_scale) return y;
  fail(Error::Kind::Solver,
       "Legendre Newton did not converge: residual " + std::to_string(rn) +
           " after " + std::to_string(cfg.max_iterations) + " iterations");
}

FieldGradient gradient_field(const MetricFamily& m, ScalarField& f, double t,
                             const LegendreSolveConfig& cfg) {
  const GridSpec& g = f.grid;
  FieldGradient out;
  out.df = differential(f);
  build_mask(f, out.df);
  out.grad = VectorField(g, t);
  out.fnorm = ScalarField(g, t);
  out.fdual = ScalarField(g, t);

  // Warm starts are carried along each row only, so the result is identical
  // no matter how rows are distributed over threads.
  parallel_rows(g.resolution[0], [&](int i) {
    Vec2 warm{0.0, 0.0};
    for (int j = 0; j < g.resolution[1]; ++j) {
      int k = g.index(i, j);
      if (!f.mask[k]) {
        warm = {0.0, 0.0};
        continue;
      }
      Vec2 x = g.node(i, j);
      Vec2 xi = out.df.at(i, j);
      Vec2 y;
      try {
        y = legendre_transform(m, x, t, xi, cfg, &warm);
      } catch (const Error& e) {
        fail(e.kind(), std::string(e.what()) + " at node (" +
                           std::to_string(i) + "," + std::to_string(j) + ")");
      }
      warm = y;
      out.grad.set(i, j, y);
      out.fnorm.values[k] = m.norm(x, y, t);
      out.fdual.values[k] = m.dual_norm(x, xi, t);
    }
  });
  return out;
}

LinearizedMetric linearized_metric(const MetricFamily& m, const Vec2& x,
                                   double t, const Vec2& v) {
  if (v[0] == 0.0 && v[1] == 0.0)
    fail(Error::Kind::Domain, "linearized metric needs a nonzero reference");
  LinearizedMetric out;
  out.g = fundamental_tensor(m, x, v, t);
  out.g_inv = inverse(out.g);
  return out;
}

HessianField::HessianField(const MetricFamily& m, const ScalarField& f,
                           const FieldGradient& gf, double t,
                           const DiffConfig& dc)
    : m_(m), f_(f), gf_(gf), t_(t), dc_(dc) {
  d11_ = fd_derivative(f, 0, 2);
  d22_ = fd_derivative(f, 1, 2);
  ScalarField d1 = fd_derivative(f, 0, 1);
  d12_ = fd_derivative(d1, 1, 1);
  mask_ = f.mask;
  if (mask_.empty())
    fail(Error::Kind::Domain, "HessianField needs a masked field");
}

HessianData HessianField::at(int i, int j) const {
  const GridSpec& g = f_.grid;
  int k = g.index(i, j);
  if (!mask_[k])
    fail(Error::Kind::Domain,
         "Hessian with reference vector undefined off the mask (node " +
             std::to_string(i) + "," + std::to_string(j) + ")");

  Vec2 x = g.node(i, j);
  Vec2 v = gf_.grad.at(i, j);
  Ten3 gamma = chern_connection(m_, x, v, t_, dc_);
  Vec2 df = gf_.df.at(i, j);

  Mat2 hess{};
  Mat2 d2{{{d11_.values[k], d12_.values[k]}, {d12_.values[k], d22_.values[k]}}};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      double corr = 0.0;
      for (int c = 0; c < 2; ++c) corr += gamma[c][a][b] * df[c];
      hess[a][b] = d2[a][b] - corr;
    }

  Mat2 ginv = inverse(fundamental_tensor(m_, x, v, t_));
  double hs2 = 0.0, tr = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      tr += ginv[a][b] * hess[a][b];
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d)
          hs2 += ginv[a][c] * ginv[b][d] * hess[a][b] * hess[c][d];
    }

  HessianData out;
  out.reference = v;
  out.hess = hess;
  out.hs_norm = std::sqrt(std::max(hs2, 0.0));
  out.trace = tr;
  return out;
}

}  // namespace finsler

#include "finsler/flow_tensors.hpp"

#include <cmath>

namespace finsler {

TensorEvaluator flow_h_evaluator(const MetricFamily& m, const DiffConfig& dc) {
  return TensorEvaluator(
      "ll",
      [&m, dc](const Vec2& x, const Vec2T<Dual1>& y, double t) {
        Mat2T<Dual1> h = flow_h(m, x, y, t, dc);
        return std::vector<Dual1>{h[0][0], h[0][1], h[1][0], h[1][1]};
      },
      3);
}

FlowTensorPackage flow_tensor_suite(const MetricFamily& m, const Vec2& x,
                                    const Vec2& y, double t,
                                    const DiffConfig& dc) {
  if (y[0] == 0.0 && y[1] == 0.0)
    fail(Error::Kind::Domain, "flow tensors undefined at y = 0");

  FlowTensorPackage out;
  Mat2 g = fundamental_tensor(m, x, y, t);
  Mat2 gi = inverse(g);
  double f2 = m.f_squared(x, y, t);

  out.h = flow_h(m, x, y, t, dc);
  out.h_y = quad(out.h, y, y);
  out.H = out.h_y / f2;
  out.h_raised = mul(mul(gi, out.h), gi);

  if (!m.is_static()) {
    // h_{ij|k} through the generic horizontal derivative.
    ChernDerivatives d =
        chern_derivatives(m, flow_h_evaluator(m, dc), x, y, t, dc);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          out.h_hor[i][j][k] = d.horizontal[(i * 2 + j) * 2 + k];

    // h^{ij}_{;k} = F dh^{ij}/dy^k via a dual lift of the raised form.
    double f = std::sqrt(f2);
    for (int k = 0; k < 2; ++k) {
      Mat2T<Dual1> hr = flow_h_raised(m, x, lift(y, k), t, dc);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) out.h_raised_vert[i][j][k] = f * hr[i][j].d;
    }
  }

  for (int j = 0; j < 2; ++j) {
    double acc = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k) acc += gi[i][k] * out.h_hor[i][j][k];
    out.tr_form[j] = acc;
  }

  double hs2 = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          hs2 += gi[i][a] * gi[j][b] * out.h[i][j] * out.h[a][b];
  out.hs_h = std::sqrt(std::max(hs2, 0.0));

  // ||dot-nabla h-flat||^2 = g_{ij} g_{kl} g^{mh} h^{ik}_{;m} h^{jl}_{;h}
  double hv2 = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          for (int mm = 0; mm < 2; ++mm)
            for (int hh = 0; hh < 2; ++hh)
              hv2 += g[i][j] * g[k][l] * gi[mm][hh] *
                     out.h_raised_vert[i][k][mm] * out.h_raised_vert[j][l][hh];
  out.hs_vert = std::sqrt(std::max(hv2, 0.0));

  out.tr_dual = m.dual_norm(x, out.tr_form, t);
  return out;
}

Vec2 distortion_horizontal(const MetricFamily& m, const MeasureSpec& mu,
                           const Vec2& x, const Vec2& y, double t,
                           const DiffConfig& dc) {
  // d tau/dx by 5-point difference; the fiber correction is the mean Cartan
  // torsion, which dual numbers give exactly.
  Vec2 dtdx{};
  for (int k = 0; k < 2; ++k) {
    dtdx[k] = central5(
        [&](double e) {
          Vec2 xs = x;
          xs[k] += e;
          return distortion(m, mu, xs, y, t);
        },
        dc.x_step);
  }
  Vec2 mc = mean_cartan(m, x, y, t);
  Mat2 ncon = nonlinear_connection(m, x, y, t, dc);
  Vec2 out{};
  for (int k = 0; k < 2; ++k)
    out[k] = dtdx[k] - ncon[0][k] * mc[0] - ncon[1][k] * mc[1];
  return out;
}

JBreakdown j_quantity(const MetricFamily& m, const MeasureSpec& mu,
                      const FieldGradient& gf, const HessianField& hess,
                      int i, int j, double t, const DiffConfig& dc) {
  if (!hess.on_mask(i, j))
    fail(Error::Kind::Domain, "J undefined off the mask (node " +
                                  std::to_string(i) + "," + std::to_string(j) +
                                  ")");
  const GridSpec& grid = gf.grad.grid;
  Vec2 x = grid.node(i, j);
  Vec2 v = gf.grad.at(i, j);
  Vec2 df = gf.df.at(i, j);

  FlowTensorPackage ft = flow_tensor_suite(m, x, v, t, dc);
  HessianData hd = hess.at(i, j);
  Mat2 ginv = inverse(fundamental_tensor(m, x, v, t));
  double f = m.norm(x, v, t);

  JBreakdown out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) out.hessian_term += ft.h_raised[a][b] * hd.hess[b][a];

  // h^{ij}_{|i} f_j = (tr_V nabla^V h)_V applied to nabla f.
  out.divergence_term = dot(ft.tr_form, v);

  // (1/F) h^{ij}_{;k} f^k_{|i} f_j with f^k_{|i} = g^{kl} f_{l|i}.
  Mat2 hess_raised{};
  for (int k = 0; k < 2; ++k)
    for (int a = 0; a < 2; ++a) {
      double acc = 0.0;
      for (int l = 0; l < 2; ++l) acc += ginv[k][l] * hd.hess[l][a];
      hess_raised[k][a] = acc;
    }
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int k = 0; k < 2; ++k)
        out.vertical_term +=
            ft.h_raised_vert[a][b][k] * hess_raised[k][a] * df[b] / f;

  Vec2 tau_h = distortion_horizontal(m, mu, x, v, t, dc);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      out.distortion_term -= ft.h_raised[a][b] * df[a] * tau_h[b];

  out.total = out.hessian_term + out.divergence_term + out.vertical_term +
              out.distortion_term;
  return out;
}

}  // namespace finsler

#include "finsler/laplacian.hpp"

#include <cmath>

namespace finsler {

ScalarField divergence_mu(const MeasureSpec& mu, const VectorField& v) {
  const GridSpec& g = v.grid;
  ScalarField out(g, v.time);

  for (int axis = 0; axis < 2; ++axis) {
    ScalarField weighted(g, v.time);
    for (int i = 0; i < g.resolution[0]; ++i)
      for (int j = 0; j < g.resolution[1]; ++j) {
        int k = g.index(i, j);
        weighted.values[k] =
            v.comp[axis][k] * std::exp(mu.phi(g.node(i, j)));
      }
    ScalarField d = fd_derivative(weighted, axis, 1);
    for (int k = 0; k < g.nodes(); ++k) out.values[k] += d.values[k];
  }
  if (!mu.is_lebesgue()) {
    for (int i = 0; i < g.resolution[0]; ++i)
      for (int j = 0; j < g.resolution[1]; ++j) {
        int k = g.index(i, j);
        out.values[k] *= std::exp(-mu.phi(g.node(i, j)));
      }
  }
  return out;
}

ScalarField finsler_laplacian(const MetricFamily& m, const MeasureSpec& mu,
                              ScalarField& u, double t,
                              const LegendreSolveConfig& cfg) {
  FieldGradient gf = gradient_field(m, u, t, cfg);
  return divergence_mu(mu, gf.grad);
}

ScalarField finsler_laplacian(const MeasureSpec& mu, const FieldGradient& gf) {
  return divergence_mu(mu, gf.grad);
}

ScalarField linearized_laplacian(const MetricFamily& m, const MeasureSpec& mu,
                                 const VectorField& reference,
                                 const ScalarField& v, double t) {
  const GridSpec& g = v.grid;
  VectorField dv = differential(v);
  VectorField flux(g, v.time);
  for (int i = 0; i < g.resolution[0]; ++i)
    for (int j = 0; j < g.resolution[1]; ++j) {
      Vec2 ref = reference.at(i, j);
      if (ref[0] == 0.0 && ref[1] == 0.0) {
        flux.set(i, j, {0.0, 0.0});
        continue;
      }
      Mat2 ginv = inverse(fundamental_tensor(m, g.node(i, j), ref, t));
      flux.set(i, j, mul(ginv, dv.at(i, j)));
    }
  return divergence_mu(mu, flux);
}

}  // namespace finsler

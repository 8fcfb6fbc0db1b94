#pragma once

// Fiberwise tensors at a single sphere-bundle point, all derived from F^2 by
// nested dual-number differentiation in y. Templated on the fiber scalar so
// these can themselves be differentiated once more.

#include "finsler/dual.hpp"
#include "finsler/error.hpp"
#include "finsler/measure.hpp"
#include "finsler/metric.hpp"
#include "finsler/smallvec.hpp"

namespace finsler {

// Lift y one dual level, seeding direction `dir`.
template <class T>
Vec2T<Dual<T>> lift(const Vec2T<T>& y, int dir) {
  Vec2T<Dual<T>> out{Dual<T>(y[0]), Dual<T>(y[1])};
  out[dir].d = T(1.0);
  return out;
}

// Half the fiber gradient of F^2; equals g_{ij} y^j by Euler's relation.
template <class T>
Vec2T<T> half_dF2_dy(const MetricFamily& m, const Vec2& x, const Vec2T<T>& y,
                     double t) {
  Vec2T<T> out{};
  for (int i = 0; i < 2; ++i)
    out[i] = 0.5 * m.f_squared(x, lift(y, i), t).d;
  return out;
}

// Fundamental tensor g_{ij} = 1/2 d^2 F^2 / dy^i dy^j.
template <class T>
Mat2T<T> fundamental_tensor(const MetricFamily& m, const Vec2& x,
                            const Vec2T<T>& y, double t) {
  Mat2T<T> g{};
  for (int i = 0; i < 2; ++i) {
    for (int j = i; j < 2; ++j) {
      T gij = 0.5 * m.f_squared(x, lift(lift(y, i), j), t).d.d;
      g[i][j] = gij;
      g[j][i] = gij;
    }
  }
  return g;
}

// Cartan tensor C_{ijk} = 1/4 d^3 F^2 / dy^i dy^j dy^k (totally symmetric).
template <class T>
Ten3T<T> cartan_tensor(const MetricFamily& m, const Vec2& x, const Vec2T<T>& y,
                       double t) {
  Ten3T<T> c{};
  for (int i = 0; i < 2; ++i) {
    for (int j = i; j < 2; ++j) {
      for (int k = j; k < 2; ++k) {
        T v = 0.25 * m.f_squared(x, lift(lift(lift(y, i), j), k), t).d.d.d;
        c[i][j][k] = v;
        c[i][k][j] = v;
        c[j][i][k] = v;
        c[j][k][i] = v;
        c[k][i][j] = v;
        c[k][j][i] = v;
      }
    }
  }
  return c;
}

// Distortion tau = 1/2 log det g - Phi.
template <class T>
T distortion(const MetricFamily& m, const MeasureSpec& mu, const Vec2& x,
             const Vec2T<T>& y, double t) {
  Mat2T<T> g = fundamental_tensor(m, x, y, t);
  return 0.5 * log(det(g)) - mu.phi(x);
}

// Fiber gradient of tau: d tau / d y^m = g^{ij} C_{ijm} (the mean Cartan
// torsion; Phi does not depend on y).
inline Vec2 mean_cartan(const MetricFamily& m, const Vec2& x, const Vec2& y,
                        double t) {
  Mat2 ginv = inverse(fundamental_tensor(m, x, y, t));
  Ten3 c = cartan_tensor(m, x, y, t);
  Vec2 out{};
  for (int mm = 0; mm < 2; ++mm)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out[mm] += ginv[i][j] * c[i][j][mm];
  return out;
}

struct FundamentalData {
  Mat2 g;
  Mat2 g_inv;
  Ten3 cartan;
};

// g, its inverse and the Cartan tensor with domain and admissibility checks.
FundamentalData eval_fundamental(const MetricFamily& m, const Vec2& x,
                                 const Vec2& y, double t);

}  // namespace finsler

#pragma once

// Spray, nonlinear connection and Chern connection coefficients, plus the
// geodesic integrator and the S-curvature stencil built on it.
//
// The spray comes from the variational formula
//   G^i = 1/4 g^{il} ( d^2F^2/dx^k dy^l y^k - dF^2/dx^l ),
// which needs no prior connection; G^i = 1/2 Gamma^i_{jk} y^j y^k is then a
// testable identity instead of a dependency. x-derivatives are 5-point
// central differences; y-derivatives ride on dual numbers.

#include <vector>

#include "finsler/fiber.hpp"
#include "finsler/numdiff.hpp"

namespace finsler {

template <class T>
Vec2T<T> spray(const MetricFamily& m, const Vec2& x, const Vec2T<T>& y,
               double t, const DiffConfig& dc = {}) {
  Mat2T<T> ginv = inverse(fundamental_tensor(m, x, y, t));

  Vec2T<T> dF2dx{};
  Mat2T<T> dAdx{};  // dAdx[l][k] = d A_l / d x^k, A_l = 1/2 dF^2/dy^l
  for (int k = 0; k < 2; ++k) {
    auto shift = [&](double e) {
      Vec2 xs = x;
      xs[k] += e;
      return xs;
    };
    dF2dx[k] = central5(
        [&](double e) { return m.f_squared(shift(e), y, t); }, dc.x_step);
    Vec2T<T> dA = central5(
        [&](double e) { return half_dF2_dy(m, shift(e), y, t); }, dc.x_step);
    for (int l = 0; l < 2; ++l) dAdx[l][k] = dA[l];
  }

  Vec2T<T> rhs{};
  for (int l = 0; l < 2; ++l)
    rhs[l] = 2.0 * (dAdx[l][0] * y[0] + dAdx[l][1] * y[1]) - dF2dx[l];

  Vec2T<T> g_out{};
  for (int i = 0; i < 2; ++i)
    g_out[i] = 0.25 * (ginv[i][0] * rhs[0] + ginv[i][1] * rhs[1]);
  return g_out;
}

// N^i_j = dG^i/dy^j.
template <class T>
Mat2T<T> nonlinear_connection(const MetricFamily& m, const Vec2& x,
                              const Vec2T<T>& y, double t,
                              const DiffConfig& dc = {}) {
  Mat2T<T> n{};
  for (int j = 0; j < 2; ++j) {
    Vec2T<Dual<T>> gd = spray(m, x, lift(y, j), t, dc);
    for (int i = 0; i < 2; ++i) n[i][j] = gd[i].d;
  }
  return n;
}

// Gamma^i_{jk} = 1/2 g^{il} ( dg_{lj}/dx|^k + dg_{lk}/dx|^j - dg_{jk}/dx|^l )
// with dg/dx| the horizontal (delta) derivative. Stored as gamma[i][j][k].
template <class T>
Ten3T<T> chern_connection(const MetricFamily& m, const Vec2& x,
                          const Vec2T<T>& y, double t,
                          const DiffConfig& dc = {}) {
  Mat2T<T> ginv = inverse(fundamental_tensor(m, x, y, t));
  Ten3T<T> cartan = cartan_tensor(m, x, y, t);
  Mat2T<T> ncon = nonlinear_connection(m, x, y, t, dc);

  // delta g_{ab} / delta x^k = d g_{ab}/dx^k - N^m_k * 2 C_{abm}
  Ten3T<T> dg{};
  for (int k = 0; k < 2; ++k) {
    Mat2T<T> dgdx = central5(
        [&](double e) {
          Vec2 xs = x;
          xs[k] += e;
          return fundamental_tensor(m, xs, y, t);
        },
        dc.x_step);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        T corr = ncon[0][k] * cartan[a][b][0] + ncon[1][k] * cartan[a][b][1];
        dg[a][b][k] = dgdx[a][b] - 2.0 * corr;
      }
  }

  Ten3T<T> gamma{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        T acc{};
        for (int l = 0; l < 2; ++l)
          acc += ginv[i][l] * (dg[l][j][k] + dg[l][k][j] - dg[j][k][l]);
        gamma[i][j][k] = 0.5 * acc;
      }
  return gamma;
}

struct ConnectionData {
  Vec2 spray;              // G^i
  Mat2 nonlinear;          // N^i_j
  Ten3 chern;              // Gamma^i_{jk}
};

ConnectionData eval_connection(const MetricFamily& m, const Vec2& x,
                               const Vec2& y, double t,
                               const DiffConfig& dc = {});

struct GeodesicPath {
  std::vector<Vec2> x;
  std::vector<Vec2> y;
  double step = 0.0;
};

// Classical RK4 on (x' = y, y' = -2G(x,y)); F is a first integral and its
// drift beyond 1e-4 marks the step as too coarse.
GeodesicPath integrate_geodesic(const MetricFamily& m, const Vec2& x0,
                                const Vec2& y0, double t, double step,
                                int steps, const DiffConfig& dc = {});

struct SCurvatureData {
  double tau = 0.0;
  double S = 0.0;
  double Sdot = 0.0;
};

// S = d(tau o gamma)/ds at s=0 and its second derivative, from a 5-point
// stencil of tau along the geodesic through (x, y) at frozen flow time t.
SCurvatureData s_curvature(const MetricFamily& m, const MeasureSpec& mu,
                           const Vec2& x, const Vec2& y, double t,
                           const DiffConfig& dc = {});

// Angularly equispaced directions rescaled so F(x,y;t) = 1 for each sample.
std::vector<Vec2> sphere_sample(const MetricFamily& m, const Vec2& x, double t,
                                int count);

}  // namespace finsler

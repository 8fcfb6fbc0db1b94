#include "finsler/curvature.hpp"

#include <cmath>

namespace finsler {

Ten4 chern_curvature(const MetricFamily& m, const Vec2& x, const Vec2& y,
                     double t, const DiffConfig& dc) {
  if (y[0] == 0.0 && y[1] == 0.0)
    fail(Error::Kind::Domain, "curvature undefined at y = 0");

  Ten3 gamma = chern_connection(m, x, y, t, dc);
  Mat2 ncon = nonlinear_connection(m, x, y, t, dc);

  // dGamma/dx^k by an outer 5-point difference (Gamma itself contains an
  // inner x difference, hence the wider step), dGamma/dy^m by dual lift.
  Ten4 dgdx{};  // dgdx[k] = dGamma/dx^k
  for (int k = 0; k < 2; ++k) {
    dgdx[k] = central5(
        [&](double e) {
          Vec2 xs = x;
          xs[k] += e;
          return chern_connection(m, xs, y, t, dc);
        },
        dc.gamma_step);
  }
  Ten4 dgdy{};  // dgdy[mm] = dGamma/dy^mm
  for (int mm = 0; mm < 2; ++mm) {
    Ten3T<Dual1> gd = chern_connection(m, x, lift(y, mm), t, dc);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) dgdy[mm][i][j][k] = gd[i][j][k].d;
  }

  // delta Gamma^i_{jl} / delta x^k
  auto dgamma = [&](int i, int j, int l, int k) {
    return dgdx[k][i][j][l] - ncon[0][k] * dgdy[0][i][j][l] -
           ncon[1][k] * dgdy[1][i][j][l];
  };

  Ten4 r{};
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          double comm = 0.0;
          for (int mm = 0; mm < 2; ++mm)
            comm += gamma[i][k][mm] * gamma[mm][j][l] -
                    gamma[i][l][mm] * gamma[mm][j][k];
          r[j][i][k][l] = dgamma(i, j, l, k) - dgamma(i, j, k, l) + comm;
        }
  return r;
}

Mat2 curvature_operator(const Ten4& r, const Vec2& y) {
  Mat2 out{};
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) {
      double acc = 0.0;
      for (int j = 0; j < 2; ++j)
        for (int l = 0; l < 2; ++l) acc += y[j] * r[j][i][k][l] * y[l];
      out[i][k] = acc;
    }
  return out;
}

Mat2 spray_curvature(const MetricFamily& m, const Vec2& x, const Vec2& y,
                     double t, const DiffConfig& dc) {
  if (y[0] == 0.0 && y[1] == 0.0)
    fail(Error::Kind::Domain, "curvature undefined at y = 0");

  Vec2 g0 = spray(m, x, y, t, dc);

  Mat2 dGdx{};  // dGdx[i][k]
  for (int k = 0; k < 2; ++k) {
    Vec2 d = central5(
        [&](double e) {
          Vec2 xs = x;
          xs[k] += e;
          return spray(m, xs, y, t, dc);
        },
        dc.gamma_step);
    for (int i = 0; i < 2; ++i) dGdx[i][k] = d[i];
  }

  Mat2 dGdy{};  // dGdy[i][j] = N^i_j
  for (int j = 0; j < 2; ++j) {
    Vec2T<Dual1> gd = spray(m, x, lift(y, j), t, dc);
    for (int i = 0; i < 2; ++i) dGdy[i][j] = gd[i].d;
  }

  // d2G[i][j][k] = d^2 G^i / dy^j dy^k
  Ten3 d2Gdydy{};
  for (int j = 0; j < 2; ++j)
    for (int k = j; k < 2; ++k) {
      Vec2T<Dual2> gd = spray(m, x, lift(lift(y, j), k), t, dc);
      for (int i = 0; i < 2; ++i) {
        d2Gdydy[i][j][k] = gd[i].d.d;
        d2Gdydy[i][k][j] = gd[i].d.d;
      }
    }

  // d2G[i][j][k] = d^2 G^i / dx^j dy^k
  Ten3 d2Gdxdy{};
  for (int j = 0; j < 2; ++j) {
    Mat2 d = central5(
        [&](double e) {
          Vec2 xs = x;
          xs[j] += e;
          Mat2 n{};
          for (int k = 0; k < 2; ++k) {
            Vec2T<Dual1> gd = spray(m, xs, lift(Vec2{y[0], y[1]}, k), t, dc);
            for (int i = 0; i < 2; ++i) n[i][k] = gd[i].d;
          }
          return n;
        },
        dc.gamma_step);
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k) d2Gdxdy[i][j][k] = d[i][k];
  }

  Mat2 r{};
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) {
      double acc = 2.0 * dGdx[i][k];
      for (int j = 0; j < 2; ++j) {
        acc -= y[j] * d2Gdxdy[i][j][k];
        acc += 2.0 * g0[j] * d2Gdydy[i][j][k];
        acc -= dGdy[i][j] * dGdy[j][k];
      }
      r[i][k] = acc;
    }
  return r;
}

namespace {

double flag_from_operator(const Mat2& rop, const Mat2& g, double f2,
                          const Vec2& y, const Vec2& u) {
  Vec2 ru = mul(rop, u);
  double num = quad(g, ru, u);
  double den = f2 * quad(g, u, u) - quad(g, y, u) * quad(g, y, u);
  return num / den;
}

}  // namespace

double flag_curvature(const MetricFamily& m, const Vec2& x, const Vec2& y,
                      const Vec2& u, double t, const DiffConfig& dc) {
  double cross = y[0] * u[1] - y[1] * u[0];
  if (std::abs(cross) <= 1e-12 * (norm2(y) * norm2(u)))
    fail(Error::Kind::Domain,
         "flag curvature undefined for u parallel to the pole y");
  Mat2 g = fundamental_tensor(m, x, y, t);
  double f2 = m.f_squared(x, y, t);
  Mat2 rop = curvature_operator(chern_curvature(m, x, y, t, dc), y);
  return flag_from_operator(rop, g, f2, y, u);
}

double ricci(const MetricFamily& m, const Vec2& x, const Vec2& y, double t,
             const DiffConfig& dc) {
  if (y[0] == 0.0 && y[1] == 0.0)
    fail(Error::Kind::Domain, "Ricci undefined at y = 0");
  Mat2 g = fundamental_tensor(m, x, y, t);
  double f2 = m.f_squared(x, y, t);
  double f = std::sqrt(f2);

  // Complete y/F to a g_y-orthonormal frame: project a rotated seed.
  Vec2 yf{y[0] / f, y[1] / f};
  Vec2 w{-y[1], y[0]};
  double c = quad(g, yf, w);
  Vec2 e{w[0] - c * yf[0], w[1] - c * yf[1]};
  double en = std::sqrt(quad(g, e, e));
  e = {e[0] / en, e[1] / en};

  Mat2 rop = curvature_operator(chern_curvature(m, x, y, t, dc), y);
  return f2 * flag_from_operator(rop, g, f2, y, e);
}

CurvatureData eval_curvature(const MetricFamily& m, const Vec2& x,
                             const Vec2& y, double t,
                             std::optional<Vec2> flag_direction,
                             const DiffConfig& dc) {
  if (m.smoothness() < 4)
    fail(Error::Kind::Domain,
         "curvature needs four nestable derivatives; the metric promises " +
             std::to_string(m.smoothness()));
  CurvatureData out;
  out.chern = chern_curvature(m, x, y, t, dc);
  out.ric = ricci(m, x, y, t, dc);
  if (flag_direction)
    out.flag = flag_curvature(m, x, y, *flag_direction, t, dc);
  return out;
}

double MeasureGeometry::ric_weighted(double N) const {
  return ric + Sdot - S * S / (N - 2.0);
}

MeasureGeometry eval_measure_geometry(const MetricFamily& m,
                                      const MeasureSpec& mu, const Vec2& x,
                                      const Vec2& y, double t,
                                      const DiffConfig& dc) {
  MeasureGeometry out;
  SCurvatureData s = s_curvature(m, mu, x, y, t, dc);
  out.tau = s.tau;
  out.S = s.S;
  out.Sdot = s.Sdot;
  out.ric = ricci(m, x, y, t, dc);
  return out;
}

double ric_weighted(const MeasureGeometry& geo, double N) {
  if (!(N > 2.0))
    fail(Error::Kind::Domain, "weighted Ricci needs N > n = 2");
  return geo.ric_weighted(N);
}

}  // namespace finsler

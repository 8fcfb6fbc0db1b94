#pragma once

// Chern Riemannian curvature, flag curvature, Finslerian Ricci and the
// measure-weighted Ricci bounds.

#include <limits>
#include <optional>

#include "finsler/connection.hpp"

namespace finsler {

template <class T>
using Ten4T = std::array<Ten3T<T>, 2>;
using Ten4 = Ten4T<double>;  // R[j][i][k][l] = R_j^i_{kl}

// R_j^i_{kl} = dGamma^i_{jl}/dx|^k - dGamma^i_{jk}/dx|^l
//              + Gamma^i_{km} Gamma^m_{jl} - Gamma^i_{lm} Gamma^m_{jk}.
Ten4 chern_curvature(const MetricFamily& m, const Vec2& x, const Vec2& y,
                     double t, const DiffConfig& dc = {});

// y^j R_j^i_{kl} y^l, the curvature operator R^i_k with pole y.
Mat2 curvature_operator(const Ten4& r, const Vec2& y);

// Independent route: R^i_k straight from the spray,
//   R^i_k = 2 dG^i/dx^k - y^j d2G^i/dx^j dy^k + 2 G^j d2G^i/dy^j dy^k
//           - dG^i/dy^j dG^j/dy^k.
Mat2 spray_curvature(const MetricFamily& m, const Vec2& x, const Vec2& y,
                     double t, const DiffConfig& dc = {});

// Flag curvature K(y,u) = g_y(R_y u, u) / (F^2 g_y(u,u) - g_y(y,u)^2).
double flag_curvature(const MetricFamily& m, const Vec2& x, const Vec2& y,
                      const Vec2& u, double t, const DiffConfig& dc = {});

// Ric(y) = F^2(y) * sum of flag curvatures over a g_y-orthonormal frame
// completing y/F(y); in dimension two a single flag.
double ricci(const MetricFamily& m, const Vec2& x, const Vec2& y, double t,
             const DiffConfig& dc = {});

struct CurvatureData {
  Ten4 chern;
  double ric = 0.0;
  std::optional<double> flag;
};

CurvatureData eval_curvature(const MetricFamily& m, const Vec2& x,
                             const Vec2& y, double t,
                             std::optional<Vec2> flag_direction = std::nullopt,
                             const DiffConfig& dc = {});

struct MeasureGeometry {
  double tau = 0.0;
  double S = 0.0;
  double Sdot = 0.0;
  double ric = 0.0;

  double ric_inf() const { return ric + Sdot; }
  // 2-homogeneous extension of Def. Ric^k; the k = n branch collapses to
  // -infinity as soon as S is resolvably nonzero.
  double ric_n_branch(double s_tol = 1e-8) const {
    if (std::abs(S) > s_tol) return -std::numeric_limits<double>::infinity();
    return ric + Sdot;
  }
  double ric_weighted(double N) const;
};

// tau, S, S-dot and Ric bundled; N enters only through ric_weighted and must
// exceed the dimension there.
MeasureGeometry eval_measure_geometry(const MetricFamily& m,
                                      const MeasureSpec& mu, const Vec2& x,
                                      const Vec2& y, double t,
                                      const DiffConfig& dc = {});

// Convenience: Ric^N directly, validating N > n.
double ric_weighted(const MeasureGeometry& geo, double N);

}  // namespace finsler

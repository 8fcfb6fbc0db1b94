#pragma once

// The geometric-flow tensor h = -1/2 dg/dt and everything the evolution
// lemmata contract it with: the raised form, the traced 1-form of its
// horizontal derivative, the vertical derivative of the raised form, and
// their Hilbert-Schmidt norms. The commutator defect J of the linearized
// Laplacian along the flow is assembled from the same pieces.

#include "finsler/chern_derivative.hpp"
#include "finsler/curvature.hpp"
#include "finsler/legendre.hpp"

namespace finsler {

// h_{ij}(x,y,t) by 5-point central time differencing of g; identically zero
// for static families.
template <class T>
Mat2T<T> flow_h(const MetricFamily& m, const Vec2& x, const Vec2T<T>& y,
                double t, const DiffConfig& dc = {}) {
  if (m.is_static()) return Mat2T<T>{};
  return (-0.5) *
         central5([&](double e) { return fundamental_tensor(m, x, y, t + e); },
                  dc.t_step);
}

// h^{ij} = g^{ik} h_{kl} g^{lj}, templated so a dual lift yields dh^{ij}/dy.
template <class T>
Mat2T<T> flow_h_raised(const MetricFamily& m, const Vec2& x, const Vec2T<T>& y,
                       double t, const DiffConfig& dc = {}) {
  Mat2T<T> gi = inverse(fundamental_tensor(m, x, y, t));
  return mul(mul(gi, flow_h(m, x, y, t, dc)), gi);
}

struct FlowTensorPackage {
  Mat2 h{};             // h_{ij}
  double h_y = 0.0;     // h(y) = h_{ij} y^i y^j
  double H = 0.0;       // h(y) / F^2
  Mat2 h_raised{};      // h^{ij}
  Ten3 h_hor{};         // h_{ij|k}
  Vec2 tr_form{};       // (tr_V nabla^V h)_V = g^{ik} h_{ij|k} dx^j
  Ten3 h_raised_vert{}; // h^{ij}_{;k}
  double hs_h = 0.0;    // ||h_V||_{HS(V)}
  double hs_vert = 0.0; // ||(dot-nabla h-flat)_V||_{HS(V)}
  double tr_dual = 0.0; // F*((tr_V nabla^V h)_V)
};

FlowTensorPackage flow_tensor_suite(const MetricFamily& m, const Vec2& x,
                                    const Vec2& y, double t,
                                    const DiffConfig& dc = {});

// h_{ij} as a tensor evaluator for the generic Chern-derivative machinery.
TensorEvaluator flow_h_evaluator(const MetricFamily& m, const DiffConfig& dc);

struct JBreakdown {
  double hessian_term = 0.0;     // h^{ij} f_{j|i}
  double divergence_term = 0.0;  // h^{ij}_{|i} f_j
  double vertical_term = 0.0;    // (1/F) h^{ij}_{;k} f^k_{|i} f_j
  double distortion_term = 0.0;  // -h^{ij} f_i tau_{|j}
  double total = 0.0;
};

// J(f,h,F,mu) at one mask node, every tensor referenced at V = nabla f.
JBreakdown j_quantity(const MetricFamily& m, const MeasureSpec& mu,
                      const FieldGradient& gf, const HessianField& hess,
                      int i, int j, double t, const DiffConfig& dc = {});

// Horizontal derivative of the distortion, tau_{|k} at (x,y,t).
Vec2 distortion_horizontal(const MetricFamily& m, const MeasureSpec& mu,
                           const Vec2& x, const Vec2& y, double t,
                           const DiffConfig& dc = {});

}  // namespace finsler

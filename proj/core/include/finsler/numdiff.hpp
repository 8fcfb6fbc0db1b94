#pragma once

// Finite-difference steps for base-manifold (x) and flow-time (t) derivatives.
// Fiber (y) derivatives never go through here; they use dual numbers.

#include <array>

namespace finsler {

struct DiffConfig {
  // 5-point stencil step for x-derivatives of closed-form quantities (F^2, g).
  double x_step = 1e-3;
  // Outer step when differentiating quantities that contain an inner x
  // difference themselves (the connection, for curvature assembly).
  double gamma_step = 1e-2;
  // Step for horizontal derivatives of black-box tensor evaluators, which may
  // carry t-difference noise inside.
  double tensor_step = 2e-2;
  // Flow-time step for h = -1/2 dg/dt.
  double t_step = 1e-5;
  // Arclength step of the 5-point geodesic stencil for S and S-dot.
  double geodesic_step = 1e-3;
};

// 4th-order central first derivative of f at 0: f evaluated at -2h..2h.
// Works for any V with +, -, scalar *.
template <class F>
auto central5(F&& f, double h) {
  auto fp1 = f(h);
  auto fm1 = f(-h);
  auto fp2 = f(2.0 * h);
  auto fm2 = f(-2.0 * h);
  return (1.0 / (12.0 * h)) * (8.0 * (fp1 - fm1) - (fp2 - fm2));
}

// 4th-order central second derivative, 5-point.
template <class F>
auto central5_second(F&& f, double h) {
  auto f0 = f(0.0);
  auto fp1 = f(h);
  auto fm1 = f(-h);
  auto fp2 = f(2.0 * h);
  auto fm2 = f(-2.0 * h);
  return (1.0 / (12.0 * h * h)) *
         (16.0 * (fp1 + fm1) - (fp2 + fm2) - 30.0 * f0);
}

// Plain 2nd-order central difference; the identity checks refine this step
// to measure convergence order.
template <class F>
auto central3(F&& f, double h) {
  return (1.0 / (2.0 * h)) * (f(h) - f(-h));
}

}  // namespace finsler

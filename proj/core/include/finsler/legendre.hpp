#pragma once

// Legendre transform, Finsler gradient fields, direction-frozen metrics and
// Chern Hessians with their Hilbert-Schmidt norms.
//
// The transform solves g_{ij}(x,y,t) y^j = xi_i by damped Newton iteration;
// the Jacobian of y -> g(y) y is exactly g(y) because the Cartan contraction
// with y vanishes, so every step is a single SPD 2x2 solve.

#include "finsler/fiber.hpp"
#include "finsler/grid.hpp"
#include "finsler/numdiff.hpp"

namespace finsler {

struct LegendreSolveConfig {
  double tolerance = 1e-12;  // on the residual norm, relative to |xi|
  int max_iterations = 50;
  enum class Seed { EuclideanRaise, MetricRaise } seed = Seed::EuclideanRaise;
  Vec2 reference{1.0, 0.0};  // used by MetricRaise

  void validate() const {
    if (!(tolerance > 0.0))
      fail(Error::Kind::Config, "Legendre tolerance must be positive");
    if (max_iterations < 8)
      fail(Error::Kind::Config, "Legendre max iterations must be >= 8");
  }
};

// Vector y with g(y) y = xi; returns 0 for xi = 0. `warm` short-circuits the
// seeding policy when the caller tracks a nearby solution.
Vec2 legendre_transform(const MetricFamily& m, const Vec2& x, double t,
                        const Vec2& xi, const LegendreSolveConfig& cfg = {},
                        const Vec2* warm = nullptr);

struct FieldGradient {
  VectorField df;     // spatial differential
  VectorField grad;   // nabla f, zero off the mask
  ScalarField fnorm;  // F(nabla f)
  ScalarField fdual;  // F*(df), closed-form co-norm route
};

// Differential, mask, and nodewise Legendre solves (row-major warm start).
// Sets f's mask as a side effect.
FieldGradient gradient_field(const MetricFamily& m, ScalarField& f, double t,
                             const LegendreSolveConfig& cfg = {});

// Fundamental tensor frozen at reference direction V.
struct LinearizedMetric {
  Mat2 g;
  Mat2 g_inv;
};
LinearizedMetric linearized_metric(const MetricFamily& m, const Vec2& x,
                                   double t, const Vec2& v);

struct HessianData {
  Vec2 reference;    // V = nabla f at the node
  Mat2 hess;         // f_{i|j}(V)
  double hs_norm;    // ||nabla^2 f||_{HS(V)}
  double trace;      // tr_V nabla^2 f = g^{ij}(V) f_{i|j}
};

// Grid-level context: second-derivative fields are differenced once, the
// connection is evaluated per node at the gradient direction.
class HessianField {
 public:
  HessianField(const MetricFamily& m, const ScalarField& f,
               const FieldGradient& gf, double t, const DiffConfig& dc = {});

  // Chern Hessian at a mask node; off-mask requests are a domain error.
  HessianData at(int i, int j) const;
  bool on_mask(int i, int j) const {
    return mask_[f_.grid.index(i, j)] != 0;
  }

 private:
  const MetricFamily& m_;
  ScalarField f_;
  const FieldGradient& gf_;
  double t_;
  DiffConfig dc_;
  ScalarField d11_, d12_, d22_;
  std::vector<std::uint8_t> mask_;
};

}  // namespace finsler

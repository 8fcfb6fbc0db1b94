#pragma once

// Cached tensor package at a single sphere-bundle point (x, y, t): metric,
// connection, curvature, measure geometry and flow tensors in one immutable
// record. Heavy; pointwise loops use the individual evaluators instead.

#include "finsler/curvature.hpp"
#include "finsler/flow_tensors.hpp"

namespace finsler {

struct SphereBundlePointData {
  Vec2 x{};
  Vec2 y{};
  double t = 0.0;

  double F = 0.0;
  double F2 = 0.0;
  Mat2 g{};
  Mat2 g_inv{};
  Ten3 cartan{};
  Vec2 spray{};
  Mat2 nonlinear{};
  Ten3 chern{};
  Ten4 curvature{};
  double ric = 0.0;
  double tau = 0.0;
  double S = 0.0;
  double Sdot = 0.0;
  double ric_n = 0.0;  // at the N handed to the builder
  FlowTensorPackage flow{};
};

SphereBundlePointData evaluate_point(const MetricFamily& m,
                                     const MeasureSpec& mu, const Vec2& x,
                                     const Vec2& y, double t, double N,
                                     const DiffConfig& dc = {});

}  // namespace finsler

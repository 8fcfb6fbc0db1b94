#pragma once

// Curve specifications and Simpson-rule length/energy quadrature along
// prescribed curves, with the metric sampled at the Harnack time
// interpolation xi(s) = (1-s) t2 + s t1.

#include <functional>

#include "finsler/metric.hpp"

namespace finsler {

struct CurveSpec {
  Vec2 x_start{};  // eta(0) = x2
  Vec2 x_end{};    // eta(1) = x1
  int samples = 65;
  double t1 = 0.0;  // earlier time, reached at s = 1
  double t2 = 0.0;  // later time, at s = 0
  // Optional path override; defaults to the straight chart segment. Must
  // reproduce the endpoints.
  std::function<Vec2(double)> path;

  Vec2 at(double s) const {
    if (path) return path(s);
    return {x_start[0] + s * (x_end[0] - x_start[0]),
            x_start[1] + s * (x_end[1] - x_start[1])};
  }
  // Time along the curve. The flow slice interpolates linearly from t2 down
  // to t1 so that xi(0) = t2 and xi(1) = t1.
  double xi(double s) const { return (1.0 - s) * t2 + s * t1; }
};

CurveSpec straight_curve(const Vec2& x2, const Vec2& x1, double t1, double t2,
                         int samples = 65);

// Simpson quadrature of F^power along the curve; power 1 is the Finsler
// length, power 2 the curve energy entering the Harnack exponent.
double curve_length(const CurveSpec& curve, const MetricFamily& metric,
                    int power);

}  // namespace finsler

#include "finsler/curve.hpp"

#include <cmath>

#include "finsler/error.hpp"

namespace finsler {

CurveSpec straight_curve(const Vec2& x2, const Vec2& x1, double t1, double t2,
                         int samples) {
  CurveSpec c;
  c.x_start = x2;
  c.x_end = x1;
  c.t1 = t1;
  c.t2 = t2;
  c.samples = samples;
  return c;
}

namespace {

Vec2 velocity(const CurveSpec& c, double s) {
  if (!c.path)
    return {c.x_end[0] - c.x_start[0], c.x_end[1] - c.x_start[1]};
  // Central difference on the path callback, one-sided at the ends.
  const double h = 1e-6;
  double lo = std::max(0.0, s - h);
  double hi = std::min(1.0, s + h);
  Vec2 a = c.path(lo), b = c.path(hi);
  return {(b[0] - a[0]) / (hi - lo), (b[1] - a[1]) / (hi - lo)};
}

}  // namespace

double curve_length(const CurveSpec& curve, const MetricFamily& metric,
                    int power) {
  if (power != 1 && power != 2)
    fail(Error::Kind::Domain, "curve_length: power must be 1 or 2");
  if (curve.samples < 32)
    fail(Error::Kind::Config, "curve sample count must be >= 32");

  // Validate configured endpoints.
  Vec2 p0 = curve.at(0.0), p1 = curve.at(1.0);
  if (std::abs(p0[0] - curve.x_start[0]) + std::abs(p0[1] - curve.x_start[1]) >
          1e-12 ||
      std::abs(p1[0] - curve.x_end[0]) + std::abs(p1[1] - curve.x_end[1]) >
          1e-12)
    fail(Error::Kind::Config, "curve path does not reproduce its endpoints");

  int n = curve.samples;
  if (n % 2 == 0) ++n;  // composite Simpson needs an odd sample count
  double h = 1.0 / (n - 1);

  auto integrand = [&](double s) {
    Vec2 v = velocity(curve, s);
    double f = metric.norm(curve.at(s), v, curve.xi(s));
    return power == 1 ? f : f * f;
  };

  double acc = integrand(0.0) + integrand(1.0);
  for (int k = 1; k < n - 1; ++k)
    acc += integrand(k * h) * (k % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace finsler

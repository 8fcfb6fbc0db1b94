#include "finsler/grid.hpp"

#include <algorithm>
#include <cmath>

#include "finsler/measure.hpp"

namespace finsler {

GridSpec build_grid(std::array<int, 2> resolution, std::array<double, 2> period) {
  for (int a = 0; a < 2; ++a) {
    if (resolution[a] < 16)
      fail(Error::Kind::Config,
           "grid resolution must be >= 16 per axis, got " +
               std::to_string(resolution[a]) + " on axis " + std::to_string(a + 1));
    if (!(period[a] > 0.0))
      fail(Error::Kind::Config, "grid period must be positive on axis " +
                                    std::to_string(a + 1));
  }
  GridSpec g;
  g.resolution = resolution;
  g.period = period;
  return g;
}

ScalarField sample(const GridSpec& grid, double time,
                   const std::function<double(Vec2)>& f) {
  ScalarField out(grid, time);
  for (int i = 0; i < grid.resolution[0]; ++i)
    for (int j = 0; j < grid.resolution[1]; ++j)
      out.at(i, j) = f(grid.node(i, j));
  return out;
}

namespace {

// 6th-order central stencils; exactness degree covers the polynomial content
// of the identity checks and leaves their residuals dominated by the
// identities themselves, not by differencing.
constexpr double kD1[7] = {-1.0 / 60.0, 3.0 / 20.0, -3.0 / 4.0, 0.0,
                           3.0 / 4.0,  -3.0 / 20.0, 1.0 / 60.0};
constexpr double kD2[7] = {1.0 / 90.0, -3.0 / 20.0, 3.0 / 2.0, -49.0 / 18.0,
                           3.0 / 2.0,  -3.0 / 20.0, 1.0 / 90.0};

}  // namespace

ScalarField fd_derivative(const ScalarField& field, int axis, int order) {
  if (axis < 0 || axis > 1)
    fail(Error::Kind::Domain, "fd_derivative: axis out of range");
  if (order != 1 && order != 2)
    fail(Error::Kind::Domain, "fd_derivative: order must be 1 or 2");

  const GridSpec& g = field.grid;
  double h = g.spacing(axis);
  double scale = order == 1 ? 1.0 / h : 1.0 / (h * h);
  const double* w = order == 1 ? kD1 : kD2;

  ScalarField out(g, field.time);
  for (int i = 0; i < g.resolution[0]; ++i) {
    for (int j = 0; j < g.resolution[1]; ++j) {
      double acc = 0.0;
      for (int s = -3; s <= 3; ++s) {
        double c = w[s + 3];
        if (c == 0.0) continue;
        acc += c * (axis == 0 ? field.at(i + s, j) : field.at(i, j + s));
      }
      out.at(i, j) = acc * scale;
    }
  }
  return out;
}

VectorField differential(const ScalarField& field) {
  VectorField df(field.grid, field.time);
  for (int axis = 0; axis < 2; ++axis) {
    ScalarField d = fd_derivative(field, axis, 1);
    df.comp[axis] = std::move(d.values);
  }
  return df;
}

void build_mask(ScalarField& field, const VectorField& df, double tol) {
  if (tol <= 0.0) tol = 1e-10 * sup_abs(field.values);
  field.mask_tolerance = tol;
  field.mask.assign(field.grid.nodes(), 0);
  for (int k = 0; k < field.grid.nodes(); ++k) {
    double n = std::hypot(df.comp[0][k], df.comp[1][k]);
    field.mask[k] = n > tol ? 1 : 0;
  }
}

std::vector<std::uint8_t> erode_mask(const GridSpec& grid,
                                     const std::vector<std::uint8_t>& mask,
                                     int radius) {
  std::vector<std::uint8_t> out(grid.nodes(), 0);
  for (int i = 0; i < grid.resolution[0]; ++i) {
    for (int j = 0; j < grid.resolution[1]; ++j) {
      bool keep = true;
      for (int a = -radius; a <= radius && keep; ++a)
        for (int b = -radius; b <= radius && keep; ++b)
          if (mask[grid.index(i + a, j + b)] == 0) keep = false;
      out[grid.index(i, j)] = keep ? 1 : 0;
    }
  }
  return out;
}

namespace {

double kahan_total(const std::vector<double>& terms) {
  double sum = 0.0, c = 0.0;
  for (double t : terms) {
    double y = t - c;
    double s = sum + y;
    c = (s - sum) - y;
    sum = s;
  }
  return sum;
}

}  // namespace

double integrate(const ScalarField& field, const MeasureSpec& measure) {
  const GridSpec& g = field.grid;
  double cell = g.spacing(0) * g.spacing(1);
  std::vector<double> terms;
  terms.reserve(g.nodes());
  for (int i = 0; i < g.resolution[0]; ++i)
    for (int j = 0; j < g.resolution[1]; ++j)
      terms.push_back(field.at(i, j) * std::exp(measure.phi(g.node(i, j))));
  return kahan_total(terms) * cell;
}

double integrate_raw(const ScalarField& field) {
  double cell = field.grid.spacing(0) * field.grid.spacing(1);
  return kahan_total(field.values) * cell;
}

namespace {

// Cubic Lagrange weights on nodes {-1,0,1,2} at fractional offset u in [0,1).
void cubic_weights(double u, double w[4]) {
  w[0] = -u * (u - 1.0) * (u - 2.0) / 6.0;
  w[1] = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
  w[2] = -(u + 1.0) * u * (u - 2.0) / 2.0;
  w[3] = (u + 1.0) * u * (u - 1.0) / 6.0;
}

}  // namespace

double interpolate(const ScalarField& field, const Vec2& x) {
  const GridSpec& g = field.grid;
  double wi[4], wj[4];
  double fi = x[0] / g.spacing(0);
  double fj = x[1] / g.spacing(1);
  int i0 = static_cast<int>(std::floor(fi));
  int j0 = static_cast<int>(std::floor(fj));
  cubic_weights(fi - i0, wi);
  cubic_weights(fj - j0, wj);
  double acc = 0.0;
  for (int a = -1; a <= 2; ++a)
    for (int b = -1; b <= 2; ++b)
      acc += wi[a + 1] * wj[b + 1] * field.at(i0 + a, j0 + b);
  return acc;
}

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace finsler

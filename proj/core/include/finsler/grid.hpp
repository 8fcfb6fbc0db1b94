#pragma once

// Periodic chart of the 2-torus: grid layout, finite-difference calculus and
// quadrature. Everything else in the engine samples fields on this chart.

#include <cstdint>
#include <functional>
#include <vector>

#include "finsler/error.hpp"
#include "finsler/smallvec.hpp"

namespace finsler {

struct GridSpec {
  std::array<int, 2> resolution{64, 64};
  std::array<double, 2> period{6.283185307179586476925286766559, 6.283185307179586476925286766559};

  double spacing(int axis) const { return period[axis] / resolution[axis]; }
  int nodes() const { return resolution[0] * resolution[1]; }

  int wrap(int i, int axis) const {
    int n = resolution[axis];
    i %= n;
    return i < 0 ? i + n : i;
  }
  int index(int i, int j) const {
    return wrap(i, 0) * resolution[1] + wrap(j, 1);
  }
  Vec2 node(int i, int j) const {
    return {i * spacing(0), j * spacing(1)};
  }

  bool operator==(const GridSpec&) const = default;
};

// Minimum resolution keeps stencil and quadrature error in the regime the
// identity checks assume.
GridSpec build_grid(std::array<int, 2> resolution, std::array<double, 2> period);

struct ScalarField {
  GridSpec grid;
  double time = 0.0;
  std::vector<double> values;
  // Discrete M_f: true where the differential is resolvable. Empty until a
  // gradient-type operation fills it.
  std::vector<std::uint8_t> mask;
  double mask_tolerance = 0.0;

  ScalarField() = default;
  explicit ScalarField(const GridSpec& g, double t = 0.0)
      : grid(g), time(t), values(g.nodes(), 0.0) {}

  double& at(int i, int j) { return values[grid.index(i, j)]; }
  double at(int i, int j) const { return values[grid.index(i, j)]; }
  bool on_mask(int i, int j) const {
    return !mask.empty() && mask[grid.index(i, j)] != 0;
  }
};

struct VectorField {
  GridSpec grid;
  double time = 0.0;
  std::vector<double> comp[2];

  VectorField() = default;
  explicit VectorField(const GridSpec& g, double t = 0.0) : grid(g), time(t) {
    comp[0].assign(g.nodes(), 0.0);
    comp[1].assign(g.nodes(), 0.0);
  }
  Vec2 at(int i, int j) const {
    int k = grid.index(i, j);
    return {comp[0][k], comp[1][k]};
  }
  void set(int i, int j, const Vec2& v) {
    int k = grid.index(i, j);
    comp[0][k] = v[0];
    comp[1][k] = v[1];
  }
};

ScalarField sample(const GridSpec& grid, double time,
                   const std::function<double(Vec2)>& f);

// 6th-order central differences on the periodic grid, order 1 or 2.
ScalarField fd_derivative(const ScalarField& field, int axis, int order);

// Spatial differential at every node: df = (d/dx1, d/dx2) f.
VectorField differential(const ScalarField& field);

// Mark nodes where |df| exceeds tol; tol <= 0 picks 1e-10 * sup|f|.
void build_mask(ScalarField& field, const VectorField& df, double tol = 0.0);

// Shrink the mask by a Chebyshev radius so stencils evaluated on the result
// never straddle the mask boundary.
std::vector<std::uint8_t> erode_mask(const GridSpec& grid,
                                     const std::vector<std::uint8_t>& mask,
                                     int radius);

class MeasureSpec;

// Rectangle-rule quadrature of field * e^Phi over the torus; compensated
// summation keeps the discrete divergence theorem near machine precision.
double integrate(const ScalarField& field, const MeasureSpec& measure);

// Kahan-compensated plain sum of node values times cell volume.
double integrate_raw(const ScalarField& field);

// Periodic bicubic (Lagrange) interpolation of a grid field at a chart point.
double interpolate(const ScalarField& field, const Vec2& x);

double sup_abs(const std::vector<double>& v);

}  // namespace finsler

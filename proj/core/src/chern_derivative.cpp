#include "finsler/chern_derivative.hpp"

#include <cmath>

namespace finsler {

namespace {

Vec2T<Dual1> plain(const Vec2& y) {
  return {Dual1(y[0]), Dual1(y[1])};
}

std::vector<double> values_at(const TensorEvaluator& tensor, const Vec2& x,
                              const Vec2& y, double t) {
  std::vector<Dual1> v = tensor(x, plain(y), t);
  std::vector<double> out(v.size());
  for (size_t c = 0; c < v.size(); ++c) out[c] = v[c].v;
  return out;
}

}  // namespace

ChernDerivatives chern_derivatives(const MetricFamily& m,
                                   const TensorEvaluator& tensor,
                                   const Vec2& x, const Vec2& y, double t,
                                   const DiffConfig& dc) {
  if (m.smoothness() < tensor.depth() + 1)
    fail(Error::Kind::Domain,
         "requested Chern derivative exceeds the metric smoothness promise (" +
             std::to_string(tensor.depth() + 1) + " levels needed, " +
             std::to_string(m.smoothness()) + " promised)");

  const int nc = tensor.components();
  const int rank = tensor.rank();

  // d/dy^k via the dual seed.
  std::vector<double> dy(nc * 2);
  for (int k = 0; k < 2; ++k) {
    std::vector<Dual1> v = tensor(x, lift(y, k), t);
    for (int c = 0; c < nc; ++c) dy[c * 2 + k] = v[c].d;
  }

  // d/dx^k by 5-point differences of the callback values.
  std::vector<double> dx(nc * 2);
  for (int k = 0; k < 2; ++k) {
    for (int off = -2; off <= 2; ++off) {
      if (off == 0) continue;
      Vec2 xs = x;
      xs[k] += off * dc.tensor_step;
      std::vector<double> v = values_at(tensor, xs, y, t);
      double w = (off == 1 ? 8.0 : off == -1 ? -8.0 : off == 2 ? -1.0 : 1.0) /
                 (12.0 * dc.tensor_step);
      for (int c = 0; c < nc; ++c) dx[c * 2 + k] += w * v[c];
    }
  }

  Mat2 ncon = nonlinear_connection(m, x, y, t, dc);
  Ten3 gamma = chern_connection(m, x, y, t, dc);
  double f = m.norm(x, y, t);

  ChernDerivatives out;
  out.value = values_at(tensor, x, y, t);
  out.horizontal.assign(nc * 2, 0.0);
  out.vertical.assign(nc * 2, 0.0);

  for (int c = 0; c < nc; ++c) {
    for (int k = 0; k < 2; ++k) {
      // delta/delta x^k
      double h = dx[c * 2 + k] - ncon[0][k] * dy[c * 2 + 0] -
                 ncon[1][k] * dy[c * 2 + 1];
      // one connection term per index slot
      for (int slot = 0; slot < rank; ++slot) {
        int shift = rank - 1 - slot;
        int idx = (c >> shift) & 1;
        for (int l = 0; l < 2; ++l) {
          int cl = (c & ~(1 << shift)) | (l << shift);
          if (tensor.index_kind(slot) == 'l')
            h -= gamma[l][idx][k] * out.value[cl];
          else
            h += gamma[idx][l][k] * out.value[cl];
        }
      }
      out.horizontal[c * 2 + k] = h;
      out.vertical[c * 2 + k] = f * dy[c * 2 + k];
    }
  }
  return out;
}

TensorEvaluator fundamental_evaluator(const MetricFamily& m) {
  return TensorEvaluator(
      "ll",
      [&m](const Vec2& x, const Vec2T<Dual1>& y, double t) {
        Mat2T<Dual1> g = fundamental_tensor(m, x, y, t);
        return std::vector<Dual1>{g[0][0], g[0][1], g[1][0], g[1][1]};
      },
      3);
}

TensorEvaluator distortion_evaluator(const MetricFamily& m,
                                     const MeasureSpec& mu) {
  return TensorEvaluator(
      "",
      [&m, &mu](const Vec2& x, const Vec2T<Dual1>& y, double t) {
        return std::vector<Dual1>{distortion(m, mu, x, y, t)};
      },
      3);
}

}  // namespace finsler

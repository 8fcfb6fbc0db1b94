#pragma once

// Horizontal and vertical Chern derivatives of arbitrary sphere-bundle
// tensors given as evaluation callbacks.
//
// Components follow the 1-form convention w_{i|j} = delta w_i / delta x^j
// - Gamma^k_{ij} w_k and w_{i;j} = F dw_i/dy^j, extended to higher valence
// with one -Gamma^l_{i k} T_{...l...} term per lower index and one
// +Gamma^i_{l k} T^{...l...} term per upper index; vertical derivatives carry
// no connection term. delta/delta x^j = d/dx^j - N^m_j d/dy^m, where the x
// part is a 5-point difference of the callback and the y part rides on the
// dual seed the callback is handed.

#include <functional>
#include <string>
#include <vector>

#include "finsler/connection.hpp"

namespace finsler {

class TensorEvaluator {
 public:
  // Component values at (x, y, t) with y carrying one dual level; components
  // are row-major over the indices (first index slowest).
  using Fn = std::function<std::vector<Dual1>(const Vec2& x,
                                              const Vec2T<Dual1>& y, double t)>;

  // indices: one char per slot, 'l' lower or 'u' upper; "" for scalars.
  // depth: fiber-derivative levels the callback consumes internally.
  TensorEvaluator(std::string indices, Fn fn, int depth = 2)
      : indices_(std::move(indices)), fn_(std::move(fn)), depth_(depth) {}

  int rank() const { return static_cast<int>(indices_.size()); }
  int components() const { return 1 << rank(); }
  char index_kind(int slot) const { return indices_[slot]; }
  int depth() const { return depth_; }

  std::vector<Dual1> operator()(const Vec2& x, const Vec2T<Dual1>& y,
                                double t) const {
    return fn_(x, y, t);
  }

 private:
  std::string indices_;
  Fn fn_;
  int depth_;
};

struct ChernDerivatives {
  // horizontal[c * 2 + k]: component c differentiated horizontally in x^k.
  std::vector<double> horizontal;
  // vertical[c * 2 + k]: F * d(component c)/dy^k.
  std::vector<double> vertical;
  std::vector<double> value;  // undifferentiated components
};

ChernDerivatives chern_derivatives(const MetricFamily& m,
                                   const TensorEvaluator& tensor,
                                   const Vec2& x, const Vec2& y, double t,
                                   const DiffConfig& dc = {});

// Ready-made evaluators.
TensorEvaluator fundamental_evaluator(const MetricFamily& m);          // g_{ij}
TensorEvaluator distortion_evaluator(const MetricFamily& m,
                                     const MeasureSpec& mu);           // tau

}  // namespace finsler

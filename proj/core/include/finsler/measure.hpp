#pragma once

// Borel measure d(mu) = e^Phi dx with a smooth periodic weight. The weight is
// held fixed along the flow; only the metric depends on t.

#include <string>

#include "finsler/smallvec.hpp"

namespace finsler {

class MeasureSpec {
 public:
  enum class Kind {
    Zero,        // Phi == 0 (Lebesgue)
    CosineX1,    // Phi = amp * cos x1
    CosineBump,  // Phi = amp * cos x1 * cos x2
  };

  MeasureSpec() = default;
  MeasureSpec(Kind kind, double amplitude) : kind_(kind), amp_(amplitude) {}

  static MeasureSpec lebesgue() { return MeasureSpec(); }

  double phi(const Vec2& x) const {
    switch (kind_) {
      case Kind::Zero: return 0.0;
      case Kind::CosineX1: return amp_ * std::cos(x[0]);
      case Kind::CosineBump: return amp_ * std::cos(x[0]) * std::cos(x[1]);
    }
    return 0.0;
  }

  Vec2 grad_phi(const Vec2& x) const {
    switch (kind_) {
      case Kind::Zero: return {0.0, 0.0};
      case Kind::CosineX1: return {-amp_ * std::sin(x[0]), 0.0};
      case Kind::CosineBump:
        return {-amp_ * std::sin(x[0]) * std::cos(x[1]),
                -amp_ * std::cos(x[0]) * std::sin(x[1])};
    }
    return {0.0, 0.0};
  }

  Mat2 hess_phi(const Vec2& x) const {
    switch (kind_) {
      case Kind::Zero: return {{{0.0, 0.0}, {0.0, 0.0}}};
      case Kind::CosineX1:
        return {{{-amp_ * std::cos(x[0]), 0.0}, {0.0, 0.0}}};
      case Kind::CosineBump: {
        double c1 = std::cos(x[0]), s1 = std::sin(x[0]);
        double c2 = std::cos(x[1]), s2 = std::sin(x[1]);
        return {{{-amp_ * c1 * c2, amp_ * s1 * s2},
                 {amp_ * s1 * s2, -amp_ * c1 * c2}}};
      }
    }
    return {{{0.0, 0.0}, {0.0, 0.0}}};
  }

  bool is_lebesgue() const { return kind_ == Kind::Zero || amp_ == 0.0; }
  Kind kind() const { return kind_; }
  double amplitude() const { return amp_; }

 private:
  Kind kind_ = Kind::Zero;
  double amp_ = 0.0;
};

}  // namespace finsler

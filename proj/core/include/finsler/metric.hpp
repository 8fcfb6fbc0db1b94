#pragma once

// Closed-form time-dependent Finsler norms on the periodic chart.
//
// Every family is a special case of
//
//   F(x,y;t) = e^{-lambda t} * ( e^{phi(x,t)} |y| + b(x) . y ),
//
// with phi(x,t) = (camp + cdrift t) cos x1 + camp2 cos x2 and
// b(x) = (b1 + a1 sin x2, b2 + a2 sin x1). The exponential scale realizes the
// geometric flow dg/dt = -2h with h = lambda g exactly; a nonzero cdrift
// produces an h that is not proportional to g, so the horizontal derivative
// of h does not vanish.
//
// The evaluator is templated on the fiber scalar so nested dual numbers
// deliver exact y-derivatives up to the Cartan tensor and beyond.

#include <string>

#include "finsler/error.hpp"
#include "finsler/smallvec.hpp"

namespace finsler {

enum class MetricKind {
  Euclidean,
  RiemannianConformal,
  Randers,
  ShrinkingScale,
  CustomComposite,
};

std::string to_string(MetricKind kind);

struct MetricParams {
  double conformal_amp = 0.0;    // phi += amp * cos x1
  double conformal_amp2 = 0.0;   // phi += amp2 * cos x2
  double conformal_drift = 0.0;  // phi += drift * t * cos x1
  Vec2 randers_b{0.0, 0.0};      // constant part of the 1-form b
  Vec2 randers_b_amp{0.0, 0.0};  // b1 += [0]*sin x2, b2 += [1]*sin x1
  double shrink_rate = 0.0;      // lambda
  int smoothness = 6;            // nestable derivative promise
};

class MetricFamily {
 public:
  MetricFamily() = default;
  MetricFamily(MetricKind kind, MetricParams params);

  static MetricFamily euclidean();
  static MetricFamily riemannian_conformal(double amp, double amp2 = 0.0,
                                           double drift = 0.0);
  static MetricFamily randers(Vec2 b, Vec2 b_amp = {0.0, 0.0});
  // Any base family shrunk by e^{-lambda t}.
  static MetricFamily shrinking(MetricParams base, double lambda);

  MetricKind kind() const { return kind_; }
  const MetricParams& params() const { return p_; }
  int smoothness() const { return p_.smoothness; }
  // True when dg/dt vanishes identically.
  bool is_static() const {
    return p_.shrink_rate == 0.0 && p_.conformal_drift == 0.0;
  }

  double phi(const Vec2& x, double t) const {
    return (p_.conformal_amp + p_.conformal_drift * t) * std::cos(x[0]) +
           p_.conformal_amp2 * std::cos(x[1]);
  }
  Vec2 b_field(const Vec2& x) const {
    return {p_.randers_b[0] + p_.randers_b_amp[0] * std::sin(x[1]),
            p_.randers_b[1] + p_.randers_b_amp[1] * std::sin(x[0])};
  }
  double time_scale(double t) const { return std::exp(-p_.shrink_rate * t); }

  // F^2(x,y;t) with fiber scalar T (double or nested Dual).
  template <class T>
  T f_squared(const Vec2& x, const Vec2T<T>& y, double t) const {
    T f = f_value(x, y, t);
    return f * f;
  }

  template <class T>
  T f_value(const Vec2& x, const Vec2T<T>& y, double t) const {
    T alpha = sqrt(y[0] * y[0] + y[1] * y[1]);
    Vec2 b = b_field(x);
    return time_scale(t) *
           (std::exp(phi(x, t)) * alpha + (b[0] * y[0] + b[1] * y[1]));
  }

  // Norm F(x,y;t) for a plain vector; F(x,0;t) = 0.
  double norm(const Vec2& x, const Vec2& y, double t) const {
    if (y[0] == 0.0 && y[1] == 0.0) return 0.0;
    return f_value<double>(x, y, t);
  }

  // Co-norm F*(x,xi;t) of a covector, via the closed-form dual of a Randers
  // norm. This is the route independent of the Newton Legendre solver.
  double dual_norm(const Vec2& x, const Vec2& xi, double t) const;

  // sup_x of e^{-phi} |b|; strong convexity requires this below 1.
  double randers_bound() const;

 private:
  void validate() const;

  MetricKind kind_ = MetricKind::Euclidean;
  MetricParams p_{};
};

}  // namespace finsler

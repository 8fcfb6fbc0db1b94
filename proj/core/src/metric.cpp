#include "finsler/metric.hpp"

#include <cmath>

namespace finsler {

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::Euclidean: return "euclidean";
    case MetricKind::RiemannianConformal: return "riemannian-conformal";
    case MetricKind::Randers: return "randers";
    case MetricKind::ShrinkingScale: return "shrinking-scale";
    case MetricKind::CustomComposite: return "custom-composite";
  }
  return "?";
}

MetricFamily::MetricFamily(MetricKind kind, MetricParams params)
    : kind_(kind), p_(params) {
  validate();
}

MetricFamily MetricFamily::euclidean() {
  return MetricFamily(MetricKind::Euclidean, MetricParams{});
}

MetricFamily MetricFamily::riemannian_conformal(double amp, double amp2,
                                                double drift) {
  MetricParams p;
  p.conformal_amp = amp;
  p.conformal_amp2 = amp2;
  p.conformal_drift = drift;
  return MetricFamily(MetricKind::RiemannianConformal, p);
}

MetricFamily MetricFamily::randers(Vec2 b, Vec2 b_amp) {
  MetricParams p;
  p.randers_b = b;
  p.randers_b_amp = b_amp;
  return MetricFamily(MetricKind::Randers, p);
}

MetricFamily MetricFamily::shrinking(MetricParams base, double lambda) {
  base.shrink_rate = lambda;
  return MetricFamily(MetricKind::ShrinkingScale, base);
}

double MetricFamily::randers_bound() const {
  // The global scale cancels, so |b|_a = e^{-phi}|b| pointwise. Sample a
  // lattice in x and the flow window in t; single-harmonic phi and b make
  // this resolution ample.
  double worst = 0.0;
  const int n = 64;
  const double step = 6.283185307179586 / n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Vec2 x{i * step, j * step};
      double bn = norm2(b_field(x));
      for (double t : {0.0, 0.5, 1.0, 2.0})
        worst = std::max(worst, std::exp(-phi(x, t)) * bn);
    }
  }
  return worst;
}

void MetricFamily::validate() const {
  if (p_.smoothness < 4)
    fail(Error::Kind::Admissibility,
         "metric smoothness promise must be >= 4, got " +
             std::to_string(p_.smoothness));
  double bb = randers_bound();
  if (bb >= 1.0)
    fail(Error::Kind::Admissibility,
         "Randers data violates strong convexity: sup |b|_a = " +
             std::to_string(bb) + " >= 1");
  if (p_.shrink_rate < 0.0)
    fail(Error::Kind::Config, "shrink rate must be nonnegative");
}

double MetricFamily::dual_norm(const Vec2& x, const Vec2& xi, double t) const {
  if (xi[0] == 0.0 && xi[1] == 0.0) return 0.0;
  // F = c |y| + beta . y with c = s e^{phi}, beta = s b. The dual norm is the
  // Randers-type co-norm
  //   F*(xi) = sqrt(a*^{ij} xi_i xi_j) + bstar . xi,
  //   a*^{ij} = (lam a^{ij} + b^i b^j) / lam^2,  bstar^i = -b^i / lam,
  // with a = c^2 I, b^i = a^{ij} beta_j and lam = 1 - |beta|_a^2.
  double s = time_scale(t);
  double c = s * std::exp(phi(x, t));
  Vec2 beta = s * b_field(x);
  double c2 = c * c;
  Vec2 bup{beta[0] / c2, beta[1] / c2};
  double lam = 1.0 - (beta[0] * bup[0] + beta[1] * bup[1]);
  double astar_quad = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      double aij = (i == j ? lam / c2 : 0.0) + bup[i] * bup[j];
      astar_quad += aij / (lam * lam) * xi[i] * xi[j];
    }
  double bstar_dot = -(bup[0] * xi[0] + bup[1] * xi[1]) / lam;
  return std::sqrt(astar_quad) + bstar_dot;
}

}  // namespace finsler

#include "finsler/fiber.hpp"

namespace finsler {

FundamentalData eval_fundamental(const MetricFamily& m, const Vec2& x,
                                 const Vec2& y, double t) {
  if (y[0] == 0.0 && y[1] == 0.0)
    fail(Error::Kind::Domain, "fundamental tensor undefined at y = 0");
  FundamentalData out;
  out.g = fundamental_tensor(m, x, y, t);
  if (!is_positive_definite(out.g))
    fail(Error::Kind::Admissibility,
         "fundamental tensor is not positive definite at the requested point");
  out.g_inv = inverse(out.g);
  out.cartan = cartan_tensor(m, x, y, t);
  return out;
}

}  // namespace finsler

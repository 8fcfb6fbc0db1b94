#include <doctest.h>

#include <cmath>
#include <random>

#include "finsler/fiber.hpp"

using namespace finsler;

TEST_CASE("Euclidean fundamental data") {
  MetricFamily m = MetricFamily::euclidean();
  FundamentalData fd = eval_fundamental(m, {0.4, 1.1}, {1.0, 0.0}, 0.0);
  CHECK(fd.g[0][0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(fd.g[1][1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(fd.g[0][1]) <= 1e-14);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) CHECK(std::abs(fd.cartan[i][j][k]) <= 1e-14);
}

TEST_CASE("Randers g against a fiber finite-difference oracle") {
  MetricFamily m = MetricFamily::randers({0.3, 0.0});
  Vec2 x{0.0, 0.0};
  Vec2 y{1.0, 0.0};
  Mat2 g = fundamental_tensor(m, x, y, 0.0);

  auto f2 = [&](double a, double b) {
    return m.f_squared(x, Vec2{a, b}, 0.0);
  };
  // 5-point stencils at a step that balances truncation and cancellation.
  double h = 1e-3;
  auto d2 = [&](auto&& fn) {
    return (-fn(2.0 * h) + 16.0 * fn(h) - 30.0 * fn(0.0) + 16.0 * fn(-h) -
            fn(-2.0 * h)) /
           (12.0 * h * h);
  };
  auto d1 = [&](auto&& fn) {
    return (-fn(2.0 * h) + 8.0 * fn(h) - 8.0 * fn(-h) + fn(-2.0 * h)) /
           (12.0 * h);
  };
  Mat2 oracle;
  oracle[0][0] = 0.5 * d2([&](double e) { return f2(1.0 + e, 0.0); });
  oracle[1][1] = 0.5 * d2([&](double e) { return f2(1.0, e); });
  oracle[0][1] = 0.5 * d1([&](double e1) {
    return d1([&](double e2) { return f2(1.0 + e1, e2); });
  });
  oracle[1][0] = oracle[0][1];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(g[i][j] == doctest::Approx(oracle[i][j]).epsilon(1e-8));
}

TEST_CASE("g is 0-homogeneous and its inverse is exact") {
  MetricFamily m = MetricFamily::randers({0.2, 0.1});
  Vec2 x{1.3, 0.2};
  Vec2 y{0.6, -0.9};
  FundamentalData fd = eval_fundamental(m, x, y, 0.0);
  Mat2 g2 = fundamental_tensor(m, x, Vec2{2.0 * y[0], 2.0 * y[1]}, 0.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(fd.g[i][j] == doctest::Approx(g2[i][j]).epsilon(1e-12));

  Mat2 id = mul(fd.g, fd.g_inv);
  CHECK(id[0][0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(id[1][1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(id[0][1]) <= 1e-12);
  CHECK(std::abs(id[1][0]) <= 1e-12);
}

TEST_CASE("Cartan tensor symmetry and y-contraction") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MetricParams p;
  p.conformal_amp = 0.1;
  p.randers_b = {0.2, 0.0};
  p.randers_b_amp = {0.1, 0.05};
  MetricFamily m(MetricKind::CustomComposite, p);
  for (int s = 0; s < 200; ++s) {
    Vec2 x{3.0 + u(rng), 3.0 + u(rng)};
    Vec2 y{u(rng), u(rng)};
    if (std::hypot(y[0], y[1]) < 0.3) continue;
    Ten3 c = cartan_tensor(m, x, y, 0.1);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        CHECK(c[i][j][0] == doctest::Approx(c[j][i][0]).epsilon(1e-12));
        double contraction = c[i][j][0] * y[0] + c[i][j][1] * y[1];
        CHECK(std::abs(contraction) <= 1e-9);
      }
  }
}

TEST_CASE("Randers determinant identity det g = (F/alpha)^3") {
  MetricFamily m = MetricFamily::randers({0.3, 0.0});
  Vec2 x{0.2, 0.5};
  for (Vec2 y : {Vec2{1.0, 0.0}, Vec2{0.3, -0.8}, Vec2{-1.1, 0.4}}) {
    Mat2 g = fundamental_tensor(m, x, y, 0.0);
    double alpha = std::hypot(y[0], y[1]);
    double f = m.norm(x, y, 0.0);
    CHECK(det(g) ==
          doctest::Approx(std::pow(f / alpha, 3.0)).epsilon(1e-12));
  }
}

TEST_CASE("domain and admissibility errors") {
  MetricFamily m = MetricFamily::euclidean();
  CHECK_THROWS_AS(eval_fundamental(m, {0, 0}, {0.0, 0.0}, 0.0), Error);
}

TEST_CASE("distortion reduces to -Phi on the Euclidean metric") {
  MetricFamily m = MetricFamily::euclidean();
  MeasureSpec mu(MeasureSpec::Kind::CosineX1, 0.4);
  Vec2 x{0.9, 0.0};
  double tau = distortion(m, mu, x, Vec2{0.3, 0.7}, 0.0);
  CHECK(tau == doctest::Approx(-mu.phi(x)).epsilon(1e-13));
}

TEST_CASE("conformal Riemannian families have no Cartan torsion") {
  MetricFamily m = MetricFamily::riemannian_conformal(0.15, 0.08);
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> u(0.0, 6.28);
  for (int s = 0; s < 50; ++s) {
    Vec2 x{u(rng), u(rng)};
    Vec2 y{std::cos(u(rng)), std::sin(u(rng))};
    Ten3 c = cartan_tensor(m, x, y, 0.0);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) CHECK(std::abs(c[i][j][k]) <= 1e-10);
  }
}

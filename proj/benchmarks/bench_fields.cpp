// Grid-level operators: one Laplacian apply and one heat step dominate the
// trajectory phase.

#include <benchmark/benchmark.h>

#include <cmath>

#include "finsler/heat.hpp"

namespace {

using namespace finsler;

constexpr double kTwoPi = 6.283185307179586476925286766559;

MetricFamily bench_metric() {
  MetricParams p;
  p.randers_b = {0.2, 0.0};
  p.shrink_rate = 0.1;
  return MetricFamily(MetricKind::ShrinkingScale, p);
}

void BM_GradientField(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  GridSpec g = build_grid({n, n}, {kTwoPi, kTwoPi});
  MetricFamily m = bench_metric();
  ScalarField f = sample(g, 0.0, [](Vec2 x) {
    return std::sin(x[0]) + 0.3 * std::sin(x[1]);
  });
  for (auto _ : state) {
    ScalarField copy = f;
    benchmark::DoNotOptimize(gradient_field(m, copy, 0.1));
  }
  state.SetItemsProcessed(state.iterations() * g.nodes());
}
BENCHMARK(BM_GradientField)->Arg(32)->Arg(64)->Arg(128);

void BM_FinslerLaplacian(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  GridSpec g = build_grid({n, n}, {kTwoPi, kTwoPi});
  MetricFamily m = bench_metric();
  MeasureSpec mu;
  ScalarField u = sample(g, 0.0, [](Vec2 x) {
    return 2.0 + std::cos(x[0]) + 0.3 * std::sin(x[1]);
  });
  for (auto _ : state) {
    ScalarField copy = u;
    benchmark::DoNotOptimize(finsler_laplacian(m, mu, copy, 0.1));
  }
  state.SetItemsProcessed(state.iterations() * g.nodes());
}
BENCHMARK(BM_FinslerLaplacian)->Arg(32)->Arg(64)->Arg(128);

void BM_HeatStamp(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  GridSpec g = build_grid({n, n}, {kTwoPi, kTwoPi});
  MetricFamily m = bench_metric();
  MeasureSpec mu;
  ScalarField u0 = sample(g, 0.0, [](Vec2 x) {
    return 2.0 + std::cos(x[0]) + 0.3 * std::sin(x[1]);
  });
  // One short stamp; per-iteration cost is dominated by the RK4 substeps.
  for (auto _ : state)
    benchmark::DoNotOptimize(run_heat_flow(m, mu, u0, {0.005}));
}
BENCHMARK(BM_HeatStamp)->Arg(32)->Arg(64);

}  // namespace

// Pointwise tensor kernels: the cost drivers of constant estimation and the
// identity checks.

#include <benchmark/benchmark.h>

#include "finsler/curvature.hpp"
#include "finsler/flow_tensors.hpp"
#include "finsler/legendre.hpp"

namespace {

using namespace finsler;

MetricFamily bench_metric() {
  MetricParams p;
  p.conformal_amp = 0.08;
  p.randers_b = {0.15, 0.0};
  p.randers_b_amp = {0.1, 0.0};
  p.shrink_rate = 0.1;
  return MetricFamily(MetricKind::CustomComposite, p);
}

const Vec2 kX{1.3, 0.7};
const Vec2 kY{0.8, -0.5};

void BM_FundamentalTensor(benchmark::State& state) {
  MetricFamily m = bench_metric();
  for (auto _ : state)
    benchmark::DoNotOptimize(fundamental_tensor(m, kX, kY, 0.2));
}
BENCHMARK(BM_FundamentalTensor);

void BM_CartanTensor(benchmark::State& state) {
  MetricFamily m = bench_metric();
  for (auto _ : state)
    benchmark::DoNotOptimize(cartan_tensor(m, kX, kY, 0.2));
}
BENCHMARK(BM_CartanTensor);

void BM_Spray(benchmark::State& state) {
  MetricFamily m = bench_metric();
  for (auto _ : state) benchmark::DoNotOptimize(spray(m, kX, kY, 0.2));
}
BENCHMARK(BM_Spray);

void BM_ChernConnection(benchmark::State& state) {
  MetricFamily m = bench_metric();
  for (auto _ : state)
    benchmark::DoNotOptimize(chern_connection(m, kX, kY, 0.2));
}
BENCHMARK(BM_ChernConnection);

void BM_ChernCurvature(benchmark::State& state) {
  MetricFamily m = bench_metric();
  for (auto _ : state)
    benchmark::DoNotOptimize(chern_curvature(m, kX, kY, 0.2));
}
BENCHMARK(BM_ChernCurvature);

void BM_Ricci(benchmark::State& state) {
  MetricFamily m = bench_metric();
  for (auto _ : state) benchmark::DoNotOptimize(ricci(m, kX, kY, 0.2));
}
BENCHMARK(BM_Ricci);

void BM_SCurvature(benchmark::State& state) {
  MetricFamily m = bench_metric();
  MeasureSpec mu(MeasureSpec::Kind::CosineBump, 0.1);
  for (auto _ : state)
    benchmark::DoNotOptimize(s_curvature(m, mu, kX, kY, 0.2));
}
BENCHMARK(BM_SCurvature);

void BM_LegendreTransform(benchmark::State& state) {
  MetricFamily m = bench_metric();
  Vec2 xi{0.7, -1.1};
  for (auto _ : state)
    benchmark::DoNotOptimize(legendre_transform(m, kX, 0.2, xi));
}
BENCHMARK(BM_LegendreTransform);

void BM_FlowTensorSuite(benchmark::State& state) {
  MetricFamily m = bench_metric();
  for (auto _ : state)
    benchmark::DoNotOptimize(flow_tensor_suite(m, kX, kY, 0.2));
}
BENCHMARK(BM_FlowTensorSuite);

}  // namespace

#include "folia/geometry.hpp"
#include "folia/models.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

namespace {

folia::MetricField hyperbolic() {
  return folia::make_warped_counterexample().metric();
}

void BM_ChristoffelAnalytic(benchmark::State& state) {
  const auto metric = hyperbolic();
  folia::Vec p(2);
  p << 0.3, -0.2;
  for (auto _ : state) benchmark::DoNotOptimize(folia::christoffel(metric, p));
}
BENCHMARK(BM_ChristoffelAnalytic);

void BM_ChristoffelFiniteDifference(benchmark::State& state) {
  const auto metric = hyperbolic();
  folia::Vec p(2);
  p << 0.3, -0.2;
  for (auto _ : state)
    benchmark::DoNotOptimize(folia::christoffel(metric, p, folia::DerivativeSource::FiniteDifference));
}
BENCHMARK(BM_ChristoffelFiniteDifference);

void BM_GeodesicUnitParameter(benchmark::State& state) {
  const auto metric = hyperbolic();
  folia::GeodesicState start{folia::Vec::Zero(2), folia::Vec::Unit(2, 1), 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(folia::integrate_geodesic(metric, start, 1.0).back());
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_GeodesicUnitParameter);

void BM_SuspensionGeodesic(benchmark::State& state) {
  const auto model = folia::make_suspension(folia::IntMatrix2{{2, 1, 1, 1}});
  folia::Vec v(3);
  v << 0.6, 0.2, 0.0;
  folia::GeodesicState start{folia::Vec::Constant(3, 0.5), v, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(folia::integrate_geodesic(model.metric(), start, 5.0).back());
}
BENCHMARK(BM_SuspensionGeodesic);

}  // namespace

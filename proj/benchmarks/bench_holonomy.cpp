#include "folia/graph.hpp"
#include "folia/holonomy.hpp"

#include <benchmark/benchmark.h>

namespace {

void BM_HolonomyLoop(benchmark::State& state) {
  const auto model = folia::make_suspension(folia::IntMatrix2{{2, 1, 1, 1}});
  const auto loop = folia::generator_loop(model, folia::Vec::Zero(3), state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(folia::holonomy_along(model, loop).samples.size());
}
BENCHMARK(BM_HolonomyLoop)->Arg(1)->Arg(2);

void BM_TransferAlongLoop(benchmark::State& state) {
  const auto model = folia::make_suspension(folia::IntMatrix2{{2, 1, 1, 1}});
  const folia::Vec x0 = folia::Vec::Zero(3);
  folia::Vec w(2);
  w << 1.0, 0.5;
  const auto sigma = folia::horizontal_curve(model, x0, w, 0.02);
  const auto loop = folia::generator_loop(model, x0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(folia::transfer(model, sigma, loop).curve.points.size());
}
BENCHMARK(BM_TransferAlongLoop);

void BM_GraphCompose(benchmark::State& state) {
  const auto graph = folia::HolonomyGraph::build(folia::make_suspension(folia::IntMatrix2{{2, 1, 1, 1}}));
  const auto z = graph.point(folia::Vec::Zero(3), 1, folia::Vec::Zero(3));
  for (auto _ : state) benchmark::DoNotOptimize(graph.compose(z, z).winding);
}
BENCHMARK(BM_GraphCompose);

}  // namespace

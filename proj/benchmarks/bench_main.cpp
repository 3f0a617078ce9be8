#include <benchmark/benchmark.h>

#include "mixfrac/gibbs_largedev.hpp"
#include "mixfrac/moment_engine.hpp"
#include "mixfrac/premeasure_dp.hpp"

using namespace mixfrac;

namespace {

VectorMeasure mixed3() {
  return VectorMeasure({MeasureComponent::multinomial(2, {0.2, 0.8}), MeasureComponent::multinomial(2, {0.6, 0.4}),
                        MeasureComponent::multinomial(2, {0.35, 0.65})});
}

void BM_CoveringMoment(benchmark::State& state) {
  const auto vm = mixed3();
  const QVector q{1.5, -2.0, 0.5};
  for (auto _ : state) benchmark::DoNotOptimize(covering_moment(vm, q, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_CoveringMoment)->DenseRange(8, 16, 4);

void BM_CascadeTreeCover(benchmark::State& state) {
  const auto vm = mixed3();
  const int depth = static_cast<int>(state.range(0));
  const CascadeTree tree(vm, {1.0, 1.0, -1.0}, depth);
  for (auto _ : state) benchmark::DoNotOptimize(tree.cover(0.5, depth, depth / 2));
}
BENCHMARK(BM_CascadeTreeCover)->DenseRange(8, 14, 3);

void BM_CriticalExponent(benchmark::State& state) {
  const auto vm = mixed3();
  for (auto _ : state)
    benchmark::DoNotOptimize(critical_exponent(vm, {0.5, 0.5, 0.5}, ExponentKind::packing_B).value);
}
BENCHMARK(BM_CriticalExponent);

void BM_MonteCarloCumulant(benchmark::State& state) {
  const auto vm = mixed3();
  const auto g = build_gibbs(vm, {0.0, 0.0, 0.0});
  for (auto _ : state)
    benchmark::DoNotOptimize(
        ld_cumulant(vm, g, {1.0, 0.5, -0.5}, 12, CumulantMode::montecarlo, static_cast<std::size_t>(state.range(0)), 7)
            .value);
}
BENCHMARK(BM_MonteCarloCumulant)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();

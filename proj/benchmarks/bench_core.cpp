#include <benchmark/benchmark.h>

#include "iabnet/analytic.hpp"
#include "iabnet/config.hpp"
#include "iabnet/model.hpp"
#include "iabnet/montecarlo.hpp"
#include "iabnet/quadrature.hpp"
#include "iabnet/rng.hpp"

using namespace iabnet;

namespace {

const SystemConfig& cfg() {
  static const SystemConfig c = default_config();
  return c;
}

void BM_HitRatio(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(hit_ratio(400, cfg()));
}
BENCHMARK(BM_HitRatio);

void BM_SemiInfiniteQuadrature(benchmark::State& state) {
  for (auto _ : state) {
    auto r = integrate_semi_infinite([](double x) { return std::exp(-x) * x; }, 0.0, 1.0);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_SemiInfiniteQuadrature);

void BM_LaplaceInterference(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(analytic::laplace_interference(
        analytic::AssocDest::UserToSbs, LinkState::LOS, 30.0, 10.0, 200, cfg()));
  }
}
BENCHMARK(BM_LaplaceInterference);

void BM_CoverageSbs(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(analytic::coverage_sbs(10.0, 200, cfg()).value);
}
BENCHMARK(BM_CoverageSbs)->Unit(benchmark::kMillisecond);

void BM_CoverageBackhaul(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(analytic::coverage_backhaul(10.0, cfg()).value);
}
BENCHMARK(BM_CoverageBackhaul)->Unit(benchmark::kMillisecond);

void BM_NoiseLimitedClosedForm(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(analytic::coverage_noise_limited(Tier::SBS, 10.0, 200, cfg()));
}
BENCHMARK(BM_NoiseLimitedClosedForm)->Unit(benchmark::kMillisecond);

void BM_SampleRealization(benchmark::State& state) {
  std::uint64_t i = 0;
  for (auto _ : state) {
    RngStream st = RngStream::substream(1, i++);
    benchmark::DoNotOptimize(mc::sample_realization(cfg(), st).sbs.size());
  }
}
BENCHMARK(BM_SampleRealization)->Unit(benchmark::kMillisecond);

void BM_EmpiricalCoverage(benchmark::State& state) {
  for (auto _ : state) {
    auto e = mc::empirical_coverage(mc::CoverageEventKind::SbsAccess, 10.0, 200,
                                    static_cast<std::uint64_t>(state.range(0)), 7, cfg());
    benchmark::DoNotOptimize(e.mean);
  }
}
BENCHMARK(BM_EmpiricalCoverage)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

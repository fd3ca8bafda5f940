#include <benchmark/benchmark.h>

#include <cmath>

#include "sheafmach/laws/generators.hpp"
#include "sheafmach/neuro/neuro.hpp"
#include "sheafmach/primitives.hpp"

using namespace sheafmach;

namespace {

const Duration kMs = Duration::from_ticks(1'000'000);

EventSection sample_events(std::int64_t n) {
  EventSection e(Duration::from_ticks(n * kMs.ticks()));
  for (std::int64_t i = 0; i < n; ++i) e.push_back(Duration::from_ticks(i * kMs.ticks()), Value(i));
  return e;
}

ContinuousSection wave(std::int64_t ms) {
  std::vector<std::pair<Time, Value>> pts;
  for (std::int64_t i = 0; i <= ms; ++i) {
    const Time t = Duration::from_ticks(i * kMs.ticks());
    pts.emplace_back(t, Value(std::sin(3.0 * t.to_seconds())));
  }
  auto c = ContinuousSection::sampled(pts);
  c.set_lipschitz_bound(3.0);
  return c;
}

void BM_RestrictEvents(benchmark::State& state) {
  const auto e = sample_events(state.range(0));
  const Time mid = Duration::from_ticks(e.length().ticks() / 2);
  for (auto _ : state) benchmark::DoNotOptimize(restrict_to(e, Duration::from_ticks(mid.ticks() / 2), mid));
}
BENCHMARK(BM_RestrictEvents)->Range(64, 1 << 14);

void BM_GlueEvents(benchmark::State& state) {
  const auto e = sample_events(state.range(0));
  const Time mid = Duration::from_ticks(e.length().ticks() / 2);
  const Section a = restrict_to(e, Time::zero(), mid);
  const Section b = restrict_to(e, mid, e.length());
  for (auto _ : state) benchmark::DoNotOptimize(glue(a, b));
}
BENCHMARK(BM_GlueEvents)->Range(64, 1 << 14);

void BM_RestrictContinuous(benchmark::State& state) {
  const auto c = wave(state.range(0));
  const Time mid = Duration::from_ticks(c.length().ticks() / 2);
  for (auto _ : state) benchmark::DoNotOptimize(restrict_to(c, Duration::from_ticks(mid.ticks() / 3), mid));
}
BENCHMARK(BM_RestrictContinuous)->Range(64, 1 << 14);

void BM_LevelCrossing(benchmark::State& state) {
  const auto c = wave(state.range(0));
  const auto m = level_crossing_sampler(0.05, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(run(m, c, Duration::seconds(0.1)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LevelCrossing)->Range(256, 1 << 14);

void BM_ClosedLoop(benchmark::State& state) {
  neuro::LoopParams p;
  p.geometry = neuro::CameraGeometry::uniform(static_cast<std::size_t>(state.range(0)));
  p.reflectance = neuro::ReflectanceMap::fourier(2.0, {1.0}, {}, 1e-6);
  p.contrast = 0.03;
  p.regulator = {1.0, 0.03, neuro::estimator_values(p.geometry, neuro::Estimator::Mirrored, 0.0)};
  p.body = {1.0, 0.5, -0.5, kMs};
  for (auto _ : state) benchmark::DoNotOptimize(neuro::run_closed_loop(p, Duration::seconds(1.0)));
}
BENCHMARK(BM_ClosedLoop)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include <cmath>

#include "hopfrc/features.hpp"
#include "hopfrc/model.hpp"
#include "hopfrc/reservoir.hpp"
#include "hopfrc/rng.hpp"
#include "hopfrc/synth.hpp"
#include "hopfrc/train.hpp"

using namespace hopfrc;
using readout::Tensor;

namespace {

audio::AudioClip chirp_clip(double seconds) {
  audio::SynthSpec s;
  s.kind = audio::SynthKind::kChirp;
  s.duration = seconds;
  return audio::synthesize(s, audio::kReservoirRate);
}

Tensor random_map(std::uint64_t seed) {
  Tensor t(200, 100, 1);
  for (double& v : t.storage()) v = next_unit(seed);
  return t;
}

void BM_Rk4Step(benchmark::State& state) {
  const reservoir::HopfParams p;
  reservoir::OscState s{std::sqrt(p.mu), 0, 0};
  const double h = reservoir::ReservoirConfig{}.step();
  for (auto _ : state) {
    s = reservoir::rk4_step(s, h, p, 1.0);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_Rk4Step);

void BM_RunReservoir(benchmark::State& state) {
  const auto clip = chirp_clip(static_cast<double>(state.range(0)) / 1000.0);
  const reservoir::ReservoirConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(reservoir::run_reservoir(clip, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(clip.samples.size()));
}
BENCHMARK(BM_RunReservoir)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_AssembleMap(benchmark::State& state) {
  const auto resp = reservoir::run_reservoir(chirp_clip(1.0), {});
  for (auto _ : state) benchmark::DoNotOptimize(features::assemble_feature_map(resp, {}));
}
BENCHMARK(BM_AssembleMap)->Unit(benchmark::kMillisecond);

void BM_ModelForward(benchmark::State& state) {
  auto m = readout::build_default_model(4, 1);
  const auto x = random_map(2);
  for (auto _ : state) benchmark::DoNotOptimize(m.forward(x));
}
BENCHMARK(BM_ModelForward)->Unit(benchmark::kMillisecond);

void BM_ModelForwardBackward(benchmark::State& state) {
  auto m = readout::build_default_model(4, 1);
  const auto x = random_map(3);
  Tensor g = Tensor::flat(4, 0.25);
  for (auto _ : state) {
    m.forward(x);
    m.backward(g);
  }
}
BENCHMARK(BM_ModelForwardBackward)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

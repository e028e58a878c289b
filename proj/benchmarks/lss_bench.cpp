#include <random>

#include <benchmark/benchmark.h>

#include "lss/manipulations.hpp"
#include "lss/resample.hpp"
#include "lss/synthetic.hpp"
#include "lss/watermark.hpp"

namespace {

using namespace lss;

const SecretKey kKey = SecretKey::from_hex("000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f");
const Nonce kNonce = Nonce::from_hex("0123456789abcdef0123456789abcdef");
const Payload kPayload = Payload::from_hex("b38f", 16);

ProjectedSequence utterance(long frames) {
  SyntheticCorpusSpec spec;
  spec.frames = frames;
  spec.num_utterances = 1;
  const SyntheticCorpus corpus(spec);
  return ProjectedSequence(corpus.utterance(0).data(), 75.0);
}

void BM_DeriveSchedule(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(derive_schedule(kKey, kNonce, kPayload, ScheduleParams{}, state.range(0)));
  }
}
BENCHMARK(BM_DeriveSchedule)->Arg(750)->Arg(7500);

void BM_Embed(benchmark::State& state) {
  const auto z = utterance(state.range(0));
  const auto s = derive_schedule(kKey, kNonce, kPayload, ScheduleParams{}, z.frames());
  for (auto _ : state) benchmark::DoNotOptimize(embed(z, s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Embed)->Arg(750)->Arg(7500);

void BM_Detect(benchmark::State& state) {
  const auto z = utterance(state.range(0));
  const auto s = derive_schedule(kKey, kNonce, kPayload, ScheduleParams{}, z.frames());
  const Vector ev = EigenSpectrum{}.materialize(128);
  for (auto _ : state) benchmark::DoNotOptimize(detection_score(z, s, ev));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Detect)->Arg(750)->Arg(7500);

void BM_FitPca(benchmark::State& state) {
  SyntheticCorpusSpec spec;
  spec.num_utterances = state.range(0);
  const auto corpus = generate_synthetic_corpus(spec);
  for (auto _ : state) benchmark::DoNotOptimize(fit_pca(corpus));
  state.SetItemsProcessed(state.iterations() * state.range(0) * spec.frames);
}
BENCHMARK(BM_FitPca)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

Waveform noise_seconds(double seconds) {
  return Waveform{make_noise(static_cast<std::size_t>(seconds * 24000), NoiseColor::kWhite, 1), 24000};
}

void BM_Butterworth(benchmark::State& state) {
  const Waveform x = noise_seconds(10.0);
  for (auto _ : state) benchmark::DoNotOptimize(butterworth(x, FilterBand::kBandpass, 500, 5000));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(x.samples.size()));
}
BENCHMARK(BM_Butterworth)->Unit(benchmark::kMillisecond);

void BM_Resample(benchmark::State& state) {
  const Waveform x = noise_seconds(10.0);
  for (auto _ : state) benchmark::DoNotOptimize(resample(x, static_cast<int>(state.range(0))));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(x.samples.size()));
}
BENCHMARK(BM_Resample)->Arg(16000)->Arg(22050)->Unit(benchmark::kMillisecond);

void BM_PinkNoise(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(make_noise(240000, NoiseColor::kPink, 3));
}
BENCHMARK(BM_PinkNoise)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

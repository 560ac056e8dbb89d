#include <benchmark/benchmark.h>

#include "roiprep/random.hpp"
#include "roiprep/roi.hpp"
#include "roiprep/saliency.hpp"
#include "roiprep/synth.hpp"

namespace {

using namespace roiprep;

SaliencyMap random_map(std::uint64_t seed, std::size_t side) {
  SplitMix64 rng(seed);
  std::vector<double> v(side * side);
  for (auto& x : v) x = rng.uniform();
  return SaliencyMap(side, side, std::move(v));
}

void BM_S3Combine(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  const auto ori = random_map(1, side), back = random_map(2, side);
  for (auto _ : state) benchmark::DoNotOptimize(s3_combine(ori, back, {}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(side * side));
}
BENCHMARK(BM_S3Combine)->Arg(64)->Arg(256)->Arg(1024);

void BM_ConnectedComponents(benchmark::State& state) {
  const auto side = static_cast<std::size_t>(state.range(0));
  SplitMix64 rng(3);
  BinaryMask mask{side, side, std::vector<std::uint8_t>(side * side)};
  for (auto& b : mask.bits) b = rng.uniform() < 0.45;
  for (auto _ : state) benchmark::DoNotOptimize(connected_components(mask, Connectivity::Eight));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(side * side));
}
BENCHMARK(BM_ConnectedComponents)->Arg(64)->Arg(256)->Arg(1024);

void BM_ExtractRois(benchmark::State& state) {
  const auto map = random_map(4, static_cast<std::size_t>(state.range(0)));
  const RoiConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(extract_rois(map, config));
}
BENCHMARK(BM_ExtractRois)->Arg(64)->Arg(256);

void BM_Evaluate(benchmark::State& state) {
  const auto scenes = make_scenes(SceneFamily::FpOverlap, 7, 100, 0.02);
  const RoiConfig roi;
  const auto jobs = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(scenes, S3Method{S3Params{}}, roi, jobs));
}
BENCHMARK(BM_Evaluate)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

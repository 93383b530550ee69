#include <benchmark/benchmark.h>

#include <cmath>

#include "clipforge/clipgen.hpp"
#include "clipforge/complexity.hpp"
#include "clipforge/dct.hpp"
#include "clipforge/metrics.hpp"
#include "clipforge/noise.hpp"
#include "clipforge/rd_curve.hpp"
#include "clipforge/toy_codec.hpp"
#include "clipforge/wiener3d.hpp"

using namespace clipforge;

namespace {

const Clip& bench_clip() {
  static const Clip clip = make_structured_clip(192, 192, 4, {30, 1}, 99);
  return clip;
}

const Clip& bench_noisy() {
  static const Clip clip = add_gaussian_noise(bench_clip(), 8.0, 1);
  return clip;
}

void BM_Psnr(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(psnr(bench_clip(), bench_noisy()));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(bench_clip().frame_count()));
}
BENCHMARK(BM_Psnr);

void BM_MsSsim(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(ms_ssim(bench_clip(), bench_noisy()));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(bench_clip().frame_count()));
}
BENCHMARK(BM_MsSsim);

void BM_BdRate(benchmark::State& state) {
  std::vector<RDPoint> a, b;
  for (double r : {100.0, 300.0, 900.0, 2700.0, 8100.0, 24300.0}) {
    a.push_back({r, 5 + 4 * std::log(r)});
    b.push_back({r * 0.85, 5.2 + 4 * std::log(r)});
  }
  const RDCurve ref = build_rd_curve(a, QualityMetric::kPsnr);
  const RDCurve test = build_rd_curve(b, QualityMetric::kPsnr);
  for (auto _ : state) benchmark::DoNotOptimize(bd_rate(test, ref));
}
BENCHMARK(BM_BdRate);

void BM_Dct8x8Forward(benchmark::State& state) {
  double in[64], out[64];
  for (int i = 0; i < 64; ++i) in[i] = (i * 37) % 256;
  for (auto _ : state) {
    dct8().forward2d(in, out);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_Dct8x8Forward);

void BM_Wiener3d(benchmark::State& state) {
  const Clip clip = make_structured_clip(96, 96, 4, {30, 1}, 3);
  const Clip noisy = add_gaussian_noise(clip, 10.0, 2);
  for (auto _ : state) benchmark::DoNotOptimize(wiener3d_denoise(noisy, 10.0));
  state.SetItemsProcessed(state.iterations() * 96 * 96 * 4);
}
BENCHMARK(BM_Wiener3d);

void BM_ToyEncode(benchmark::State& state) {
  const Clip clip = make_structured_clip(96, 96, 4, {30, 1}, 5);
  for (auto _ : state) benchmark::DoNotOptimize(toy_intra_encode(clip, 2000.0));
  state.SetItemsProcessed(state.iterations() * 96 * 96 * 4);
}
BENCHMARK(BM_ToyEncode);

void BM_ExtractComplexity(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(extract_complexity(bench_clip(), 4, 32));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(bench_clip().frame_count()));
}
BENCHMARK(BM_ExtractComplexity);

void BM_AddNoise(benchmark::State& state) {
  uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(add_gaussian_noise(bench_clip(), 6.0, ++seed));
  state.SetBytesProcessed(state.iterations() *
                          static_cast<int64_t>(bench_clip().frame_count() *
                                               bench_clip().frame(0).payload_bytes()));
}
BENCHMARK(BM_AddNoise);

}  // namespace

BENCHMARK_MAIN();

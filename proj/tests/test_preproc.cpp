#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <sstream>

#include "clipforge/clipgen.hpp"
#include "clipforge/dct.hpp"
#include "clipforge/metrics.hpp"
#include "clipforge/noise.hpp"
#include "clipforge/preproc_sweep.hpp"
#include "clipforge/rng.hpp"
#include "clipforge/strength_policy.hpp"
#include "clipforge/thread_pool.hpp"
#include "clipforge/toy_codec.hpp"
#include "clipforge/wiener3d.hpp"
#include "oracles.hpp"

using namespace clipforge;

namespace {

// Spatial AC energy of the non-overlapping 8x8 tiles of a luma plane.
std::vector<double> tile_ac_energies(const VideoFrame& f) {
  std::vector<double> out;
  for (int by = 0; by + 8 <= f.height(); by += 8) {
    for (int bx = 0; bx + 8 <= f.width(); bx += 8) {
      std::vector<double> block(64);
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) block[y * 8 + x] = f.at(0, bx + x, by + y);
      const auto spec = oracles::dct2_naive(block, 8);
      double e = 0;
      for (int i = 1; i < 64; ++i) e += spec[i] * spec[i];
      out.push_back(e);
    }
  }
  return out;
}

BitrateEncoder toy_encoder() {
  return [](const Clip& clip, double rate) { return toy_intra_encode(clip, rate); };
}

uint64_t sweep_noise_seed(uint64_t seed, size_t clip_index, double level) {
  uint64_t s = hash_combine(seed, static_cast<uint64_t>(clip_index));
  uint64_t bits;
  std::memcpy(&bits, &level, sizeof(bits));
  return hash_combine(s, bits);
}

}  // namespace

TEST_CASE("wiener3d_denoise") {
  SUBCASE("strength 0 is bit-identical passthrough") {
    const Clip clip = make_structured_clip(48, 48, 5, {30, 1}, 2);
    const Clip out = wiener3d_denoise(clip, 0.0);
    CHECK(out.frames() == clip.frames());
  }
  SUBCASE("constant clips are fixed points for any strength") {
    const Clip clip = make_constant_clip(40, 40, 4, {30, 1}, 153);
    for (double s : {1.0, 10.0, 100.0}) {
      const Clip out = wiener3d_denoise(clip, s);
      CHECK(out.frames() == clip.frames());
    }
  }
  SUBCASE("static clip: per-tile spatial AC energy never increases") {
    // all frames identical, so the temporal axis is pure DC and per-slice
    // energies are directly comparable
    const Clip one = make_random_clip(64, 64, 1, {30, 1}, 17);
    std::vector<VideoFrame> frames(4, one.frame(0));
    const Clip clip(std::move(frames), {30, 1});
    for (double s : {4.0, 12.0, 40.0}) {
      const Clip out = wiener3d_denoise(clip, s);
      const auto before = tile_ac_energies(clip.frame(1));
      const auto after = tile_ac_energies(out.frame(1));
      for (size_t i = 0; i < before.size(); ++i) {
        // rounding to uint8 perturbs energy by up to ~2*sqrt(E)*||delta||
        const double slack = 8.0 * std::sqrt(before[i]) + 20.0;
        CHECK(after[i] <= before[i] + slack);
      }
    }
  }
  SUBCASE("noisy mid-gray: energy crushed, PSNR vs clean improves") {
    const Clip clean = make_constant_clip(64, 64, 6, {30, 1}, 128);
    const Clip noisy = add_gaussian_noise(clean, 10.0, 9);
    const Clip filtered = wiener3d_denoise(noisy, 10.0);
    const auto before = tile_ac_energies(noisy.frame(2));
    const auto after = tile_ac_energies(filtered.frame(2));
    for (size_t i = 0; i < before.size(); ++i)
      CHECK(after[i] <= before[i] + 8.0 * std::sqrt(before[i]) + 20.0);
    CHECK(psnr(clean, filtered) > psnr(clean, noisy) + 3.0);
  }
}

TEST_CASE("toy pipeline at strength 0 equals encode-only bit-exactly") {
  const Clip clip = make_structured_clip(64, 64, 4, {30, 1}, 12);
  const Clip noisy = add_gaussian_noise(clip, 8.0, 3);
  const EncodeResult direct = toy_intra_encode(noisy, 1500.0);
  const EncodeResult through = toy_intra_encode(wiener3d_denoise(noisy, 0.0), 1500.0);
  CHECK(direct.output_clip->frames() == through.output_clip->frames());
  CHECK(direct.bitrate_kbps == through.bitrate_kbps);
}

TEST_CASE("run_sweep") {
  SUBCASE("1x1x1 micro grid equals the hand-assembled pipeline") {
    const Clip clean = make_structured_clip(64, 64, 4, {30, 1}, 30);
    SweepGrid grid;
    grid.psnr_levels = {30.0};
    grid.bitrates_kbps = {2000.0};
    grid.strengths = {0.0};
    const SweepResult sweep = run_sweep({clean}, toy_encoder(), grid, 555);
    REQUIRE(sweep.cells.size() == 1);
    REQUIRE(sweep.complete());

    const Clip noisy = add_gaussian_noise(clean, sigma_for_target_psnr(30.0),
                                          sweep_noise_seed(555, 0, 30.0));
    const EncodeResult enc = toy_intra_encode(noisy, 2000.0);
    const double want = psnr(clean, *enc.output_clip);
    CHECK(sweep.cells.begin()->second == doctest::Approx(want).epsilon(1e-12));
  }
  SUBCASE("clean input at a generous rate stays above 38 dB") {
    const Clip clean = make_structured_clip(128, 128, 12, {30, 1}, 31);
    SweepGrid grid;
    grid.psnr_levels = {40.0};
    grid.bitrates_kbps = {8192.0};
    grid.strengths = {0.0};
    const SweepResult sweep = run_sweep({clean}, toy_encoder(), grid, 1);
    CHECK(sweep.cells.begin()->second >= 38.0);
  }
  SUBCASE("full default-shape grid completes with finite cells") {
    ThreadPool pool(2);
    const std::vector<Clip> clips = {make_structured_clip(64, 64, 8, {30, 1}, 41),
                                     make_structured_clip(64, 64, 8, {30, 1}, 42)};
    SweepGrid grid = SweepGrid::default_grid();
    const SweepResult sweep = run_sweep(clips, toy_encoder(), grid, 7, &pool);
    CHECK(sweep.complete());
    CHECK(sweep.cells.size() == grid.psnr_levels.size() * grid.bitrates_kbps.size() *
                                    grid.strengths.size());
    for (const auto& [key, v] : sweep.cells) CHECK(std::isfinite(v));

    // spot oracle on 3 cells: recompute the full pipeline by hand
    SplitMix64 pick(99);
    auto keys = std::vector<SweepKey>();
    for (const auto& [key, v] : sweep.cells) keys.push_back(key);
    for (int probe = 0; probe < 3; ++probe) {
      const SweepKey key = keys[pick.next_below(keys.size())];
      double acc = 0.0;
      for (size_t c = 0; c < clips.size(); ++c) {
        const Clip noisy = add_gaussian_noise(
            clips[c], sigma_for_target_psnr(key.psnr_level),
            sweep_noise_seed(7, c, key.psnr_level));
        const Clip denoised = wiener3d_denoise(noisy, key.strength);
        const EncodeResult enc = toy_intra_encode(denoised, key.bitrate_kbps);
        acc += psnr(clips[c], *enc.output_clip) / static_cast<double>(clips.size());
      }
      CHECK(sweep.cells.at(key) == doctest::Approx(acc).epsilon(1e-9));
    }
  }
  SUBCASE("an encode failure poisons only its cell") {
    const Clip clean = make_structured_clip(64, 64, 4, {30, 1}, 5);
    SweepGrid grid;
    grid.psnr_levels = {30.0};
    grid.bitrates_kbps = {500.0, 2000.0};
    grid.strengths = {0.0, 5.0};
    BitrateEncoder flaky = [](const Clip& clip, double rate) {
      if (rate == 500.0) throw std::runtime_error("boom");
      return toy_intra_encode(clip, rate);
    };
    const SweepResult sweep = run_sweep({clean}, flaky, grid, 2);
    CHECK_FALSE(sweep.complete());
    CHECK(sweep.holes.size() == 2);  // both strengths at 500 kbps
    CHECK(sweep.cells.size() == 2);

    const ArgmaxTable table = argmax_strengths(sweep);
    CHECK(table.entries.size() == 1);
    CHECK(table.warnings.size() == 1);
  }
}

TEST_CASE("argmax_strengths") {
  SweepGrid grid;
  grid.psnr_levels = {30.0};
  grid.bitrates_kbps = {1000.0};
  grid.strengths = {0.0, 5.0, 10.0};
  SweepResult sweep;
  sweep.grid = grid;
  auto cell = [&](double s, double v) { sweep.cells[{30.0, 1000.0, s}] = v; };

  SUBCASE("interior maximum") {
    cell(0, 30);
    cell(5, 32);
    cell(10, 31);
    const ArgmaxTable t = argmax_strengths(sweep);
    REQUIRE(t.entries.size() == 1);
    CHECK(t.entries[0].best_strength == 5.0);
    CHECK(t.entries[0].sigma == doctest::Approx(sigma_for_target_psnr(30.0)));
  }
  SUBCASE("ties go to the smaller strength") {
    cell(0, 30);
    cell(5, 32);
    cell(10, 32);
    CHECK(argmax_strengths(sweep).entries[0].best_strength == 5.0);
  }
  SUBCASE("monotone decreasing rows pick zero") {
    cell(0, 33);
    cell(5, 32);
    cell(10, 31);
    CHECK(argmax_strengths(sweep).entries[0].best_strength == 0.0);
  }
}

namespace {

// Degree-5 bivariate polynomial in normalized coordinates, fixed benign
// coefficients, values kept well inside [0, s_max].
double planted_poly(double nx, double ny) {
  return 6.0 + 1.5 * nx - 0.8 * ny + 0.6 * nx * ny - 0.4 * nx * nx + 0.3 * ny * ny +
         0.25 * nx * nx * nx - 0.2 * nx * ny * ny + 0.15 * nx * nx * nx * nx * nx -
         0.1 * ny * ny * ny * ny * ny + 0.05 * nx * nx * ny * ny * ny;
}

ArgmaxTable planted_table(const std::vector<double>& sigmas, const std::vector<double>& rates) {
  const double s_lo = sigmas.front(), s_hi = sigmas.back();
  const double r_lo = std::log(rates.front()), r_hi = std::log(rates.back());
  ArgmaxTable table;
  for (double s : sigmas) {
    for (double r : rates) {
      const double nx = 2.0 * (s - s_lo) / (s_hi - s_lo) - 1.0;
      const double ny = 2.0 * (std::log(r) - r_lo) / (r_hi - r_lo) - 1.0;
      table.entries.push_back({s, r, planted_poly(nx, ny), 0.0});
    }
  }
  return table;
}

const std::vector<double> kSigmas = {2.0, 5.0, 8.0, 12.0, 17.0, 25.5};
const std::vector<double> kRates = {256, 512, 1024, 2048, 4096, 8192};

}  // namespace

TEST_CASE("fit_policy plant and recover") {
  const ArgmaxTable table = planted_table(kSigmas, kRates);
  for (const auto& e : table.entries) {
    REQUIRE(e.best_strength > 0.1);
    REQUIRE(e.best_strength < 11.9);
  }
  const StrengthPolicy policy = fit_policy(table, 12.0);
  CHECK(policy.fit_rmse <= 1e-8);
  for (const auto& e : table.entries)
    CHECK(optimal_strength(policy, e.sigma, e.bitrate_kbps) ==
          doctest::Approx(e.best_strength).epsilon(1e-6));
}

TEST_CASE("fit_policy edge cases") {
  SUBCASE("constant tables fit a constant polynomial") {
    ArgmaxTable table = planted_table(kSigmas, kRates);
    for (auto& e : table.entries) e.best_strength = 4.0;
    const StrengthPolicy policy = fit_policy(table, 12.0);
    CHECK(policy.coefficients[0] == doctest::Approx(4.0).epsilon(1e-9));
    for (size_t i = 1; i < policy.coefficients.size(); ++i)
      CHECK(std::abs(policy.coefficients[i]) < 1e-8);
    CHECK(optimal_strength(policy, 9.0, 1500.0) == doctest::Approx(4.0).epsilon(1e-9));
  }
  SUBCASE("20 entries are rejected") {
    ArgmaxTable table = planted_table(kSigmas, kRates);
    table.entries.resize(20);
    CHECK_THROWS_AS(fit_policy(table, 12.0), SweepError);
  }
  SUBCASE("too few distinct sigma levels are rank-deficient") {
    const ArgmaxTable table = planted_table({2.0, 8.0, 25.5}, {100, 200, 400, 800, 1600, 3200, 6400});
    CHECK_THROWS_WITH_AS(fit_policy(table, 12.0), doctest::Contains("rank"), SweepError);
  }
  SUBCASE("one axis collapsed is caught early") {
    const ArgmaxTable table = planted_table({5.0, 5.0, 5.0, 5.0, 5.0}, kRates);
    CHECK_THROWS_AS(fit_policy(table, 12.0), SweepError);
  }
}

TEST_CASE("optimal_strength") {
  SUBCASE("all-zero coefficients give zero") {
    StrengthPolicy policy;
    policy.coefficients.assign(StrengthPolicy::kCoefficients, 0.0);
    policy.sigma_min = 0;
    policy.sigma_max = 20;
    policy.ln_rate_min = std::log(100.0);
    policy.ln_rate_max = std::log(10000.0);
    policy.s_max = 10;
    CHECK(optimal_strength(policy, 5.0, 1000.0) == 0.0);
  }
  SUBCASE("queries beyond the fitted range clamp to the edge") {
    const StrengthPolicy policy = fit_policy(planted_table(kSigmas, kRates), 12.0);
    const double at_edge = optimal_strength(policy, kSigmas.back(), 1024.0);
    CHECK(optimal_strength(policy, kSigmas.back() + 30.0, 1024.0) == at_edge);
    const double at_rate_edge = optimal_strength(policy, 8.0, kRates.back());
    CHECK(optimal_strength(policy, 8.0, kRates.back() * 50.0) == at_rate_edge);
  }
  SUBCASE("json round trip preserves evaluations") {
    const StrengthPolicy policy = fit_policy(planted_table(kSigmas, kRates), 12.0);
    const StrengthPolicy back = StrengthPolicy::from_json(policy.to_json());
    CHECK(optimal_strength(back, 7.7, 900.0) ==
          doctest::Approx(optimal_strength(policy, 7.7, 900.0)).epsilon(1e-12));
  }
}

TEST_CASE("interior optimum exists for noisy input at a high rate") {
  // the Fig.-2 shape: denoising before encoding beats encoding alone
  const Clip clean = make_structured_clip(96, 96, 8, {30, 1}, 77);
  const double sigma = sigma_for_target_psnr(27.5);
  const Clip noisy = add_gaussian_noise(clean, sigma, 4242);

  double best_filtered = -1e9, at_zero = 0;
  for (double s : {0.0, 0.25 * sigma, 0.5 * sigma, 0.75 * sigma, 1.0 * sigma, 1.5 * sigma}) {
    const Clip denoised = wiener3d_denoise(noisy, s);
    const EncodeResult enc = toy_intra_encode(denoised, 8192.0);
    const double q = psnr(clean, *enc.output_clip);
    if (s == 0.0)
      at_zero = q;
    else
      best_filtered = std::max(best_filtered, q);
  }
  CHECK(best_filtered >= at_zero + 0.5);

  // clean input at a high rate: filtering only destroys detail
  double clean_best_nonzero = -1e9, clean_at_zero = 0;
  for (double s : {0.0, 0.5 * sigma, sigma}) {
    const EncodeResult enc = toy_intra_encode(wiener3d_denoise(clean, s), 8192.0);
    const double q = psnr(clean, *enc.output_clip);
    if (s == 0.0)
      clean_at_zero = q;
    else
      clean_best_nonzero = std::max(clean_best_nonzero, q);
  }
  CHECK(clean_at_zero > clean_best_nonzero);
}

TEST_CASE("the cascade handles 4:2:2 and 4:4:4 sources") {
  for (ChromaSubsampling cs : {ChromaSubsampling::k422, ChromaSubsampling::k444}) {
    const Clip clean = make_structured_clip(48, 48, 3, {30, 1}, 60, cs);
    const Clip noisy = add_gaussian_noise(clean, 8.0, 1);
    const Clip filtered = wiener3d_denoise(noisy, 8.0);
    CHECK(filtered.subsampling() == cs);
    const EncodeResult enc = toy_intra_encode(filtered, 1000.0);
    REQUIRE(enc.output_clip);
    CHECK(psnr(clean, *enc.output_clip) > 20.0);
  }
}

TEST_CASE("sweep csv round trip") {
  const Clip clean = make_structured_clip(64, 64, 4, {30, 1}, 30);
  SweepGrid grid;
  grid.psnr_levels = {27.5, 35.0};
  grid.bitrates_kbps = {1000.0, 4000.0};
  grid.strengths = {0.0, 6.0};
  const SweepResult sweep = run_sweep({clean}, toy_encoder(), grid, 11);
  std::stringstream buf;
  write_sweep_csv(sweep, buf);
  const SweepResult back = read_sweep_csv(buf);
  CHECK(back.cells.size() == sweep.cells.size());
  CHECK(back.grid.psnr_levels == sweep.grid.psnr_levels);
  for (const auto& [key, v] : sweep.cells) CHECK(back.cells.at(key) == doctest::Approx(v));
}

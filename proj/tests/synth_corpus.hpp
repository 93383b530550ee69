// Synthetic encode-time corpus shared by the load-predict unit tests and
// the acceptance suite. Durations follow a multiplicative law in pixels,
// frames, preset and CRF with optional log-normal noise, which makes the
// linear-vs-log training comparison meaningful.
#ifndef CLIPFORGE_TESTS_SYNTH_CORPUS_HPP
#define CLIPFORGE_TESTS_SYNTH_CORPUS_HPP

#include <cmath>
#include <string>
#include <vector>

#include "clipforge/rng.hpp"
#include "clipforge/time_model.hpp"

namespace synth_corpus {

struct Law {
  double coeff = 2.5e-6;   // seconds per pixel-frame at preset 0, crf 22
  double noise_sigma = 0;  // log-normal multiplicative noise

  double seconds(double pixels, double frames, double preset, double crf, double jitter) const {
    const double preset_factor = std::pow(2.0, -preset / 2.0);
    const double crf_factor = std::pow(2.0, -(crf - 22.0) / 10.0);
    return coeff * pixels * frames * preset_factor * crf_factor * std::exp(noise_sigma * jitter);
  }
};

inline std::vector<clipforge::TimeSample> make_corpus(size_t n, const Law& law, uint64_t seed,
                                                      size_t samples_per_source = 5) {
  clipforge::SplitMix64 rng(seed);
  const std::pair<int, int> resolutions[] = {{320, 180}, {640, 360}, {960, 540},
                                             {1280, 720}, {1920, 1080}, {3840, 2160}};
  std::vector<clipforge::TimeSample> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    const auto [w, h] = resolutions[rng.next_below(6)];
    clipforge::ComplexityFeatures f;
    f.height = h;
    f.total_pixels = static_cast<double>(w) * h;
    f.frame_rate = std::vector<double>{24, 30, 60}[rng.next_below(3)];
    f.n_frames = 48 + static_cast<double>(rng.next_below(192));
    f.se_mean = 5.0 + 20.0 * rng.next_double();
    f.se_max = f.se_mean * (1.2 + rng.next_double());
    f.se_median = f.se_mean * (0.8 + 0.3 * rng.next_double());
    f.se_std = 2.0 + 3.0 * rng.next_double();
    f.te_mean = 1.0 + 6.0 * rng.next_double();
    f.te_max = f.te_mean * (1.5 + rng.next_double());
    f.te_median = f.te_mean * (0.7 + 0.4 * rng.next_double());
    f.te_std = 0.5 + rng.next_double();
    f.mean_brightness = 60.0 + 120.0 * rng.next_double();
    f.preset = static_cast<double>(rng.next_below(9));
    f.target_crf = 22.0 + 5.0 * static_cast<double>(rng.next_below(6));

    clipforge::TimeSample s;
    s.features = f;
    s.measured_seconds =
        law.seconds(f.total_pixels, f.n_frames, f.preset, f.target_crf, rng.next_gaussian());
    s.source_id = "src" + std::to_string(i / samples_per_source);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace synth_corpus

#endif  // CLIPFORGE_TESTS_SYNTH_CORPUS_HPP

#include "clipforge/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "clipforge/rng.hpp"

namespace clipforge {

double sigma_for_target_psnr(double target_psnr) {
  if (target_psnr <= 0.0)
    throw std::invalid_argument("sigma_for_target_psnr: target must be positive");
  return 255.0 * std::pow(10.0, -target_psnr / 20.0);
}

Clip add_gaussian_noise(const Clip& clip, double sigma, uint64_t seed) {
  if (sigma < 0.0) throw std::invalid_argument("add_gaussian_noise: sigma must be >= 0");
  if (sigma == 0.0) return clip;
  SplitMix64 rng(seed);
  std::vector<VideoFrame> frames;
  frames.reserve(clip.frame_count());
  for (const auto& src : clip.frames()) {
    VideoFrame f = src;
    for (int p = 0; p < 3; ++p) {
      for (auto& v : f.plane(p)) {
        const double noisy = v + sigma * rng.next_gaussian();
        const double rounded = noisy < 0.0 ? std::ceil(noisy - 0.5) : std::floor(noisy + 0.5);
        v = static_cast<uint8_t>(std::clamp(rounded, 0.0, 255.0));
      }
    }
    frames.push_back(std::move(f));
  }
  Clip out(std::move(frames), clip.frame_rate(), clip.source_id());
  return out;
}

}  // namespace clipforge

#ifndef CLIPFORGE_NOISE_HPP
#define CLIPFORGE_NOISE_HPP

#include <cstdint>

#include "clipforge/frame.hpp"

namespace clipforge {

// Noise standard deviation whose MSE hits `target_psnr` against an 8-bit
// peak: sigma = 255 * 10^(-psnr/20).
double sigma_for_target_psnr(double target_psnr);

// i.i.d. N(0, sigma^2) on every plane, rounded half away from zero and
// clamped to [0,255]. Deterministic for a given seed (SplitMix64 +
// Box-Muller, see rng.hpp).
Clip add_gaussian_noise(const Clip& clip, double sigma, uint64_t seed);

}  // namespace clipforge

#endif  // CLIPFORGE_NOISE_HPP

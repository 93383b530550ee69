#ifndef CLIPFORGE_METRICS_HPP
#define CLIPFORGE_METRICS_HPP

#include "clipforge/frame.hpp"

namespace clipforge {

struct MetricError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sentinel for zero-MSE comparisons, kept finite for serialization.
inline constexpr double kPsnrCap = 99.0;

// Luma PSNR with the MSE pooled over every sample of the clip (not a
// per-frame average). Identical clips return kPsnrCap.
double psnr(const Clip& reference, const Clip& test);
double psnr_frame(const VideoFrame& reference, const VideoFrame& test);

// 5-scale MS-SSIM on luma, frame scores averaged over the clip. Standard
// constants: 11x11 Gaussian window sigma=1.5, k1=0.01, k2=0.03, weights
// {0.0448, 0.2856, 0.3001, 0.2363, 0.1333}. Needs >= 176x176 luma so the
// window fits after four dyadic downsamples.
inline constexpr int kMsSsimMinDim = 176;
double ms_ssim(const Clip& reference, const Clip& test);
double ms_ssim_frame(const VideoFrame& reference, const VideoFrame& test);

}  // namespace clipforge

#endif  // CLIPFORGE_METRICS_HPP

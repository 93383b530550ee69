#include "clipforge/wiener3d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "clipforge/dct.hpp"

namespace clipforge {

namespace {

constexpr int kBlock = 8;
constexpr int kTemporal = 3;
constexpr int kStep = 4;  // 50% spatial overlap

// One plane of one output frame. The 3-frame window is centered on the
// output frame; only the middle temporal slice is accumulated.
void filter_plane(const std::vector<const std::vector<uint8_t>*>& window, int w, int h,
                  double s2, std::vector<uint8_t>& out) {
  const Dct& sdct = dct8();
  const Dct& tdct = dct3();

  std::vector<double> acc(static_cast<size_t>(w) * h, 0.0);
  std::vector<double> weight(static_cast<size_t>(w) * h, 0.0);

  double volume[kTemporal][kBlock * kBlock];
  double spectral[kTemporal][kBlock * kBlock];
  double line[kTemporal];

  const int max_bx = std::max(w - kBlock, 0);
  const int max_by = std::max(h - kBlock, 0);
  for (int by = 0;; by += kStep) {
    const int y0 = std::min(by, max_by);
    for (int bx = 0;; bx += kStep) {
      const int x0 = std::min(bx, max_bx);

      for (int t = 0; t < kTemporal; ++t) {
        const auto& src = *window[t];
        for (int y = 0; y < kBlock; ++y) {
          const int sy = std::min(y0 + y, h - 1);
          for (int x = 0; x < kBlock; ++x) {
            const int sx = std::min(x0 + x, w - 1);
            volume[t][y * kBlock + x] = src[static_cast<size_t>(sy) * w + sx];
          }
        }
        sdct.forward2d(volume[t], spectral[t]);
      }
      for (int i = 0; i < kBlock * kBlock; ++i) {
        for (int t = 0; t < kTemporal; ++t) line[t] = spectral[t][i];
        double coeff[kTemporal];
        tdct.forward(line, coeff);
        for (int t = 0; t < kTemporal; ++t) {
          if (t == 0 && i == 0) continue;  // DC of the volume passes through
          const double e = coeff[t] * coeff[t];
          coeff[t] *= e > s2 ? (e - s2) / e : 0.0;
        }
        tdct.inverse(coeff, line);
        for (int t = 0; t < kTemporal; ++t) spectral[t][i] = line[t];
      }
      // Middle slice back to pixels, uniform overlap-add.
      sdct.inverse2d(spectral[kTemporal / 2], volume[0]);
      for (int y = 0; y < kBlock; ++y) {
        const int sy = y0 + y;
        if (sy >= h) continue;
        for (int x = 0; x < kBlock; ++x) {
          const int sx = x0 + x;
          if (sx >= w) continue;
          acc[static_cast<size_t>(sy) * w + sx] += volume[0][y * kBlock + x];
          weight[static_cast<size_t>(sy) * w + sx] += 1.0;
        }
      }
      if (bx >= max_bx) break;
    }
    if (by >= max_by) break;
  }

  out.resize(acc.size());
  for (size_t i = 0; i < acc.size(); ++i)
    out[i] = static_cast<uint8_t>(std::clamp(std::lround(acc[i] / weight[i]), 0L, 255L));
}

}  // namespace

Clip wiener3d_denoise(const Clip& clip, double strength) {
  if (strength < 0) throw std::invalid_argument("wiener3d_denoise: strength must be >= 0");
  if (strength == 0.0) return clip;
  if (clip.frame_count() == 0) throw std::invalid_argument("wiener3d_denoise: empty clip");

  // Noise energy per orthonormal 3-D coefficient.
  const double s2 = strength * strength;
  const size_t n = clip.frame_count();
  std::vector<VideoFrame> out_frames(clip.frames().begin(), clip.frames().end());

  for (size_t t = 0; t < n; ++t) {
    const size_t prev = t == 0 ? 0 : t - 1;
    const size_t next = t + 1 >= n ? n - 1 : t + 1;
    VideoFrame& dst = out_frames[t];
    for (int p = 0; p < 3; ++p) {
      const std::vector<const std::vector<uint8_t>*> window = {
          &clip.frame(prev).plane(p), &clip.frame(t).plane(p), &clip.frame(next).plane(p)};
      filter_plane(window, clip.frame(t).plane_width(p), clip.frame(t).plane_height(p), s2,
                   dst.plane(p));
    }
  }
  Clip out(std::move(out_frames), clip.frame_rate(), clip.source_id());
  return out;
}

}  // namespace clipforge

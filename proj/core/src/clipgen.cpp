#include "clipforge/clipgen.hpp"

#include <algorithm>
#include <cmath>

#include "clipforge/rng.hpp"

namespace clipforge {

Clip make_constant_clip(int width, int height, int n_frames, FrameRate rate, uint8_t value,
                        ChromaSubsampling cs) {
  std::vector<VideoFrame> frames(static_cast<size_t>(n_frames),
                                 VideoFrame(width, height, cs, value));
  return Clip(std::move(frames), rate, "constant");
}

Clip make_random_clip(int width, int height, int n_frames, FrameRate rate, uint64_t seed,
                      ChromaSubsampling cs) {
  SplitMix64 rng(seed);
  std::vector<VideoFrame> frames;
  frames.reserve(static_cast<size_t>(n_frames));
  for (int t = 0; t < n_frames; ++t) {
    VideoFrame f(width, height, cs);
    for (int p = 0; p < 3; ++p)
      for (auto& v : f.plane(p)) v = static_cast<uint8_t>(rng.next_u64() & 0xff);
    frames.push_back(std::move(f));
  }
  return Clip(std::move(frames), rate, "random-" + std::to_string(seed));
}

Clip make_structured_clip(int width, int height, int n_frames, FrameRate rate, uint64_t seed,
                          ChromaSubsampling cs) {
  SplitMix64 rng(seed);
  const double phase0 = rng.next_double() * 6.28318530717958648;
  // Two drifting rectangles with random size/velocity, plus sinusoid texture.
  struct Rect {
    double x, y, w, h, vx, vy;
    int level;
  };
  Rect rects[2];
  for (auto& r : rects) {
    r.w = width * (0.12 + 0.13 * rng.next_double());
    r.h = height * (0.12 + 0.13 * rng.next_double());
    r.x = rng.next_double() * (width - r.w);
    r.y = rng.next_double() * (height - r.h);
    r.vx = (rng.next_double() - 0.5) * width * 0.04;
    r.vy = (rng.next_double() - 0.5) * height * 0.04;
    r.level = 48 + static_cast<int>(rng.next_below(160));
  }

  // Static fine-grained detail, fragile under coring: heavy denoising has a
  // visible cost, so strength sweeps develop a genuine interior optimum.
  const uint64_t detail_salt = rng.next_u64();
  auto detail = [&](int x, int y) {
    uint64_t h = hash_combine(detail_salt, (static_cast<uint64_t>(x) << 20) ^
                                               static_cast<uint64_t>(y));
    return SplitMix64(h).next_double() * 16.0 - 8.0;
  };

  std::vector<VideoFrame> frames;
  frames.reserve(static_cast<size_t>(n_frames));
  for (int t = 0; t < n_frames; ++t) {
    VideoFrame f(width, height, cs);
    auto& y = f.luma();
    for (int yy = 0; yy < height; ++yy) {
      for (int xx = 0; xx < width; ++xx) {
        double v = 110.0 + 50.0 * (static_cast<double>(xx) / width) +
                   30.0 * (static_cast<double>(yy) / height);
        v += 26.0 * std::sin(6.28318530717958648 * (3.0 * xx / 64.0 + 0.08 * t) + phase0) *
             std::sin(6.28318530717958648 * (2.0 * yy / 64.0));
        for (const auto& r : rects) {
          const double rx = r.x + r.vx * t, ry = r.y + r.vy * t;
          if (xx >= rx && xx < rx + r.w && yy >= ry && yy < ry + r.h) v = r.level;
        }
        v += detail(xx, yy);
        y[static_cast<size_t>(yy) * width + xx] =
            static_cast<uint8_t>(std::clamp(std::lround(v), 16L, 235L));
      }
    }
    for (int p = 1; p < 3; ++p) {
      const int pw = f.plane_width(p), ph = f.plane_height(p);
      for (int yy = 0; yy < ph; ++yy)
        for (int xx = 0; xx < pw; ++xx)
          f.set(p, xx, yy,
                static_cast<uint8_t>(128 + (p == 1 ? 1 : -1) *
                                               std::lround(20.0 * xx / pw - 10.0)));
    }
    frames.push_back(std::move(f));
  }
  return Clip(std::move(frames), rate, "structured-" + std::to_string(seed));
}

}  // namespace clipforge

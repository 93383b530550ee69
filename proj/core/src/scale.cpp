#include "clipforge/scale.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace clipforge {

namespace {

int round_to_even(double v) {
  int r = static_cast<int>(std::lround(v / 2.0)) * 2;
  return std::max(r, 2);
}

}  // namespace

std::pair<int, int> proxy_resolution(int width, int height) {
  if (width < 16 || height < 16)
    throw std::invalid_argument("proxy_resolution: dimensions below 16x16");
  if (height <= 144) return {width, height};
  if (height <= 720) {
    const double scale = 144.0 / height;
    return {round_to_even(width * scale), 144};
  }
  return {round_to_even(width / 2.0), round_to_even(height / 2.0)};
}

VideoFrame crop_to_even(const VideoFrame& frame) {
  const int w = frame.width() & ~1;
  const int h = frame.height() & ~1;
  if (w == frame.width() && h == frame.height()) return frame;
  VideoFrame out(w, h, frame.subsampling());
  for (int p = 0; p < 3; ++p) {
    const int pw = out.plane_width(p), ph = out.plane_height(p);
    for (int y = 0; y < ph; ++y)
      for (int x = 0; x < pw; ++x) out.set(p, x, y, frame.at(p, x, y));
  }
  return out;
}

VideoFrame downsample_half(const VideoFrame& frame) {
  if ((frame.width() | frame.height()) & 1)
    throw std::invalid_argument("downsample_half: dimensions must be even");
  VideoFrame out(frame.width() / 2, frame.height() / 2, frame.subsampling());
  for (int p = 0; p < 3; ++p) {
    const int ow = out.plane_width(p), oh = out.plane_height(p);
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        const unsigned sum = frame.at(p, 2 * x, 2 * y) + frame.at(p, 2 * x + 1, 2 * y) +
                             frame.at(p, 2 * x, 2 * y + 1) + frame.at(p, 2 * x + 1, 2 * y + 1);
        out.set(p, x, y, static_cast<uint8_t>((sum + 2) >> 2));
      }
    }
  }
  return out;
}

Clip downsample_half(const Clip& clip) {
  std::vector<VideoFrame> frames;
  frames.reserve(clip.frame_count());
  for (const auto& f : clip.frames()) frames.push_back(downsample_half(f));
  return Clip(std::move(frames), clip.frame_rate(), clip.source_id());
}

namespace {

void resize_plane(const VideoFrame& src, int plane, VideoFrame& dst) {
  const int sw = src.plane_width(plane), sh = src.plane_height(plane);
  const int dw = dst.plane_width(plane), dh = dst.plane_height(plane);
  const double sx = static_cast<double>(sw) / dw;
  const double sy = static_cast<double>(sh) / dh;
  for (int oy = 0; oy < dh; ++oy) {
    const double y0 = oy * sy, y1 = (oy + 1) * sy;
    const int iy0 = static_cast<int>(std::floor(y0));
    const int iy1 = std::min(sh, static_cast<int>(std::ceil(y1)));
    for (int ox = 0; ox < dw; ++ox) {
      const double x0 = ox * sx, x1 = (ox + 1) * sx;
      const int ix0 = static_cast<int>(std::floor(x0));
      const int ix1 = std::min(sw, static_cast<int>(std::ceil(x1)));
      double acc = 0.0, wsum = 0.0;
      for (int y = iy0; y < iy1; ++y) {
        const double wy = std::min<double>(y + 1, y1) - std::max<double>(y, y0);
        for (int x = ix0; x < ix1; ++x) {
          const double wx = std::min<double>(x + 1, x1) - std::max<double>(x, x0);
          acc += wy * wx * src.at(plane, x, y);
          wsum += wy * wx;
        }
      }
      const double v = acc / wsum;
      dst.set(plane, ox, oy,
              static_cast<uint8_t>(std::clamp(std::lround(v), 0L, 255L)));
    }
  }
}

}  // namespace

VideoFrame resize_box(const VideoFrame& frame, int out_width, int out_height) {
  if (out_width <= 0 || out_height <= 0)
    throw std::invalid_argument("resize_box: target dimensions must be positive");
  if (out_width > frame.width() || out_height > frame.height())
    throw std::invalid_argument("resize_box: upscaling not supported");
  if (out_width == frame.width() && out_height == frame.height()) return frame;
  VideoFrame out(out_width, out_height, frame.subsampling());
  for (int p = 0; p < 3; ++p) resize_plane(frame, p, out);
  return out;
}

Clip resize_box(const Clip& clip, int out_width, int out_height) {
  std::vector<VideoFrame> frames;
  frames.reserve(clip.frame_count());
  for (const auto& f : clip.frames()) frames.push_back(resize_box(f, out_width, out_height));
  return Clip(std::move(frames), clip.frame_rate(), clip.source_id());
}

}  // namespace clipforge

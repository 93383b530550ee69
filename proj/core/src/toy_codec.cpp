#include "clipforge/toy_codec.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <unordered_map>

#include "clipforge/dct.hpp"

namespace clipforge {

namespace {

constexpr int kBlock = 8;

// All 8x8 block coefficients of one plane, edge-replicated to a multiple of 8.
void plane_coefficients(const VideoFrame& f, int plane, std::vector<double>& coeffs) {
  const int w = f.plane_width(plane), h = f.plane_height(plane);
  const int bw = (w + kBlock - 1) / kBlock, bh = (h + kBlock - 1) / kBlock;
  const Dct& dct = dct8();
  double block[kBlock * kBlock], out[kBlock * kBlock];
  for (int by = 0; by < bh; ++by) {
    for (int bx = 0; bx < bw; ++bx) {
      for (int y = 0; y < kBlock; ++y) {
        const int sy = std::min(by * kBlock + y, h - 1);
        for (int x = 0; x < kBlock; ++x) {
          const int sx = std::min(bx * kBlock + x, w - 1);
          block[y * kBlock + x] = f.at(plane, sx, sy);
        }
      }
      dct.forward2d(block, out);
      coeffs.insert(coeffs.end(), out, out + kBlock * kBlock);
    }
  }
}

double entropy_bits_per_symbol(const std::vector<double>& coeffs, double step) {
  std::unordered_map<int64_t, size_t> hist;
  for (double c : coeffs) ++hist[static_cast<int64_t>(std::llround(c / step))];
  const double n = static_cast<double>(coeffs.size());
  double h = 0.0;
  for (const auto& [sym, count] : hist) {
    const double p = count / n;
    h -= p * std::log2(p);
  }
  return h;
}

void reconstruct_plane(VideoFrame& f, int plane, const std::vector<double>& coeffs,
                       size_t& cursor, double step) {
  const int w = f.plane_width(plane), h = f.plane_height(plane);
  const int bw = (w + kBlock - 1) / kBlock, bh = (h + kBlock - 1) / kBlock;
  const Dct& dct = dct8();
  double quantized[kBlock * kBlock], pixels[kBlock * kBlock];
  for (int by = 0; by < bh; ++by) {
    for (int bx = 0; bx < bw; ++bx) {
      for (int i = 0; i < kBlock * kBlock; ++i)
        quantized[i] = static_cast<double>(std::llround(coeffs[cursor + i] / step)) * step;
      cursor += kBlock * kBlock;
      dct.inverse2d(quantized, pixels);
      for (int y = 0; y < kBlock; ++y) {
        const int sy = by * kBlock + y;
        if (sy >= h) continue;
        for (int x = 0; x < kBlock; ++x) {
          const int sx = bx * kBlock + x;
          if (sx >= w) continue;
          f.set(plane, sx, sy,
                static_cast<uint8_t>(std::clamp(std::lround(pixels[y * kBlock + x]), 0L, 255L)));
        }
      }
    }
  }
}

}  // namespace

EncodeResult toy_intra_encode(const Clip& clip, double target_bitrate_kbps) {
  if (!(target_bitrate_kbps > 0))
    throw CodecError("toy_intra_encode: target bitrate must be positive");
  const auto t_start = std::chrono::steady_clock::now();

  std::vector<double> coeffs;
  for (const auto& f : clip.frames())
    for (int p = 0; p < 3; ++p) plane_coefficients(f, p, coeffs);

  const double duration_s = clip.duration_seconds();
  const double symbols = static_cast<double>(coeffs.size());
  auto rate_for_step = [&](double step) {
    return entropy_bits_per_symbol(coeffs, step) * symbols / duration_s / 1000.0;
  };

  double lo = 0.05, hi = 8192.0;  // fine step = high rate, coarse step = low rate
  double rate_lo = rate_for_step(lo), rate_hi = rate_for_step(hi);
  double step, rate;
  bool limited = false;
  if (target_bitrate_kbps >= rate_lo) {
    step = lo;
    rate = rate_lo;
    limited = rate_lo < target_bitrate_kbps * (1.0 - kToyRateTolerance);
  } else if (target_bitrate_kbps <= rate_hi) {
    step = hi;
    rate = rate_hi;
    limited = rate_hi > target_bitrate_kbps * (1.0 + kToyRateTolerance);
  } else {
    step = std::sqrt(lo * hi);
    rate = rate_for_step(step);
    for (int iter = 0; iter < 60; ++iter) {
      if (std::abs(rate - target_bitrate_kbps) <= kToyRateTolerance * target_bitrate_kbps) break;
      if (rate > target_bitrate_kbps)
        lo = step;
      else
        hi = step;
      step = std::sqrt(lo * hi);
      rate = rate_for_step(step);
    }
    limited = std::abs(rate - target_bitrate_kbps) > kToyRateTolerance * target_bitrate_kbps;
  }

  EncodeResult res;
  res.bitrate_kbps = std::max(rate, 1e-9);
  res.rate_limited = limited;

  Clip out = clip;
  size_t cursor = 0;
  for (auto& f : out.frames())
    for (int p = 0; p < 3; ++p) reconstruct_plane(f, p, coeffs, cursor, step);
  out.raw_y4m_stream_header.clear();
  out.raw_y4m_frame_headers.clear();
  res.output_clip = std::move(out);

  res.wall_seconds = std::max(
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count(), 1e-9);
  return res;
}

}  // namespace clipforge

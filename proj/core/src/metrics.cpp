#include "clipforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace clipforge {

namespace {

void require_same_shape(const Clip& a, const Clip& b) {
  if (a.frame_count() != b.frame_count())
    throw MetricError("metric: clip lengths differ (" + std::to_string(a.frame_count()) +
                      " vs " + std::to_string(b.frame_count()) + ")");
  if (a.frame_count() == 0) throw MetricError("metric: empty clips");
  if (!a.frame(0).same_shape(b.frame(0)))
    throw MetricError("metric: frame dimensions differ");
}

double mse_to_psnr(double mse) {
  if (mse <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(255.0 * 255.0 / mse));
}

double luma_sse(const VideoFrame& a, const VideoFrame& b) {
  const auto& pa = a.luma();
  const auto& pb = b.luma();
  double sse = 0.0;
  for (size_t i = 0; i < pa.size(); ++i) {
    const double d = static_cast<double>(pa[i]) - static_cast<double>(pb[i]);
    sse += d * d;
  }
  return sse;
}

}  // namespace

double psnr_frame(const VideoFrame& reference, const VideoFrame& test) {
  if (!reference.same_shape(test)) throw MetricError("psnr: frame dimensions differ");
  return mse_to_psnr(luma_sse(reference, test) / static_cast<double>(reference.luma().size()));
}

double psnr(const Clip& reference, const Clip& test) {
  require_same_shape(reference, test);
  double sse = 0.0;
  size_t n = 0;
  for (size_t i = 0; i < reference.frame_count(); ++i) {
    sse += luma_sse(reference.frame(i), test.frame(i));
    n += reference.frame(i).luma().size();
  }
  return mse_to_psnr(sse / static_cast<double>(n));
}

// ---------------------------------------------------------------------------
// MS-SSIM

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;
constexpr double kL = 255.0;
constexpr int kScales = 5;
constexpr double kWeights[kScales] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

struct PlaneD {
  int w = 0, h = 0;
  std::vector<double> v;
};

const std::vector<double>& gauss_kernel() {
  static const std::vector<double> k = [] {
    std::vector<double> g(kWindow);
    double sum = 0.0;
    for (int i = 0; i < kWindow; ++i) {
      const double d = i - (kWindow - 1) / 2.0;
      g[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
      sum += g[i];
    }
    for (auto& x : g) x /= sum;
    return g;
  }();
  return k;
}

// Valid-mode separable Gaussian: output is (w-10) x (h-10).
PlaneD gauss_filter(const PlaneD& in) {
  const auto& g = gauss_kernel();
  PlaneD hpass{in.w - kWindow + 1, in.h, {}};
  hpass.v.resize(static_cast<size_t>(hpass.w) * hpass.h);
  for (int y = 0; y < in.h; ++y) {
    const double* row = &in.v[static_cast<size_t>(y) * in.w];
    for (int x = 0; x < hpass.w; ++x) {
      double acc = 0.0;
      for (int i = 0; i < kWindow; ++i) acc += g[i] * row[x + i];
      hpass.v[static_cast<size_t>(y) * hpass.w + x] = acc;
    }
  }
  PlaneD out{hpass.w, in.h - kWindow + 1, {}};
  out.v.resize(static_cast<size_t>(out.w) * out.h);
  for (int y = 0; y < out.h; ++y) {
    for (int x = 0; x < out.w; ++x) {
      double acc = 0.0;
      for (int i = 0; i < kWindow; ++i)
        acc += g[i] * hpass.v[static_cast<size_t>(y + i) * hpass.w + x];
      out.v[static_cast<size_t>(y) * out.w + x] = acc;
    }
  }
  return out;
}

PlaneD downsample2(const PlaneD& in) {
  PlaneD out{in.w / 2, in.h / 2, {}};
  out.v.resize(static_cast<size_t>(out.w) * out.h);
  for (int y = 0; y < out.h; ++y)
    for (int x = 0; x < out.w; ++x)
      out.v[static_cast<size_t>(y) * out.w + x] =
          0.25 * (in.v[static_cast<size_t>(2 * y) * in.w + 2 * x] +
                  in.v[static_cast<size_t>(2 * y) * in.w + 2 * x + 1] +
                  in.v[static_cast<size_t>(2 * y + 1) * in.w + 2 * x] +
                  in.v[static_cast<size_t>(2 * y + 1) * in.w + 2 * x + 1]);
  return out;
}

PlaneD luma_to_double(const VideoFrame& f) {
  PlaneD p{f.width(), f.height(), {}};
  p.v.assign(f.luma().begin(), f.luma().end());
  return p;
}

struct ScaleScore {
  double cs = 0.0;
  double luminance_cs = 0.0;  // mean of l*cs, used at the coarsest scale
};

ScaleScore ssim_scale(const PlaneD& x, const PlaneD& y) {
  const size_t n = x.v.size();
  PlaneD x2{x.w, x.h, std::vector<double>(n)}, y2{x.w, x.h, std::vector<double>(n)},
      xy{x.w, x.h, std::vector<double>(n)};
  for (size_t i = 0; i < n; ++i) {
    x2.v[i] = x.v[i] * x.v[i];
    y2.v[i] = y.v[i] * y.v[i];
    xy.v[i] = x.v[i] * y.v[i];
  }
  const PlaneD mx = gauss_filter(x), my = gauss_filter(y);
  const PlaneD ex2 = gauss_filter(x2), ey2 = gauss_filter(y2), exy = gauss_filter(xy);

  const double c1 = (kK1 * kL) * (kK1 * kL);
  const double c2 = (kK2 * kL) * (kK2 * kL);
  double cs_sum = 0.0, lcs_sum = 0.0;
  const size_t m = mx.v.size();
  for (size_t i = 0; i < m; ++i) {
    const double sx2 = ex2.v[i] - mx.v[i] * mx.v[i];
    const double sy2 = ey2.v[i] - my.v[i] * my.v[i];
    const double sxy = exy.v[i] - mx.v[i] * my.v[i];
    const double cs = (2.0 * sxy + c2) / (sx2 + sy2 + c2);
    const double l = (2.0 * mx.v[i] * my.v[i] + c1) / (mx.v[i] * mx.v[i] + my.v[i] * my.v[i] + c1);
    cs_sum += cs;
    lcs_sum += l * cs;
  }
  return {cs_sum / static_cast<double>(m), lcs_sum / static_cast<double>(m)};
}

}  // namespace

double ms_ssim_frame(const VideoFrame& reference, const VideoFrame& test) {
  if (!reference.same_shape(test)) throw MetricError("ms_ssim: frame dimensions differ");
  if (reference.width() < kMsSsimMinDim || reference.height() < kMsSsimMinDim)
    throw MetricError("ms_ssim: luma must be at least " + std::to_string(kMsSsimMinDim) + "x" +
                      std::to_string(kMsSsimMinDim) + " for 5 scales");

  PlaneD x = luma_to_double(reference);
  PlaneD y = luma_to_double(test);
  double score = 1.0;
  for (int s = 0; s < kScales; ++s) {
    const ScaleScore sc = ssim_scale(x, y);
    if (s + 1 < kScales) {
      score *= std::pow(std::max(sc.cs, 1e-12), kWeights[s]);
      x = downsample2(x);
      y = downsample2(y);
    } else {
      score *= std::pow(std::max(sc.luminance_cs, 1e-12), kWeights[s]);
    }
  }
  return score;
}

double ms_ssim(const Clip& reference, const Clip& test) {
  require_same_shape(reference, test);
  double sum = 0.0;
  for (size_t i = 0; i < reference.frame_count(); ++i)
    sum += ms_ssim_frame(reference.frame(i), test.frame(i));
  return sum / static_cast<double>(reference.frame_count());
}

}  // namespace clipforge

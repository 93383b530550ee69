#include "clipforge/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "clipforge/dct.hpp"
#include "clipforge/rng.hpp"

namespace clipforge {

namespace {

constexpr int kTile = 32;

struct Stats {
  double mean = 0, max = 0, median = 0, stddev = 0;
};

Stats summarize(std::vector<double> v) {
  Stats s;
  if (v.empty()) return s;
  const size_t n = v.size();
  double sum = 0, sq = 0;
  for (double x : v) {
    sum += x;
    sq += x * x;
    s.max = std::max(s.max, x);
  }
  s.mean = sum / static_cast<double>(n);
  s.stddev = std::sqrt(std::max(0.0, sq / static_cast<double>(n) - s.mean * s.mean));
  std::sort(v.begin(), v.end());
  s.median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  return s;
}

// Mean |coefficient| of the tile's DCT, DC excluded.
std::vector<double> tile_energies(const VideoFrame& f) {
  const int w = f.width(), h = f.height();
  const int tw = w / kTile, th = h / kTile;  // partial tiles dropped
  const Dct& dct = dct32();
  std::vector<double> energies;
  energies.reserve(static_cast<size_t>(tw) * th);
  std::vector<double> block(kTile * kTile), spectrum(kTile * kTile);
  for (int ty = 0; ty < th; ++ty) {
    for (int tx = 0; tx < tw; ++tx) {
      double mean = 0.0;
      for (int y = 0; y < kTile; ++y)
        for (int x = 0; x < kTile; ++x) {
          block[y * kTile + x] = f.at(0, tx * kTile + x, ty * kTile + y);
          mean += block[y * kTile + x];
        }
      // Centering only moves the (excluded) DC term, but makes flat tiles
      // come out exactly zero instead of accumulating cosine-sum dust.
      mean /= kTile * kTile;
      for (auto& v : block) v -= mean;
      dct.forward2d(block.data(), spectrum.data());
      double acc = 0.0;
      for (int i = 1; i < kTile * kTile; ++i) acc += std::abs(spectrum[i]);
      energies.push_back(acc / (kTile * kTile - 1));
    }
  }
  return energies;
}

}  // namespace

ComplexityFeatures extract_complexity(const Clip& clip, int preset, int crf) {
  if (clip.width() < kTile || clip.height() < kTile)
    throw std::invalid_argument("extract_complexity: luma must be at least 32x32");

  ComplexityFeatures f;
  f.height = clip.height();
  f.total_pixels = static_cast<double>(clip.width()) * clip.height();
  f.frame_rate = clip.frame_rate().fps();
  f.n_frames = static_cast<double>(clip.frame_count());
  f.mean_brightness = mean_brightness(clip);
  f.preset = preset;
  f.target_crf = crf;

  std::vector<std::vector<double>> per_frame;
  per_frame.reserve(clip.frame_count());
  for (const auto& frame : clip.frames()) per_frame.push_back(tile_energies(frame));

  std::vector<double> se;
  se.reserve(per_frame.size());
  for (const auto& tiles : per_frame) {
    double acc = 0.0;
    for (double e : tiles) acc += e;
    se.push_back(acc / static_cast<double>(tiles.size()));
  }
  const Stats se_stats = summarize(se);
  f.se_mean = se_stats.mean;
  f.se_max = se_stats.max;
  f.se_median = se_stats.median;
  f.se_std = se_stats.stddev;

  if (clip.frame_count() < 2) {
    f.te_undefined = true;
    return f;
  }
  std::vector<double> te;
  te.reserve(clip.frame_count() - 1);
  for (size_t t = 1; t < per_frame.size(); ++t) {
    double acc = 0.0;
    for (size_t b = 0; b < per_frame[t].size(); ++b)
      acc += std::abs(per_frame[t][b] - per_frame[t - 1][b]);
    te.push_back(acc / static_cast<double>(per_frame[t].size()));
  }
  const Stats te_stats = summarize(te);
  f.te_mean = te_stats.mean;
  f.te_max = te_stats.max;
  f.te_median = te_stats.median;
  f.te_std = te_stats.stddev;
  return f;
}

const std::vector<std::string>& ComplexityFeatures::feature_names() {
  static const std::vector<std::string> names = {
      "height",  "total_pixels", "frame_rate", "n_frames", "se_mean",   "se_max", "se_median",
      "se_std",  "te_mean",      "te_max",     "te_median", "te_std",   "mean_brightness",
      "preset",  "target_crf",
  };
  return names;
}

uint64_t ComplexityFeatures::schema_hash() {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& n : feature_names()) h = fnv1a64(n.data(), n.size(), h);
  return h;
}

std::vector<double> ComplexityFeatures::to_vector() const {
  return {height, total_pixels, frame_rate, n_frames, se_mean, se_max, se_median, se_std,
          te_mean, te_max, te_median, te_std, mean_brightness, preset, target_crf};
}

ComplexityFeatures ComplexityFeatures::from_vector(const std::vector<double>& v) {
  if (v.size() != feature_names().size())
    throw std::invalid_argument("ComplexityFeatures: wrong vector size");
  ComplexityFeatures f;
  f.height = v[0];
  f.total_pixels = v[1];
  f.frame_rate = v[2];
  f.n_frames = v[3];
  f.se_mean = v[4];
  f.se_max = v[5];
  f.se_median = v[6];
  f.se_std = v[7];
  f.te_mean = v[8];
  f.te_max = v[9];
  f.te_median = v[10];
  f.te_std = v[11];
  f.mean_brightness = v[12];
  f.preset = v[13];
  f.target_crf = v[14];
  return f;
}

}  // namespace clipforge

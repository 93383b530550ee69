#include "clipforge/synthetic_codec.hpp"

#include <cmath>
#include <cstring>

#include "clipforge/rng.hpp"

namespace clipforge {

void SyntheticCodecSpec::validate() const {
  if (!(beta > 0)) throw CodecError("synthetic codec: beta must be > 0");
  if (gamma < 0) throw CodecError("synthetic codec: gamma must be >= 0");
  if (k_star.empty()) throw CodecError("synthetic codec: k_star must be non-empty");
  for (double k : k_star)
    if (!(k > 0)) throw CodecError("synthetic codec: k_star entries must be > 0");
  if (qp_list.size() < 4) throw CodecError("synthetic codec: qp_list needs >= 4 entries");
}

double SyntheticCodecSpec::anchor_rate_kbps(double qp) const {
  return std::exp((quality_for_qp(qp) - alpha) / beta);
}

double SyntheticCodecSpec::rate_multiplier(const std::vector<double>& k) const {
  double m = 1.0;
  for (size_t g = 0; g < k_star.size(); ++g) {
    const double kg = g < k.size() ? k[g] : 1.0;
    const double d = std::log(kg) - std::log(k_star[g]);
    m *= 1.0 + gamma * d * d;
  }
  return m;
}

double SyntheticCodecSpec::closed_form_bd_rate(const std::vector<double>& k) const {
  return 100.0 * (rate_multiplier(k) / rate_multiplier({}) - 1.0);
}

SyntheticCodec::SyntheticCodec(SyntheticCodecSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
}

std::string SyntheticCodec::fastest_preset() const {
  auto best = spec_.preset_speed_factors.begin();
  for (auto it = spec_.preset_speed_factors.begin(); it != spec_.preset_speed_factors.end(); ++it)
    if (it->second < best->second) best = it;
  return best->first;
}

EncodeResult SyntheticCodec::encode(const Clip& clip, const EncodeRequest& request) {
  const std::string preset = request.preset.empty() ? spec_.default_preset : request.preset;
  const auto it = spec_.preset_speed_factors.find(preset);
  if (it == spec_.preset_speed_factors.end())
    throw CodecError("synthetic codec: unknown preset '" + preset + "'");

  for (double kg : request.k)
    if (!(kg > 0)) throw CodecError("synthetic codec: k entries must be > 0");

  double rate = spec_.anchor_rate_kbps(request.qp) * spec_.rate_multiplier(request.k);
  const double megapixel_frames = static_cast<double>(clip.width()) * clip.height() *
                                  static_cast<double>(clip.frame_count()) / 1e6;
  double wall = spec_.time_coeff * megapixel_frames * it->second *
                std::pow(2.0, (spec_.qp_ref - request.qp) / spec_.qp_step_ref);

  if (spec_.noise_std_log > 0.0) {
    // Jitter keyed on all encode inputs: identical calls reproduce exactly.
    // The key uses the effective per-group multipliers so an omitted k and
    // an explicit k=1 draw the same noise (they are the same encode).
    uint64_t h = spec_.seed;
    h = fnv1a64(clip.source_id().data(), clip.source_id().size(), h);
    h = hash_combine(h, static_cast<uint64_t>(clip.width()));
    h = hash_combine(h, static_cast<uint64_t>(clip.height()));
    h = hash_combine(h, static_cast<uint64_t>(clip.frame_count()));
    h = hash_combine(h, static_cast<uint64_t>(request.qp));
    h = fnv1a64(preset.data(), preset.size(), h);
    for (size_t g = 0; g < spec_.k_star.size(); ++g) {
      const double kg = g < request.k.size() ? request.k[g] : 1.0;
      uint64_t bits;
      static_assert(sizeof(bits) == sizeof(kg));
      std::memcpy(&bits, &kg, sizeof(bits));
      h = hash_combine(h, bits);
    }
    SplitMix64 rng(h);
    rate *= std::exp(spec_.noise_std_log * rng.next_gaussian());
    wall *= std::exp(spec_.noise_std_log * rng.next_gaussian());
  }

  EncodeResult res;
  res.bitrate_kbps = rate;
  res.wall_seconds = std::max(wall, 1e-9);
  res.analytic_quality = spec_.quality_for_qp(request.qp);
  return res;
}

}  // namespace clipforge

#ifndef CLIPFORGE_SYNTHETIC_CODEC_HPP
#define CLIPFORGE_SYNTHETIC_CODEC_HPP

#include <cstdint>
#include <map>

#include "clipforge/codec.hpp"

namespace clipforge {

// Analytic stand-in codec. The anchor RD model is quality = alpha +
// beta*ln(rate_kbps); steering k away from the planted k_star inflates the
// rate by m(k) = prod_g (1 + gamma*(ln k_g - ln k_star_g)^2) independently
// of quality, which makes BD-rate against the k=1 baseline closed-form:
//     bd(k) = 100 * (m(k)/m(1) - 1),   minimized exactly at k = k_star.
struct SyntheticCodecSpec {
  double alpha = 5.0;
  double beta = 4.0;
  std::vector<double> k_star = {2.0};  // one entry per frame group
  double gamma = 0.5;
  double time_coeff = 1.0;  // seconds per megapixel-frame at reference QP
  std::map<std::string, double> preset_speed_factors = {{"default", 1.0}, {"fast", 0.01}};
  std::string default_preset = "default";
  double noise_std_log = 0.0;  // lognormal jitter on rate and time
  uint64_t seed = 0;
  std::vector<int> qp_list = {22, 27, 32, 37, 42, 47};
  double qp_ref = 32.0;       // wall time doubles every qp_step_ref below qp_ref
  double qp_step_ref = 10.0;

  void validate() const;

  // Fixed affine QP->quality map; only the relative geometry matters.
  double quality_for_qp(double qp) const { return 60.0 - 0.8 * qp; }
  double anchor_rate_kbps(double qp) const;
  double rate_multiplier(const std::vector<double>& k) const;

  // Closed-form BD-rate of the k curve against the k=1 baseline.
  double closed_form_bd_rate(const std::vector<double>& k) const;
  double closed_form_bd_rate_at_kstar() const { return closed_form_bd_rate(k_star); }
};

class SyntheticCodec final : public CodecGateway {
 public:
  explicit SyntheticCodec(SyntheticCodecSpec spec);

  EncodeResult encode(const Clip& clip, const EncodeRequest& request) override;
  const std::vector<int>& qp_list() const override { return spec_.qp_list; }
  std::string default_preset() const override { return spec_.default_preset; }
  std::string fastest_preset() const override;
  size_t frame_group_count() const override { return spec_.k_star.size(); }

  const SyntheticCodecSpec& spec() const { return spec_; }

 private:
  SyntheticCodecSpec spec_;
};

}  // namespace clipforge

#endif  // CLIPFORGE_SYNTHETIC_CODEC_HPP

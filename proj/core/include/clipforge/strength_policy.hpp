#ifndef CLIPFORGE_STRENGTH_POLICY_HPP
#define CLIPFORGE_STRENGTH_POLICY_HPP

#include <string>
#include <vector>

#include "clipforge/preproc_sweep.hpp"

namespace clipforge {

// Full bivariate degree-5 polynomial (21 coefficients) in normalized
// (sigma, ln rate), mapping a measured degradation level and target bitrate
// to the denoiser strength. Queries outside the fitted ranges are clamped
// to the range edge before evaluation; outputs clamp to [0, s_max].
struct StrengthPolicy {
  static constexpr int kDegree = 5;
  static constexpr int kCoefficients = 21;  // (d+1)(d+2)/2

  std::vector<double> coefficients;  // term order: sigma^i * lnrate^j, i+j<=5
  double sigma_min = 0, sigma_max = 1;
  double ln_rate_min = 0, ln_rate_max = 1;
  double s_max = 0;
  double fit_rmse = 0;

  std::string to_json() const;
  static StrengthPolicy from_json(const std::string& text);
};

// Least-squares fit over the argmax table; needs >= 21 entries spanning
// both axes. Throws on a rank-deficient design matrix.
StrengthPolicy fit_policy(const ArgmaxTable& table, double s_max);

double optimal_strength(const StrengthPolicy& policy, double sigma, double rate_kbps);

}  // namespace clipforge

#endif  // CLIPFORGE_STRENGTH_POLICY_HPP

#ifndef CLIPFORGE_K_FEATURES_HPP
#define CLIPFORGE_K_FEATURES_HPP

#include <cstdint>

#include "clipforge/codec.hpp"
#include "clipforge/trees.hpp"

namespace clipforge {

struct ClipMeta {
  int width = 0;
  int height = 0;
  double fps = 30.0;
  size_t n_frames = 0;
};

// Feature vector for k prediction, assembled from the per-frame stats of a
// single default encode (QP 32, k = 1). Per-frame-type aggregates group the
// AV1 frame names with their closest H.26x role: KF with I, GF with P, ARF
// with B. All *_x_* fields are pairwise products of their named factors.
struct KFeatureVector {
  double width = 0, height = 0;
  double bitrate_kbps = 0;
  double msssim_i_y = 0, msssim_i_u = 0, msssim_i_v = 0;
  double msssim_p_y = 0, msssim_p_u = 0, msssim_p_v = 0;
  double msssim_b_y = 0, msssim_b_u = 0, msssim_b_v = 0;
  double p_count = 0, b_count = 0;
  double p_avg_qp = 0, b_avg_qp = 0;
  double p_bitrate_kbps = 0, b_bitrate_kbps = 0;
  double pb_ratio_y = 0, pb_ratio_u = 0, pb_ratio_v = 0;  // P/B quality ratios
  double pb_count_ratio = 0;                              // P count / B count
  double pb_size_ratio = 0;                               // P bits / B bits
  double bitrate_x_pb_ratio_y = 0, bitrate_x_pb_ratio_u = 0, bitrate_x_pb_ratio_v = 0;
  double bitrate_x_pb_count = 0, bitrate_x_pb_size = 0;
  double pb_ratio_y_x_pb_size = 0, pb_ratio_u_x_pb_size = 0, pb_ratio_v_x_pb_size = 0;
  double pb_count_x_pb_size = 0;
  double pb_ratio_y_x_pb_ratio_u = 0, pb_ratio_y_x_pb_ratio_v = 0, pb_ratio_u_x_pb_ratio_v = 0;

  bool missing_frame_types = false;  // e.g. a B-frame-free clip

  static const std::vector<std::string>& feature_names();
  static uint64_t schema_hash();
  std::vector<double> to_vector() const;

  // Re-derives every interaction field from its factors and throws on any
  // mismatch; counts and ratios must also be finite and non-negative.
  void validate() const;
};

KFeatureVector extract_k_features(const std::vector<FrameStats>& stats, const ClipMeta& meta);

struct KPredictor {
  RandomForestRegressor forest;
  uint64_t schema = 0;
  uint64_t seed = 0;
  bool constant_target = false;  // degenerate training set warning
  double constant_value = 1.0;

  std::string to_json() const;
  static KPredictor from_json(const std::string& text);
};

// Random forest regression (squared-error splits) from (features, k_opt)
// pairs; needs at least 20 samples. Deterministic under seed.
KPredictor train_k_predictor(const std::vector<std::pair<KFeatureVector, double>>& dataset,
                             const ForestParams& params, uint64_t seed);

// Clamps the raw forest output into [k_min, k_max].
double predict_k(const KPredictor& model, const KFeatureVector& features, double k_min,
                 double k_max);

}  // namespace clipforge

#endif  // CLIPFORGE_K_FEATURES_HPP

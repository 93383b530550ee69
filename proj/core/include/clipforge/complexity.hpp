#ifndef CLIPFORGE_COMPLEXITY_HPP
#define CLIPFORGE_COMPLEXITY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "clipforge/frame.hpp"

namespace clipforge {

// DCT-energy complexity summary of a clip plus the encode knobs, the input
// of the encode-time models. Spatial energy of a 32x32 luma tile is the
// mean absolute DCT coefficient with DC excluded; temporal energy is the
// mean absolute tile-energy delta between consecutive frames.
struct ComplexityFeatures {
  double height = 0;
  double total_pixels = 0;
  double frame_rate = 0;
  double n_frames = 0;
  double se_mean = 0, se_max = 0, se_median = 0, se_std = 0;
  double te_mean = 0, te_max = 0, te_median = 0, te_std = 0;
  double mean_brightness = 0;
  double preset = 0;      // ordinal ladder index
  double target_crf = 0;
  bool te_undefined = false;  // clip shorter than 2 frames

  static const std::vector<std::string>& feature_names();
  static uint64_t schema_hash();
  std::vector<double> to_vector() const;
  static ComplexityFeatures from_vector(const std::vector<double>& v);
};

ComplexityFeatures extract_complexity(const Clip& clip, int preset, int crf);

}  // namespace clipforge

#endif  // CLIPFORGE_COMPLEXITY_HPP

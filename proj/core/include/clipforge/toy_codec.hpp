#ifndef CLIPFORGE_TOY_CODEC_HPP
#define CLIPFORGE_TOY_CODEC_HPP

#include "clipforge/codec.hpp"

namespace clipforge {

// Minimal intra-only transform codec: per-frame 8x8 DCT, one uniform
// quantizer step for every coefficient, rate measured as the zeroth-order
// entropy of the quantized symbols. The step is bisected until the entropy
// rate matches target_bitrate_kbps within 2%. Small coefficients collapse
// to zero, so the codec exhibits the same coring/denoising side effect as a
// real encoder, which is all the pre-processor experiments need.
//
// rate_limited is set when the target is outside the achievable range
// (coarsest step still too many bits, or finest step still too few).
EncodeResult toy_intra_encode(const Clip& clip, double target_bitrate_kbps);

inline constexpr double kToyRateTolerance = 0.02;

}  // namespace clipforge

#endif  // CLIPFORGE_TOY_CODEC_HPP

#ifndef CLIPFORGE_SCALE_HPP
#define CLIPFORGE_SCALE_HPP

#include <utility>

#include "clipforge/frame.hpp"

namespace clipforge {

// Proxy resolution rule: sources up to 720p map to a 144p proxy
// (aspect-preserving width, rounded to even); anything larger is halved.
// Sources already at or below 144 lines are left untouched.
std::pair<int, int> proxy_resolution(int width, int height);

// 2x2 box decimation, each output sample the rounded mean of its source
// block. Requires even dimensions; crop_to_even() is the canonical fixup.
VideoFrame downsample_half(const VideoFrame& frame);
Clip downsample_half(const Clip& clip);

VideoFrame crop_to_even(const VideoFrame& frame);

// Area-average resampler for arbitrary target sizes (box overlap weights).
// Integer ratios degenerate to exact block means, so a /2 resize equals
// downsample_half sample for sample.
VideoFrame resize_box(const VideoFrame& frame, int out_width, int out_height);
Clip resize_box(const Clip& clip, int out_width, int out_height);

}  // namespace clipforge

#endif  // CLIPFORGE_SCALE_HPP

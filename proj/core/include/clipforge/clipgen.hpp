#ifndef CLIPFORGE_CLIPGEN_HPP
#define CLIPFORGE_CLIPGEN_HPP

#include <cstdint>
#include <string>

#include "clipforge/frame.hpp"

namespace clipforge {

// Synthetic sources. The structured generator stands in for real footage in
// every desk-scale experiment: smooth gradients, oriented sinusoid texture
// and moving rectangles give it nontrivial spatial and temporal energy.

Clip make_constant_clip(int width, int height, int n_frames, FrameRate rate, uint8_t value,
                        ChromaSubsampling cs = ChromaSubsampling::k420);

// Every sample uniformly random. Intended for parser round-trip tests.
Clip make_random_clip(int width, int height, int n_frames, FrameRate rate, uint64_t seed,
                      ChromaSubsampling cs = ChromaSubsampling::k420);

Clip make_structured_clip(int width, int height, int n_frames, FrameRate rate, uint64_t seed,
                          ChromaSubsampling cs = ChromaSubsampling::k420);

}  // namespace clipforge

#endif  // CLIPFORGE_CLIPGEN_HPP

#ifndef CLIPFORGE_WIENER3D_HPP
#define CLIPFORGE_WIENER3D_HPP

#include "clipforge/frame.hpp"

namespace clipforge {

// Block-DCT spatio-temporal denoiser. Per output frame: 8x8x3 volumes
// (3-frame window, edge frames replicated) at 50% spatial overlap, a 3-D
// DCT, power-subtraction coring with the strength s interpreted as the
// assumed noise standard deviation, then uniform overlap-add of the middle
// temporal slice. The per-coefficient gain is
//     g = max(0, |C|^2 - s^2 * N_blk) / |C|^2
// for an unnormalized transform; with the orthonormal kernels used here the
// noise energy per coefficient is s^2, which is the identical rule. The DC
// coefficient passes through untouched, so flat content is preserved. s = 0
// is an exact passthrough.
Clip wiener3d_denoise(const Clip& clip, double strength);

}  // namespace clipforge

#endif  // CLIPFORGE_WIENER3D_HPP

#ifndef CLIPFORGE_Y4M_HPP
#define CLIPFORGE_Y4M_HPP

#include <iosfwd>
#include <string>

#include "clipforge/frame.hpp"

namespace clipforge {

struct Y4mError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// YUV4MPEG2 reader/writer, 8-bit 4:2:0 / 4:2:2 / 4:4:4.
//
// The parser keeps the exact stream and frame header bytes on the Clip so
// write_y4m() can reproduce the input byte for byte. Clips built in memory
// get a canonical "YUV4MPEG2 W H F C" header.
Clip parse_y4m(std::istream& in);
Clip parse_y4m_file(const std::string& path);

// Geometry probe that skips frame payloads instead of decoding them.
struct Y4mInfo {
  int width = 0;
  int height = 0;
  FrameRate rate;
  size_t frame_count = 0;
  ChromaSubsampling subsampling = ChromaSubsampling::k420;
};
Y4mInfo probe_y4m_file(const std::string& path);

void write_y4m(const Clip& clip, std::ostream& out);
void write_y4m_file(const Clip& clip, const std::string& path);
std::string write_y4m_string(const Clip& clip);

}  // namespace clipforge

#endif  // CLIPFORGE_Y4M_HPP

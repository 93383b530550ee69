#include "clipforge/y4m.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace clipforge {

namespace {

constexpr char kStreamMagic[] = "YUV4MPEG2";
constexpr char kFrameMagic[] = "FRAME";

struct HeaderFields {
  int width = 0;
  int height = 0;
  int64_t fps_num = 0;
  int64_t fps_den = 0;
  std::string colorspace;  // token after 'C', empty if absent
};

// Parses the parameter tokens of a signature line ("W640 H480 F30:1 C420 ...").
HeaderFields parse_stream_params(const std::string& line) {
  HeaderFields h;
  std::istringstream tokens(line);
  std::string tok;
  tokens >> tok;  // magic, already checked
  while (tokens >> tok) {
    switch (tok[0]) {
      case 'W': h.width = std::atoi(tok.c_str() + 1); break;
      case 'H': h.height = std::atoi(tok.c_str() + 1); break;
      case 'F': {
        if (std::sscanf(tok.c_str() + 1, "%ld:%ld", &h.fps_num, &h.fps_den) != 2)
          throw Y4mError("y4m: malformed frame-rate token '" + tok + "'");
        break;
      }
      case 'C': h.colorspace = tok.substr(1); break;
      default: break;  // I/A/X tokens preserved verbatim via the raw header
    }
  }
  return h;
}

ChromaSubsampling subsampling_from_tag(const std::string& tag) {
  // Variants like 420jpeg/420mpeg2/420paldv share the 4:2:0 geometry.
  if (tag.empty() || tag.rfind("420", 0) == 0) return ChromaSubsampling::k420;
  if (tag.rfind("422", 0) == 0) return ChromaSubsampling::k422;
  if (tag == "444") return ChromaSubsampling::k444;
  throw Y4mError("y4m: unsupported colorspace tag 'C" + tag + "'");
}

bool read_line(std::istream& in, std::string& line) {
  line.clear();
  char c;
  while (in.get(c)) {
    if (c == '\n') return true;
    line.push_back(c);
    if (line.size() > 4096) throw Y4mError("y4m: header line exceeds 4096 bytes");
  }
  return false;
}

}  // namespace

Clip parse_y4m(std::istream& in) {
  std::string header;
  if (!read_line(in, header) || header.rfind(kStreamMagic, 0) != 0)
    throw Y4mError("y4m: missing YUV4MPEG2 signature");

  const HeaderFields h = parse_stream_params(header);
  if (h.width <= 0 || h.height <= 0)
    throw Y4mError("y4m: missing or invalid W/H in header");
  if (h.fps_num <= 0 || h.fps_den <= 0)
    throw Y4mError("y4m: missing or invalid F token in header");
  const ChromaSubsampling cs = subsampling_from_tag(h.colorspace);

  std::vector<VideoFrame> frames;
  std::vector<std::string> frame_headers;
  std::string line;
  size_t index = 0;
  while (read_line(in, line)) {
    if (line.rfind(kFrameMagic, 0) != 0)
      throw Y4mError("y4m: expected FRAME marker before frame " + std::to_string(index));
    VideoFrame f(h.width, h.height, cs);
    for (int p = 0; p < 3; ++p) {
      auto& data = f.plane(p);
      in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
      if (static_cast<size_t>(in.gcount()) != data.size())
        throw Y4mError("y4m: truncated payload in frame " + std::to_string(index));
    }
    frame_headers.push_back(line);
    frames.push_back(std::move(f));
    ++index;
  }
  if (frames.empty()) throw Y4mError("y4m: stream contains no frames");

  Clip clip(std::move(frames), FrameRate{h.fps_num, h.fps_den});
  clip.raw_y4m_stream_header = header;
  clip.raw_y4m_frame_headers = std::move(frame_headers);
  return clip;
}

Clip parse_y4m_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Y4mError("y4m: cannot open '" + path + "'");
  Clip clip = parse_y4m(in);
  clip.set_source_id(path);
  return clip;
}

Y4mInfo probe_y4m_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Y4mError("y4m: cannot open '" + path + "'");
  std::string header;
  if (!read_line(in, header) || header.rfind(kStreamMagic, 0) != 0)
    throw Y4mError("y4m: missing YUV4MPEG2 signature in '" + path + "'");
  const HeaderFields h = parse_stream_params(header);
  if (h.width <= 0 || h.height <= 0 || h.fps_num <= 0 || h.fps_den <= 0)
    throw Y4mError("y4m: invalid header in '" + path + "'");
  Y4mInfo info;
  info.width = h.width;
  info.height = h.height;
  info.rate = FrameRate{h.fps_num, h.fps_den};
  info.subsampling = subsampling_from_tag(h.colorspace);
  const VideoFrame probe(h.width, h.height, info.subsampling);
  const std::streamoff payload = static_cast<std::streamoff>(probe.payload_bytes());
  const auto file_size = static_cast<std::streamoff>(std::filesystem::file_size(path));
  std::string line;
  while (read_line(in, line)) {
    if (line.rfind(kFrameMagic, 0) != 0)
      throw Y4mError("y4m: expected FRAME marker in '" + path + "'");
    in.seekg(payload, std::ios::cur);
    // seeking past EOF only fails on the next read; check the offset itself
    if (!in || static_cast<std::streamoff>(in.tellg()) > file_size)
      throw Y4mError("y4m: truncated frame " + std::to_string(info.frame_count));
    ++info.frame_count;
  }
  if (info.frame_count == 0) throw Y4mError("y4m: stream contains no frames");
  return info;
}

namespace {

std::string canonical_header(const Clip& clip) {
  std::ostringstream os;
  os << kStreamMagic << " W" << clip.width() << " H" << clip.height() << " F"
     << clip.frame_rate().num << ":" << clip.frame_rate().den << " C"
     << subsampling_name(clip.subsampling());
  return os.str();
}

// The memoized header is reused only while it still describes the clip.
bool raw_header_matches(const Clip& clip) {
  if (clip.raw_y4m_stream_header.empty()) return false;
  if (clip.raw_y4m_frame_headers.size() != clip.frame_count()) return false;
  try {
    const HeaderFields h = parse_stream_params(clip.raw_y4m_stream_header);
    return h.width == clip.width() && h.height == clip.height() &&
           h.fps_num == clip.frame_rate().num && h.fps_den == clip.frame_rate().den &&
           subsampling_from_tag(h.colorspace) == clip.subsampling();
  } catch (const Y4mError&) {
    return false;
  }
}

}  // namespace

void write_y4m(const Clip& clip, std::ostream& out) {
  if (clip.frame_count() == 0) throw Y4mError("y4m: refusing to write empty clip");
  const bool use_raw = raw_header_matches(clip);
  out << (use_raw ? clip.raw_y4m_stream_header : canonical_header(clip)) << '\n';
  for (size_t i = 0; i < clip.frame_count(); ++i) {
    out << (use_raw ? clip.raw_y4m_frame_headers[i] : std::string(kFrameMagic)) << '\n';
    const VideoFrame& f = clip.frame(i);
    for (int p = 0; p < 3; ++p) {
      const auto& data = f.plane(p);
      out.write(reinterpret_cast<const char*>(data.data()),
                static_cast<std::streamsize>(data.size()));
    }
  }
  if (!out) throw Y4mError("y4m: write failed");
}

void write_y4m_file(const Clip& clip, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Y4mError("y4m: cannot create '" + path + "'");
  write_y4m(clip, out);
}

std::string write_y4m_string(const Clip& clip) {
  std::ostringstream os(std::ios::binary);
  write_y4m(clip, os);
  return os.str();
}

}  // namespace clipforge

#ifndef CLIPFORGE_FRAME_HPP
#define CLIPFORGE_FRAME_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace clipforge {

enum class ChromaSubsampling { k420, k422, k444 };

const char* subsampling_name(ChromaSubsampling cs);

// Planar 8-bit YCbCr frame. Chroma plane dimensions are derived from the
// luma dimensions by ceiling division of the subsampling factors.
class VideoFrame {
 public:
  VideoFrame() = default;
  VideoFrame(int width, int height, ChromaSubsampling cs, uint8_t fill = 0);

  int width() const { return width_; }
  int height() const { return height_; }
  ChromaSubsampling subsampling() const { return subsampling_; }

  int chroma_width() const;
  int chroma_height() const;

  int plane_width(int plane) const { return plane == 0 ? width_ : chroma_width(); }
  int plane_height(int plane) const { return plane == 0 ? height_ : chroma_height(); }

  std::vector<uint8_t>& plane(int i) { return planes_[i]; }
  const std::vector<uint8_t>& plane(int i) const { return planes_[i]; }

  std::vector<uint8_t>& luma() { return planes_[0]; }
  const std::vector<uint8_t>& luma() const { return planes_[0]; }

  uint8_t at(int plane, int x, int y) const {
    return planes_[plane][static_cast<size_t>(y) * plane_width(plane) + x];
  }
  void set(int plane, int x, int y, uint8_t v) {
    planes_[plane][static_cast<size_t>(y) * plane_width(plane) + x] = v;
  }

  size_t payload_bytes() const {
    return planes_[0].size() + planes_[1].size() + planes_[2].size();
  }

  bool same_shape(const VideoFrame& o) const {
    return width_ == o.width_ && height_ == o.height_ && subsampling_ == o.subsampling_;
  }

  bool operator==(const VideoFrame& o) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  ChromaSubsampling subsampling_ = ChromaSubsampling::k420;
  std::array<std::vector<uint8_t>, 3> planes_;
};

struct FrameRate {
  int64_t num = 30;
  int64_t den = 1;

  double fps() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const FrameRate&) const = default;
};

// Ordered frame sequence. All frames share dimensions and subsampling.
// raw_y4m_* members memoize the exact header bytes of a parsed stream so a
// parse/write round trip is byte-identical; they are dropped the moment the
// geometry no longer matches.
class Clip {
 public:
  Clip() = default;
  Clip(std::vector<VideoFrame> frames, FrameRate rate, std::string source_id = {});

  const std::vector<VideoFrame>& frames() const { return frames_; }
  std::vector<VideoFrame>& frames() { return frames_; }
  const VideoFrame& frame(size_t i) const { return frames_[i]; }
  VideoFrame& frame(size_t i) { return frames_[i]; }
  size_t frame_count() const { return frames_.size(); }

  FrameRate frame_rate() const { return rate_; }
  const std::string& source_id() const { return source_id_; }
  void set_source_id(std::string id) { source_id_ = std::move(id); }

  int width() const { return frames_.empty() ? 0 : frames_[0].width(); }
  int height() const { return frames_.empty() ? 0 : frames_[0].height(); }
  ChromaSubsampling subsampling() const {
    return frames_.empty() ? ChromaSubsampling::k420 : frames_[0].subsampling();
  }

  double duration_seconds() const {
    return static_cast<double>(frames_.size()) / rate_.fps();
  }

  // Verbatim Y4M header memos (see y4m.cpp).
  std::string raw_y4m_stream_header;
  std::vector<std::string> raw_y4m_frame_headers;

 private:
  std::vector<VideoFrame> frames_;
  FrameRate rate_;
  std::string source_id_;
};

// Arithmetic mean over every luma sample of the clip.
double mean_brightness(const Clip& clip);

}  // namespace clipforge

#endif  // CLIPFORGE_FRAME_HPP

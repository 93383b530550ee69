#include "clipforge/frame.hpp"

namespace clipforge {

const char* subsampling_name(ChromaSubsampling cs) {
  switch (cs) {
    case ChromaSubsampling::k420: return "420";
    case ChromaSubsampling::k422: return "422";
    case ChromaSubsampling::k444: return "444";
  }
  return "?";
}

static int ceil_div(int a, int b) { return (a + b - 1) / b; }

VideoFrame::VideoFrame(int width, int height, ChromaSubsampling cs, uint8_t fill)
    : width_(width), height_(height), subsampling_(cs) {
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("VideoFrame: dimensions must be positive");
  planes_[0].assign(static_cast<size_t>(width) * height, fill);
  const size_t c = static_cast<size_t>(chroma_width()) * chroma_height();
  planes_[1].assign(c, fill);
  planes_[2].assign(c, fill);
}

int VideoFrame::chroma_width() const {
  return subsampling_ == ChromaSubsampling::k444 ? width_ : ceil_div(width_, 2);
}

int VideoFrame::chroma_height() const {
  return subsampling_ == ChromaSubsampling::k420 ? ceil_div(height_, 2) : height_;
}

Clip::Clip(std::vector<VideoFrame> frames, FrameRate rate, std::string source_id)
    : frames_(std::move(frames)), rate_(rate), source_id_(std::move(source_id)) {
  if (frames_.empty()) throw std::invalid_argument("Clip: needs at least one frame");
  if (rate_.num <= 0 || rate_.den <= 0)
    throw std::invalid_argument("Clip: frame rate must be positive");
  for (const auto& f : frames_) {
    if (!f.same_shape(frames_[0]))
      throw std::invalid_argument("Clip: all frames must share dimensions and subsampling");
  }
}

double mean_brightness(const Clip& clip) {
  if (clip.frame_count() == 0) throw std::invalid_argument("mean_brightness: empty clip");
  double sum = 0.0;
  size_t n = 0;
  for (const auto& f : clip.frames()) {
    for (uint8_t v : f.luma()) sum += v;
    n += f.luma().size();
  }
  return sum / static_cast<double>(n);
}

}  // namespace clipforge

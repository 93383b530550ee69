#ifndef CLIPFORGE_EXTERNAL_CODEC_HPP
#define CLIPFORGE_EXTERNAL_CODEC_HPP

#include <filesystem>

#include "clipforge/codec.hpp"

namespace clipforge {

// Runs one encode through the profile's command template: substitutes
// placeholders, spawns the process (no shell), times it, derives bitrate
// from the output size and the clip duration, then decodes the output for
// quality measurement when the profile has a decode template. Per-frame
// stats are read from the {STATS} path if the template names one, else from
// "<output>.stats.csv" when present; a malformed stats file only drops the
// stats. Scratch files are removed on success and kept on failure.
EncodeResult run_external_encode(const EncoderProfile& profile, const std::string& clip_path,
                                 int qp, const std::string& preset,
                                 const std::vector<double>& k_vector);

std::vector<FrameStats> parse_frame_stats_csv(std::istream& in);

class ExternalEncoder final : public CodecGateway {
 public:
  // The clip is staged to a scratch .y4m once and reused by every encode.
  ExternalEncoder(EncoderProfile profile, const Clip& clip);
  ExternalEncoder(EncoderProfile profile, std::string clip_path);
  ~ExternalEncoder() override;

  EncodeResult encode(const Clip& clip, const EncodeRequest& request) override;
  const std::vector<int>& qp_list() const override { return profile_.qp_list; }
  std::string default_preset() const override { return profile_.default_preset(); }
  std::string fastest_preset() const override { return profile_.fastest_preset(); }
  size_t frame_group_count() const override {
    return std::max<size_t>(profile_.frame_groups.size(), 1);
  }

  const EncoderProfile& profile() const { return profile_; }
  void set_preset_override(std::string preset) { preset_override_ = std::move(preset); }

 private:
  EncoderProfile profile_;
  std::string clip_path_;
  std::filesystem::path staged_dir_;  // owned scratch copy, removed on destruction
  std::string preset_override_;
};

}  // namespace clipforge

#endif  // CLIPFORGE_EXTERNAL_CODEC_HPP

#ifndef CLIPFORGE_CODEC_HPP
#define CLIPFORGE_CODEC_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clipforge/frame.hpp"
#include "clipforge/rd_curve.hpp"

namespace clipforge {

struct CodecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Normalized per-frame stats record; see docs in external_codec.cpp for the
// CSV schema (frame_index, frame_type, bits, avg_qp, q_y, q_u, q_v).
struct FrameStats {
  int frame_index = 0;
  std::string frame_type;  // I, P, B, KF, GF, ARF
  int64_t bits = 0;
  double avg_qp = 0.0;
  double q_y = 0.0, q_u = 0.0, q_v = 0.0;
};

struct EncodeResult {
  double bitrate_kbps = 0.0;
  double wall_seconds = 0.0;
  std::optional<Clip> output_clip;          // decoded output when available
  std::optional<double> analytic_quality;   // synthetic path: quality without decoding
  std::vector<FrameStats> per_frame_stats;  // empty when the encoder emits none
  bool rate_limited = false;                // toy codec could not hit the target
};

struct EncodeRequest {
  int qp = 32;
  std::string preset;         // empty = gateway default
  std::vector<double> k;      // per frame group multipliers; empty = all 1
};

// Command-template profile of one external encoder (see the shipped
// defaults in codec.cpp for the expected placeholder set).
struct EncoderProfile {
  std::string name;
  std::string command_template;  // {INPUT} {OUTPUT} {QP} {PRESET} {K1} {K2} {STATS}
  std::vector<int> qp_list;
  std::vector<std::string> frame_groups;
  std::vector<std::string> preset_ladder;  // fastest -> slowest
  std::string decode_command_template;     // optional; {INPUT} {OUTPUT}

  void validate() const;
  std::string fastest_preset() const;
  std::string default_preset() const;  // last ladder entry, or empty
  size_t k_placeholder_count() const;
};

// Built-in profiles for the stock encoders (x264, x265, libaom-av1,
// svt-av1). The templates assume the binaries are on PATH and ffmpeg is
// available for decoding.
const std::vector<EncoderProfile>& builtin_profiles();
EncoderProfile profile_by_name(const std::string& name);
EncoderProfile profile_from_json(const std::string& json_text);
std::string profile_to_json(const EncoderProfile& profile);

// Uniform encode interface implemented by the external process runner, the
// synthetic analytic codec and test doubles. Stateless per call: concurrent
// encode() calls on one gateway are safe.
class CodecGateway {
 public:
  virtual ~CodecGateway() = default;
  virtual EncodeResult encode(const Clip& clip, const EncodeRequest& request) = 0;
  virtual const std::vector<int>& qp_list() const = 0;
  virtual std::string default_preset() const = 0;
  virtual std::string fastest_preset() const = 0;
  virtual size_t frame_group_count() const = 0;
};

class ThreadPool;

// One encode per QP in the gateway's list; quality from the analytic value
// when present, otherwise from the requested metric against `source`.
RDCurve gateway_rd_curve(CodecGateway& gateway, const Clip& source, QualityMetric metric,
                         const std::vector<double>& k = {}, const std::string& preset = {},
                         ThreadPool* pool = nullptr);

// Total modeled/measured encode seconds spent building a curve with the
// same arguments (bookkeeping for proxy-vs-direct comparisons).
struct CurveWithCost {
  RDCurve curve;
  double encode_seconds = 0.0;
  int encodes = 0;
};
CurveWithCost gateway_rd_curve_timed(CodecGateway& gateway, const Clip& source,
                                     QualityMetric metric, const std::vector<double>& k = {},
                                     const std::string& preset = {}, ThreadPool* pool = nullptr);

}  // namespace clipforge

#endif  // CLIPFORGE_CODEC_HPP

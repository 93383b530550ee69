#include "clipforge/codec.hpp"

#include <algorithm>

#include "clipforge/metrics.hpp"
#include "clipforge/thread_pool.hpp"
#include "json.hpp"

namespace clipforge {

void EncoderProfile::validate() const {
  if (name.empty()) throw CodecError("profile: name required");
  for (const char* ph : {"{INPUT}", "{OUTPUT}", "{QP}"}) {
    if (command_template.find(ph) == std::string::npos)
      throw CodecError("profile '" + name + "': template must contain " + ph);
  }
  if (qp_list.size() < 4)
    throw CodecError("profile '" + name + "': qp_list needs at least 4 entries");
  for (size_t i = 1; i < qp_list.size(); ++i)
    if (qp_list[i] <= qp_list[i - 1])
      throw CodecError("profile '" + name + "': qp_list must be strictly increasing");
  if (k_placeholder_count() > std::max<size_t>(frame_groups.size(), 1))
    throw CodecError("profile '" + name + "': more k placeholders than frame groups");
}

size_t EncoderProfile::k_placeholder_count() const {
  size_t n = 0;
  for (int i = 1; i <= 9; ++i) {
    const std::string ph = "{K" + std::to_string(i) + "}";
    if (command_template.find(ph) != std::string::npos) n = static_cast<size_t>(i);
  }
  return n;
}

std::string EncoderProfile::fastest_preset() const {
  if (preset_ladder.empty())
    throw CodecError("profile '" + name + "': no preset ladder defined");
  return preset_ladder.front();
}

std::string EncoderProfile::default_preset() const {
  return preset_ladder.empty() ? std::string() : preset_ladder.back();
}

const std::vector<EncoderProfile>& builtin_profiles() {
  static const std::vector<EncoderProfile> profiles = [] {
    std::vector<EncoderProfile> v;
    // CRF mode, single threaded, single pass. A patched build that accepts a
    // lambda scale would add e.g. "--lambda-scale {K1}" to the template.
    v.push_back({"x264",
                 "x264 --threads 1 --preset {PRESET} --crf {QP} --output {OUTPUT} {INPUT}",
                 {22, 27, 32, 37, 42},
                 {"all"},
                 {"ultrafast", "veryfast", "medium"},
                 "ffmpeg -hide_banner -loglevel error -y -i {INPUT} {OUTPUT}"});
    v.push_back({"x265",
                 "x265 --input {INPUT} --crf {QP} --preset {PRESET} --output {OUTPUT}",
                 {22, 27, 32, 37, 42},
                 {"all"},
                 {"ultrafast", "veryfast", "medium"},
                 "ffmpeg -hide_banner -loglevel error -y -i {INPUT} {OUTPUT}"});
    v.push_back({"libaom-av1",
                 "aomenc --cpu-used={PRESET} --passes=1 --lag-in-frames=19 --auto-alt-ref=1 "
                 "--min-gf-interval=16 --max-gf-interval=16 --gf-min-pyr-height=4 "
                 "--gf-max-pyr-height=4 --kf-min-dist=65 --kf-max-dist=65 "
                 "--use-fixed-qp-offsets=1 --deltaq-mode=0 --enable-tpl-model=0 --end-usage=q "
                 "--cq-level={QP} --enable-keyframe-filtering=0 --threads=1 -o {OUTPUT} {INPUT}",
                 {27, 39, 49, 59, 63},
                 {"KF", "GF/ARF"},
                 {"6", "5", "4", "3", "2", "1", "0"},
                 "ffmpeg -hide_banner -loglevel error -y -i {INPUT} {OUTPUT}"});
    v.push_back({"svt-av1",
                 "SvtAv1EncApp -lp 1 --crf {QP} --preset {PRESET} -i {INPUT} -b {OUTPUT}",
                 {27, 33, 39, 46, 52, 58},
                 {"GF/ARF", "Interframe"},
                 {"12", "9", "6", "3"},
                 "ffmpeg -hide_banner -loglevel error -y -i {INPUT} {OUTPUT}"});
    for (const auto& p : v) p.validate();
    return v;
  }();
  return profiles;
}

EncoderProfile profile_by_name(const std::string& name) {
  for (const auto& p : builtin_profiles())
    if (p.name == name) return p;
  throw CodecError("unknown encoder profile '" + name + "'");
}

EncoderProfile profile_from_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  EncoderProfile p;
  p.name = j.at("name").get<std::string>();
  p.command_template = j.at("command_template").get<std::string>();
  p.qp_list = j.at("qp_list").get<std::vector<int>>();
  if (j.contains("frame_groups")) p.frame_groups = j["frame_groups"].get<std::vector<std::string>>();
  if (j.contains("preset_ladder"))
    p.preset_ladder = j["preset_ladder"].get<std::vector<std::string>>();
  if (j.contains("decode_command_template"))
    p.decode_command_template = j["decode_command_template"].get<std::string>();
  p.validate();
  return p;
}

std::string profile_to_json(const EncoderProfile& profile) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["name"] = profile.name;
  j["command_template"] = profile.command_template;
  j["qp_list"] = profile.qp_list;
  j["frame_groups"] = profile.frame_groups;
  j["preset_ladder"] = profile.preset_ladder;
  j["decode_command_template"] = profile.decode_command_template;
  return j.dump(2);
}

CurveWithCost gateway_rd_curve_timed(CodecGateway& gateway, const Clip& source,
                                     QualityMetric metric, const std::vector<double>& k,
                                     const std::string& preset, ThreadPool* pool) {
  const auto& qps = gateway.qp_list();
  if (qps.empty()) throw CodecError("gateway_rd_curve: empty qp list");

  struct PointResult {
    RDPoint point;
    double seconds = 0.0;
  };
  auto results = parallel_map<PointResult>(pool, qps.size(), [&](size_t i) {
    EncodeRequest req;
    req.qp = qps[i];
    req.preset = preset.empty() ? gateway.default_preset() : preset;
    req.k = k;
    EncodeResult enc = gateway.encode(source, req);
    double quality;
    if (enc.analytic_quality) {
      quality = *enc.analytic_quality;
    } else if (enc.output_clip) {
      quality = metric == QualityMetric::kPsnr ? psnr(source, *enc.output_clip)
                                               : ms_ssim(source, *enc.output_clip);
    } else {
      throw CodecError("gateway_rd_curve: encode returned neither quality nor output clip");
    }
    return PointResult{{enc.bitrate_kbps, quality}, enc.wall_seconds};
  });

  CurveWithCost out{build_rd_curve(
                        [&] {
                          std::vector<RDPoint> pts;
                          for (const auto& r : results) pts.push_back(r.point);
                          return pts;
                        }(),
                        metric),
                    0.0, static_cast<int>(qps.size())};
  for (const auto& r : results) out.encode_seconds += r.seconds;
  return out;
}

RDCurve gateway_rd_curve(CodecGateway& gateway, const Clip& source, QualityMetric metric,
                         const std::vector<double>& k, const std::string& preset,
                         ThreadPool* pool) {
  return gateway_rd_curve_timed(gateway, source, metric, k, preset, pool).curve;
}

}  // namespace clipforge

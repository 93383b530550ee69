#include "clipforge/external_codec.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "clipforge/process.hpp"
#include "clipforge/y4m.hpp"

namespace clipforge {

namespace {

std::string format_k(double k) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", k);
  return buf;
}

}  // namespace

std::vector<FrameStats> parse_frame_stats_csv(std::istream& in) {
  std::vector<FrameStats> stats;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("frame_index", 0) == 0) continue;
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 7) throw CodecError("frame stats: expected 7 columns");
    FrameStats s;
    s.frame_index = std::stoi(fields[0]);
    s.frame_type = fields[1];
    if (s.frame_type != "I" && s.frame_type != "P" && s.frame_type != "B" &&
        s.frame_type != "KF" && s.frame_type != "GF" && s.frame_type != "ARF")
      throw CodecError("frame stats: unknown frame type '" + s.frame_type + "'");
    s.bits = std::stoll(fields[2]);
    s.avg_qp = std::stod(fields[3]);
    s.q_y = std::stod(fields[4]);
    s.q_u = std::stod(fields[5]);
    s.q_v = std::stod(fields[6]);
    stats.push_back(std::move(s));
  }
  return stats;
}

EncodeResult run_external_encode(const EncoderProfile& profile, const std::string& clip_path,
                                 int qp, const std::string& preset,
                                 const std::vector<double>& k_vector) {
  profile.validate();
  const Y4mInfo info = probe_y4m_file(clip_path);
  const double duration_s =
      static_cast<double>(info.frame_count) / info.rate.fps();

  const auto dir = make_scratch_dir("enc");
  const std::string output = (dir / ("out-" + profile.name + "-q" + std::to_string(qp))).string();
  const std::string stats_path = (dir / "stats.csv").string();

  std::map<std::string, std::string> values = {
      {"INPUT", clip_path}, {"OUTPUT", output}, {"QP", std::to_string(qp)},
      {"PRESET", preset},   {"STATS", stats_path},
  };
  for (size_t i = 0; i < 9; ++i)
    values["K" + std::to_string(i + 1)] = format_k(i < k_vector.size() ? k_vector[i] : 1.0);

  const auto argv = substitute_placeholders(tokenize_command(profile.command_template), values);
  const ProcessResult proc = run_process(argv);
  if (proc.exit_code != 0) {
    std::string cmd;
    for (const auto& a : argv) cmd += (cmd.empty() ? "" : " ") + a;
    throw CodecError("encode failed (exit " + std::to_string(proc.exit_code) + "): " + cmd +
                     (proc.stderr_tail.empty() ? "" : "\n" + proc.stderr_tail));
  }

  EncodeResult res;
  res.wall_seconds = proc.wall_seconds;
  std::error_code ec;
  const auto bytes = std::filesystem::file_size(output, ec);
  if (ec) throw CodecError("encode produced no output file: " + output);
  res.bitrate_kbps = static_cast<double>(bytes) * 8.0 / duration_s / 1000.0;
  if (!(res.bitrate_kbps > 0)) throw CodecError("encode produced an empty bitstream: " + output);

  if (!profile.decode_command_template.empty()) {
    const std::string decoded = (dir / "decoded.y4m").string();
    const auto decode_argv = substitute_placeholders(
        tokenize_command(profile.decode_command_template), {{"INPUT", output}, {"OUTPUT", decoded}});
    const ProcessResult dec = run_process(decode_argv);
    if (dec.exit_code != 0)
      throw CodecError("decode failed (exit " + std::to_string(dec.exit_code) + ") for " + output +
                       (dec.stderr_tail.empty() ? "" : "\n" + dec.stderr_tail));
    res.output_clip = parse_y4m_file(decoded);
  }

  const std::string stats_file =
      profile.command_template.find("{STATS}") != std::string::npos ? stats_path
                                                                    : output + ".stats.csv";
  if (std::filesystem::exists(stats_file)) {
    try {
      std::ifstream in(stats_file);
      res.per_frame_stats = parse_frame_stats_csv(in);
    } catch (const std::exception&) {
      res.per_frame_stats.clear();  // malformed stats are not fatal
    }
  }

  std::filesystem::remove_all(dir, ec);
  return res;
}

ExternalEncoder::ExternalEncoder(EncoderProfile profile, const Clip& clip)
    : profile_(std::move(profile)) {
  profile_.validate();
  staged_dir_ = make_scratch_dir("stage");
  clip_path_ = (staged_dir_ / "source.y4m").string();
  write_y4m_file(clip, clip_path_);
}

ExternalEncoder::ExternalEncoder(EncoderProfile profile, std::string clip_path)
    : profile_(std::move(profile)), clip_path_(std::move(clip_path)) {
  profile_.validate();
}

ExternalEncoder::~ExternalEncoder() {
  if (!staged_dir_.empty()) {
    std::error_code ec;
    std::filesystem::remove_all(staged_dir_, ec);
  }
}

EncodeResult ExternalEncoder::encode(const Clip&, const EncodeRequest& request) {
  std::string preset = request.preset;
  if (!preset_override_.empty()) preset = preset_override_;
  if (preset.empty()) preset = profile_.default_preset();
  return run_external_encode(profile_, clip_path_, request.qp, preset, request.k);
}

}  // namespace clipforge

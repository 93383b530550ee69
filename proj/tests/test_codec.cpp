#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "clipforge/clipgen.hpp"
#include "clipforge/external_codec.hpp"
#include "clipforge/metrics.hpp"
#include "clipforge/process.hpp"
#include "clipforge/synthetic_codec.hpp"
#include "clipforge/thread_pool.hpp"
#include "clipforge/toy_codec.hpp"
#include "clipforge/y4m.hpp"

using namespace clipforge;
namespace fs = std::filesystem;

namespace {

void write_executable(const fs::path& path, const std::string& body) {
  std::ofstream out(path);
  out << body;
  out.close();
  fs::permissions(path, fs::perms::owner_all | fs::perms::group_read | fs::perms::others_read);
}

}  // namespace

TEST_CASE("encoder profile validation") {
  for (const auto& p : builtin_profiles()) CHECK_NOTHROW(p.validate());
  CHECK(profile_by_name("libaom-av1").fastest_preset() == "6");
  CHECK(profile_by_name("x264").qp_list.size() == 5);
  CHECK(profile_by_name("svt-av1").qp_list.size() == 6);

  EncoderProfile bad = profile_by_name("x264");
  bad.command_template = "enc {INPUT} {QP}";  // no {OUTPUT}
  CHECK_THROWS_AS(bad.validate(), CodecError);
  bad = profile_by_name("x264");
  bad.qp_list = {22, 22, 27, 30};
  CHECK_THROWS_AS(bad.validate(), CodecError);
  bad = profile_by_name("x264");
  bad.qp_list = {22, 27, 30};
  CHECK_THROWS_AS(bad.validate(), CodecError);
  bad = profile_by_name("x264");  // one frame group, two k placeholders
  bad.command_template += " --k1 {K1} --k2 {K2}";
  CHECK_THROWS_AS(bad.validate(), CodecError);

  const EncoderProfile round =
      profile_from_json(profile_to_json(profile_by_name("svt-av1")));
  CHECK(round.name == "svt-av1");
  CHECK(round.qp_list == profile_by_name("svt-av1").qp_list);
}

TEST_CASE("synthetic codec closed forms") {
  SyntheticCodecSpec spec;
  spec.gamma = 0.5;
  spec.k_star = {2.0};
  const Clip clip = make_constant_clip(64, 64, 4, {30, 1}, 128);

  SUBCASE("k at the planted optimum hits the anchor rate exactly") {
    SyntheticCodec codec(spec);
    const EncodeResult enc = codec.encode(clip, {.qp = 32, .preset = "", .k = {2.0}});
    CHECK(enc.bitrate_kbps == doctest::Approx(spec.anchor_rate_kbps(32)).epsilon(1e-12));
    CHECK(*enc.analytic_quality == doctest::Approx(60.0 - 0.8 * 32));
  }
  SUBCASE("gamma zero makes rate independent of k") {
    spec.gamma = 0.0;
    SyntheticCodec codec(spec);
    const double r1 = codec.encode(clip, {.qp = 32, .preset = "", .k = {0.3}}).bitrate_kbps;
    const double r2 = codec.encode(clip, {.qp = 32, .preset = "", .k = {7.0}}).bitrate_kbps;
    CHECK(r1 == r2);
  }
  SUBCASE("k=1 multiplier matches the closed form") {
    const double ln2 = std::log(2.0);
    CHECK(spec.rate_multiplier({1.0}) == doctest::Approx(1.0 + 0.5 * ln2 * ln2).epsilon(1e-12));
    CHECK(spec.rate_multiplier({1.0}) == doctest::Approx(1.24023).epsilon(1e-4));
  }
  SUBCASE("jitter is deterministic per input tuple") {
    spec.noise_std_log = 0.2;
    spec.seed = 5;
    SyntheticCodec codec(spec);
    const EncodeRequest req{.qp = 37, .preset = "default", .k = {1.5}};
    const EncodeResult a = codec.encode(clip, req);
    const EncodeResult b = codec.encode(clip, req);
    CHECK(a.bitrate_kbps == b.bitrate_kbps);
    CHECK(a.wall_seconds == b.wall_seconds);
    const EncodeResult c = codec.encode(clip, {.qp = 42, .preset = "default", .k = {1.5}});
    CHECK(a.bitrate_kbps != c.bitrate_kbps);
  }
  SUBCASE("wall time scales with pixels, preset and qp") {
    spec.preset_speed_factors = {{"default", 1.0}, {"fast", 0.01}};
    SyntheticCodec codec(spec);
    const Clip big = make_constant_clip(128, 128, 4, {30, 1}, 128);
    const double t_small = codec.encode(clip, {.qp = 32, .preset = "", .k = {}}).wall_seconds;
    const double t_big = codec.encode(big, {.qp = 32, .preset = "", .k = {}}).wall_seconds;
    CHECK(t_big == doctest::Approx(4.0 * t_small));
    const double t_fast =
        codec.encode(clip, {.qp = 32, .preset = "fast", .k = {}}).wall_seconds;
    CHECK(t_fast == doctest::Approx(0.01 * t_small));
    const double t_hq = codec.encode(clip, {.qp = 22, .preset = "", .k = {}}).wall_seconds;
    CHECK(t_hq == doctest::Approx(t_small * std::pow(2.0, 1.0)));
  }
}

TEST_CASE("gateway_rd_curve on the synthetic codec") {
  SyntheticCodecSpec spec;
  spec.gamma = 0.5;
  spec.k_star = {2.0};
  SyntheticCodec codec(spec);
  const Clip clip = make_constant_clip(64, 64, 4, {30, 1}, 128);

  SUBCASE("points lie exactly on the analytic model") {
    const RDCurve curve = gateway_rd_curve(codec, clip, QualityMetric::kPsnr, {1.0});
    REQUIRE(curve.points().size() == spec.qp_list.size());
    const double m = spec.rate_multiplier({1.0});
    for (const auto& p : curve.points()) {
      const double expect_q = spec.alpha + spec.beta * std::log(p.rate_kbps / m);
      CHECK(p.quality == doctest::Approx(expect_q).epsilon(1e-12));
    }
  }
  SUBCASE("point count follows the qp list") {
    spec.qp_list = {22, 27, 32, 37, 42};
    SyntheticCodec five(spec);
    CHECK(gateway_rd_curve(five, clip, QualityMetric::kPsnr).points().size() == 5);
  }
  SUBCASE("numeric BD-rate matches the closed form at k*") {
    const RDCurve base = gateway_rd_curve(codec, clip, QualityMetric::kPsnr, {1.0});
    const RDCurve at_star = gateway_rd_curve(codec, clip, QualityMetric::kPsnr, {2.0});
    const double numeric = bd_rate(at_star, base);
    const double closed = spec.closed_form_bd_rate_at_kstar();
    CHECK(closed == doctest::Approx(100.0 * (1.0 / 1.2402265 - 1.0)).epsilon(1e-4));
    CHECK(numeric == doctest::Approx(closed).epsilon(1e-9));
    CHECK(std::abs(numeric - closed) < 0.1);  // 0.1 BD-rate points, absolute
  }
  SUBCASE("parallel and serial curves are identical") {
    ThreadPool pool(4);
    const RDCurve serial = gateway_rd_curve(codec, clip, QualityMetric::kPsnr, {1.3});
    const RDCurve parallel = gateway_rd_curve(codec, clip, QualityMetric::kPsnr, {1.3}, {}, &pool);
    REQUIRE(serial.points().size() == parallel.points().size());
    for (size_t i = 0; i < serial.points().size(); ++i) {
      CHECK(serial.points()[i].rate_kbps == parallel.points()[i].rate_kbps);
      CHECK(serial.points()[i].quality == parallel.points()[i].quality);
    }
  }
}

TEST_CASE("toy_intra_encode") {
  SUBCASE("a generous target is near-transparent") {
    const Clip clip = make_structured_clip(64, 64, 4, {30, 1}, 21);
    const EncodeResult enc = toy_intra_encode(clip, 1e6);
    REQUIRE(enc.output_clip);
    CHECK(psnr(clip, *enc.output_clip) >= 45.0);
  }
  SUBCASE("constant clip costs almost nothing and survives intact") {
    const Clip clip = make_constant_clip(64, 64, 2, {30, 1}, 77);
    const EncodeResult enc = toy_intra_encode(clip, 500.0);
    REQUIRE(enc.output_clip);
    CHECK(enc.bitrate_kbps < 50.0);
    for (size_t i = 0; i < clip.frame_count(); ++i)
      for (int p = 0; p < 3; ++p) {
        const auto& a = clip.frame(i).plane(p);
        const auto& b = enc.output_clip->frame(i).plane(p);
        for (size_t j = 0; j < a.size(); ++j) CHECK(std::abs(int(a[j]) - int(b[j])) <= 1);
      }
  }
  SUBCASE("rate control hits targets within 2%, psnr staircase is monotone") {
    const Clip clip = make_structured_clip(96, 96, 4, {30, 1}, 8);
    double prev_psnr = 1e9;
    for (double target : {8000.0, 5000.0, 3000.0, 1800.0, 1000.0, 500.0}) {
      const EncodeResult enc = toy_intra_encode(clip, target);
      REQUIRE(enc.output_clip);
      if (!enc.rate_limited)
        CHECK(std::abs(enc.bitrate_kbps - target) <= kToyRateTolerance * target);
      const double q = psnr(clip, *enc.output_clip);
      CHECK(q <= prev_psnr + 1e-9);
      prev_psnr = q;
    }
  }
  SUBCASE("unreachably low target reports the floor") {
    const Clip clip = make_structured_clip(64, 64, 2, {30, 1}, 3);
    const EncodeResult enc = toy_intra_encode(clip, 0.001);
    CHECK(enc.rate_limited);
  }
}

TEST_CASE("frame stats csv parsing") {
  std::istringstream in(
      "frame_index,frame_type,bits,avg_qp,q_y,q_u,q_v\n"
      "0,I,120000,30.5,0.99,0.98,0.98\n"
      "1,P,40000,33,0.97,0.96,0.96\n"
      "2,B,9000,36,0.95,0.95,0.94\n");
  const auto stats = parse_frame_stats_csv(in);
  REQUIRE(stats.size() == 3);
  CHECK(stats[0].frame_type == "I");
  CHECK(stats[1].bits == 40000);
  CHECK(stats[2].q_v == doctest::Approx(0.94));

  std::istringstream bad("0,X,1,2,3,4,5\n");
  CHECK_THROWS_AS(parse_frame_stats_csv(bad), CodecError);
}

TEST_CASE("run_external_encode with stub tools") {
  const auto dir = make_scratch_dir("stubtest");
  const Clip source = make_constant_clip(32, 32, 4, {30, 1}, 100);
  const auto clip_path = dir / "src.y4m";
  write_y4m_file(source, clip_path.string());

  // Stub encoder: blob of 125*(70-qp) bytes, first byte = qp. Stub decoder:
  // reads qp back and emits a constant 32x32x4 clip at luma 100+qp.
  write_executable(dir / "enc.py",
                   "#!/usr/bin/env python3\n"
                   "import sys\n"
                   "out, qp = sys.argv[2], int(sys.argv[3])\n"
                   "open(out, 'wb').write(bytes([qp]) * (125 * (70 - qp)))\n");
  write_executable(dir / "dec.py",
                   "#!/usr/bin/env python3\n"
                   "import sys\n"
                   "qp = open(sys.argv[1], 'rb').read(1)[0]\n"
                   "hdr = b'YUV4MPEG2 W32 H32 F30:1 C420\\n'\n"
                   "frame = b'FRAME\\n' + bytes([100 + qp]) * 1024 + bytes([128]) * 512\n"
                   "open(sys.argv[2], 'wb').write(hdr + frame * 4)\n");

  EncoderProfile profile;
  profile.name = "stub";
  profile.command_template = (dir / "enc.py").string() + " {INPUT} {OUTPUT} {QP}";
  profile.decode_command_template = (dir / "dec.py").string() + " {INPUT} {OUTPUT}";
  profile.qp_list = {22, 27, 32, 37, 42};
  profile.preset_ladder = {"fast", "slow"};

  SUBCASE("single encode: bitrate from size, quality from decode") {
    const EncodeResult enc = run_external_encode(profile, clip_path.string(), 32, "fast", {});
    // 125*(70-32) bytes over 4/30 s
    const double expect_kbps = 125.0 * 38.0 * 8.0 / (4.0 / 30.0) / 1000.0;
    CHECK(enc.bitrate_kbps == doctest::Approx(expect_kbps).epsilon(1e-9));
    REQUIRE(enc.output_clip);
    // decoded luma differs from the source by exactly qp=32
    const double expect_psnr = 10.0 * std::log10(255.0 * 255.0 / (32.0 * 32.0));
    CHECK(psnr(source, *enc.output_clip) == doctest::Approx(expect_psnr).epsilon(1e-9));
  }
  SUBCASE("rd curve matches the frozen golden values") {
    ExternalEncoder gateway(profile, clip_path.string());
    const RDCurve curve = gateway_rd_curve(gateway, source, QualityMetric::kPsnr);
    REQUIRE(curve.points().size() == 5);
    // golden: rate = 7.5*(70-qp) kbps, quality = 20*log10(255/qp), qp desc by rate
    const std::vector<int> qps_by_rate = {42, 37, 32, 27, 22};
    for (size_t i = 0; i < qps_by_rate.size(); ++i) {
      const int qp = qps_by_rate[i];
      CHECK(curve.points()[i].rate_kbps == doctest::Approx(7.5 * (70 - qp)).epsilon(1e-9));
      CHECK(curve.points()[i].quality ==
            doctest::Approx(20.0 * std::log10(255.0 / qp)).epsilon(1e-9));
    }
  }
  SUBCASE("a failing decoder is an error mentioning decode") {
    write_executable(dir / "dec_fail.py", "#!/usr/bin/env python3\nraise SystemExit(3)\n");
    EncoderProfile broken = profile;
    broken.decode_command_template = (dir / "dec_fail.py").string() + " {INPUT} {OUTPUT}";
    CHECK_THROWS_WITH_AS(run_external_encode(broken, clip_path.string(), 32, "", {}),
                         doctest::Contains("decode failed"), CodecError);
  }
  SUBCASE("missing binary reports the command line") {
    EncoderProfile broken = profile;
    broken.command_template = (dir / "no_such_tool").string() + " {INPUT} {OUTPUT} {QP}";
    CHECK_THROWS_WITH_AS(run_external_encode(broken, clip_path.string(), 32, "", {}),
                         doctest::Contains("no_such_tool"), CodecError);
  }
  SUBCASE("k placeholders are optional when the template lacks them") {
    CHECK_NOTHROW(run_external_encode(profile, clip_path.string(), 32, "fast", {2.0, 1.5}));
  }
  SUBCASE("k placeholders are substituted when present") {
    write_executable(dir / "enc_k.py",
                     "#!/usr/bin/env python3\n"
                     "import sys\n"
                     "assert sys.argv[4] == '2.5', sys.argv\n"
                     "open(sys.argv[2], 'wb').write(b'x' * 1000)\n");
    EncoderProfile with_k = profile;
    with_k.command_template = (dir / "enc_k.py").string() + " {INPUT} {OUTPUT} {QP} {K1}";
    with_k.decode_command_template.clear();
    with_k.frame_groups = {"KF"};
    const EncodeResult enc =
        run_external_encode(with_k, clip_path.string(), 32, "fast", {2.5});
    CHECK(enc.bitrate_kbps > 0);
  }
  SUBCASE("stats file is parsed when {STATS} is in the template") {
    write_executable(dir / "enc_stats.py",
                     "#!/usr/bin/env python3\n"
                     "import sys\n"
                     "open(sys.argv[2], 'wb').write(b'x' * 400)\n"
                     "open(sys.argv[4], 'w').write("
                     "'0,I,3000,30,0.99,0.98,0.98\\n1,P,1000,33,0.97,0.96,0.96\\n')\n");
    EncoderProfile with_stats = profile;
    with_stats.command_template =
        (dir / "enc_stats.py").string() + " {INPUT} {OUTPUT} {QP} {STATS}";
    with_stats.decode_command_template.clear();
    const EncodeResult enc = run_external_encode(with_stats, clip_path.string(), 32, "", {});
    REQUIRE(enc.per_frame_stats.size() == 2);
    CHECK(enc.per_frame_stats[1].frame_type == "P");
  }
  SUBCASE("a malformed stats file drops stats without failing") {
    write_executable(dir / "enc_badstats.py",
                     "#!/usr/bin/env python3\n"
                     "import sys\n"
                     "open(sys.argv[2], 'wb').write(b'x' * 400)\n"
                     "open(sys.argv[4], 'w').write('this,is,not,a,stats,file\\n')\n");
    EncoderProfile bad_stats = profile;
    bad_stats.command_template =
        (dir / "enc_badstats.py").string() + " {INPUT} {OUTPUT} {QP} {STATS}";
    bad_stats.decode_command_template.clear();
    const EncodeResult enc = run_external_encode(bad_stats, clip_path.string(), 32, "", {});
    CHECK(enc.per_frame_stats.empty());
    CHECK(enc.bitrate_kbps > 0);
  }

  std::error_code ec;
  fs::remove_all(dir, ec);
}

TEST_CASE("command tokenization and substitution") {
  const auto tokens = tokenize_command("enc  --crf {QP}   -o {OUTPUT} {INPUT}");
  CHECK(tokens.size() == 6);
  const auto argv = substitute_placeholders(
      tokens, {{"QP", "32"}, {"OUTPUT", "/tmp/o.ivf"}, {"INPUT", "/tmp/i.y4m"}});
  CHECK(argv[2] == "32");
  CHECK(argv[4] == "/tmp/o.ivf");
  CHECK_THROWS_AS(substitute_placeholders(tokenize_command("enc {MISSING}"), {}), ProcessError);
  // tokens that substitute to empty are dropped
  const auto dropped = substitute_placeholders(tokenize_command("enc {EXTRA} x"), {{"EXTRA", ""}});
  CHECK(dropped.size() == 2);
}

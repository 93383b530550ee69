#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "clipforge/process.hpp"
#include "clipforge/rd_curve.hpp"
#include "clipforge/y4m.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(CLIPFORGE_BIN) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult res;
  char buf[4096];
  while (size_t n = fread(buf, 1, sizeof(buf), pipe)) res.output.append(buf, n);
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

fs::path make_work_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("clipforge-cli-" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

size_t count_occurrences(const std::string& text, const std::string& needle) {
  size_t count = 0, pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

}  // namespace

TEST_CASE("cli: bdrate") {
  const fs::path dir = make_work_dir("bdrate");
  const std::string curve =
      "# clipforge rd_curve schema_version=1 metric=PSNR\n"
      "rate_kbps,quality\n100,28\n400,32\n1600,36\n6400,40\n";
  write_text(dir / "a.csv", curve);
  write_text(dir / "b.csv", curve);

  SUBCASE("identical curves report zero and write the json") {
    const CliResult res = run_cli("bdrate --test " + (dir / "a.csv").string() + " --ref " +
                                  (dir / "b.csv").string() + " --json " +
                                  (dir / "bd.json").string());
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("bd_rate_pct=0") != std::string::npos);
    const json j = json::parse(slurp(dir / "bd.json"));
    CHECK(j.at("bd_rate_pct").get<double>() == 0.0);
    CHECK(j.at("schema_version").get<int>() == 1);
  }
  SUBCASE("a 3-row curve is a validation error naming the file") {
    write_text(dir / "short.csv", "rate_kbps,quality\n100,28\n400,32\n1600,36\n");
    const CliResult res = run_cli("bdrate --test " + (dir / "short.csv").string() + " --ref " +
                                  (dir / "a.csv").string());
    CHECK(res.exit_code == 1);
    CHECK(res.output.find("short.csv") != std::string::npos);
  }
}

TEST_CASE("cli: optimize-lambda on the synthetic codec") {
  const fs::path dir = make_work_dir("lambda");
  REQUIRE(run_cli("synth-clip --kind structured --width 64 --height 64 --frames 4 --out " +
                  (dir / "clip.y4m").string())
              .exit_code == 0);

  SUBCASE("planted k is recovered into the summary") {
    const CliResult res = run_cli(
        "optimize-lambda " + (dir / "clip.y4m").string() +
        " --synthetic --planted-k 2 --gamma 0.5 --min-improvement 0 --encode-budget 100000 "
        "--workers 1 --out " +
        (dir / "out").string());
    CHECK(res.exit_code == 0);
    const std::string summary = slurp(dir / "out" / "summary.csv");
    std::istringstream lines(summary);
    std::string line, row;
    while (std::getline(lines, line))
      if (!line.empty() && line[0] != '#' && line.rfind("clip,", 0) != 0) row = line;
    REQUIRE_FALSE(row.empty());
    std::vector<std::string> fields;
    std::istringstream row_in(row);
    std::string field;
    while (std::getline(row_in, field, ',')) fields.push_back(field);
    const double k1 = std::stod(fields[3]);
    const double gain = std::stod(fields[8]);
    CHECK(std::abs(k1 - 2.0) / 2.0 <= 0.05);
    CHECK(gain == doctest::Approx(-19.37).epsilon(0.02));

    const json outcome = json::parse(slurp(dir / "out" / "clip.lambda.json"));
    CHECK(outcome.at("k_opt").at(0).get<double>() == doctest::Approx(k1));
    const json manifest = json::parse(slurp(dir / "out" / "manifest.json"));
    CHECK(manifest.at("seed").get<uint64_t>() == 1);
    CHECK(manifest.at("tasks").size() == 1);
    CHECK(manifest.at("tasks").at(0).at("status") == "ok");
  }
  SUBCASE("proxy runs record both timings") {
    const CliResult res = run_cli("optimize-lambda " + (dir / "clip.y4m").string() +
                                  " --synthetic --planted-k 2 --gamma 0.5 --proxy fast_preset "
                                  "--workers 1 --out " +
                                  (dir / "proxy_out").string());
    CHECK(res.exit_code == 0);
    const json outcome = json::parse(slurp(dir / "proxy_out" / "clip.lambda.json"));
    CHECK(outcome.contains("proxy_wall_seconds"));
    CHECK(outcome.contains("full_eval_wall_seconds"));
    CHECK(outcome.at("proxy") == "fast_preset");
  }
  SUBCASE("an empty clip list is a usage error") {
    CHECK(run_cli("optimize-lambda --synthetic").exit_code == 2);
  }
}

TEST_CASE("cli: job config file drives the run, flags override") {
  const fs::path dir = make_work_dir("config");
  REQUIRE(run_cli("synth-clip --kind structured --width 48 --height 48 --frames 3 --out " +
                  (dir / "c.y4m").string())
              .exit_code == 0);
  json cfg;
  cfg["seed"] = 21;
  cfg["output_dir"] = (dir / "cfg_out").string();
  cfg["lambda"] = {{"dims", 1}, {"min_improvement_pct", 0.0}, {"encode_budget", 100000}};
  cfg["synthetic"] = {{"planted_k", 2.0}, {"gamma", 0.5}};
  write_text(dir / "job.json", cfg.dump());
  const CliResult res = run_cli("optimize-lambda " + (dir / "c.y4m").string() + " --config " +
                                (dir / "job.json").string());
  CHECK(res.exit_code == 0);
  const json manifest = json::parse(slurp(dir / "cfg_out" / "manifest.json"));
  CHECK(manifest.at("seed").get<uint64_t>() == 21);
  const json outcome = json::parse(slurp(dir / "cfg_out" / "c.lambda.json"));
  CHECK(std::abs(outcome.at("k_opt").at(0).get<double>() - 2.0) < 0.1);
}

TEST_CASE("cli: worker count does not change result bytes") {
  const fs::path dir = make_work_dir("workers");
  std::string clips;
  for (int i = 0; i < 3; ++i) {
    const std::string path = (dir / ("clip" + std::to_string(i) + ".y4m")).string();
    REQUIRE(run_cli("synth-clip --kind structured --seed " + std::to_string(100 + i) +
                    " --width 48 --height 48 --frames 3 --out " + path)
                .exit_code == 0);
    clips += " " + path;
  }
  const std::string common =
      " --synthetic --planted-k 1.8 --gamma 0.4 --jitter 0.1 --seed 7" + clips;
  REQUIRE(run_cli("optimize-lambda --workers 1 --out " + (dir / "w1").string() + common)
              .exit_code == 0);
  REQUIRE(run_cli("optimize-lambda --workers 8 --out " + (dir / "w8").string() + common)
              .exit_code == 0);

  for (const auto& entry : fs::directory_iterator(dir / "w1")) {
    const std::string name = entry.path().filename().string();
    if (name == "manifest.json") continue;  // carries wall-clock timing
    CHECK(slurp(entry.path()) == slurp(dir / "w8" / name));
  }
}

TEST_CASE("cli: preproc") {
  const fs::path dir = make_work_dir("preproc");
  SUBCASE("micro sweep produces a single data row") {
    REQUIRE(run_cli("synth-clip --kind structured --width 64 --height 64 --frames 4 --out " +
                    (dir / "c.y4m").string())
                .exit_code == 0);
    const CliResult res =
        run_cli("preproc sweep " + (dir / "c.y4m").string() +
                " --psnr-levels 30 --bitrates 2000 --strengths 0 --workers 1 --out " +
                (dir / "sweep.csv").string());
    CHECK(res.exit_code == 0);
    const std::string csv = slurp(dir / "sweep.csv");
    size_t rows = 0;
    std::istringstream lines(csv);
    std::string line;
    while (std::getline(lines, line))
      if (!line.empty() && line[0] != '#' && line.rfind("sigma", 0) != 0) ++rows;
    CHECK(rows == 1);
    CHECK(fs::exists(dir / "sweep.json"));  // json twin of the csv report
    const json twin = json::parse(slurp(dir / "sweep.json"));
    CHECK(twin.at("cells").size() == 1);
  }
  SUBCASE("fit on a planted degree-5 table reports a tiny residual") {
    // table sampled from an exact degree-5 polynomial in normalized coords
    std::ostringstream table;
    table.precision(17);
    table << "sigma,bitrate_kbps,strength\n";
    const double sigmas[6] = {2, 5, 8, 12, 17, 25.5};
    const double rates[6] = {256, 512, 1024, 2048, 4096, 8192};
    for (double s : sigmas) {
      for (double r : rates) {
        const double nx = 2.0 * (s - 2.0) / (25.5 - 2.0) - 1.0;
        const double ny = 2.0 * (std::log(r) - std::log(256.0)) /
                              (std::log(8192.0) - std::log(256.0)) -
                          1.0;
        const double v = 6.0 + 1.5 * nx - 0.8 * ny + 0.6 * nx * ny + 0.25 * nx * nx * nx -
                         0.1 * ny * ny * ny * ny * ny;
        table << s << "," << r << "," << v << "\n";
      }
    }
    write_text(dir / "table.csv", table.str());
    const CliResult res = run_cli("preproc fit --table " + (dir / "table.csv").string() +
                                  " --s-max 12 --out " + (dir / "policy.json").string());
    CHECK(res.exit_code == 0);
    const auto pos = res.output.find("residual_rmse=");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(res.output.substr(pos + 14)) <= 1e-8);
  }
  SUBCASE("apply with an all-zero policy prints strength 0") {
    json policy;
    policy["schema_version"] = 1;
    policy["kind"] = "strength_policy";
    policy["degree"] = 5;
    policy["coefficients"] = std::vector<double>(21, 0.0);
    policy["sigma_range"] = {0.0, 30.0};
    policy["ln_rate_range"] = {std::log(100.0), std::log(10000.0)};
    policy["s_max"] = 10.0;
    policy["fit_rmse"] = 0.0;
    write_text(dir / "zero.json", policy.dump());
    const CliResult res = run_cli("preproc apply --policy " + (dir / "zero.json").string() +
                                  " --sigma 10 --rate 2000");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("strength=0") != std::string::npos);
  }
}

TEST_CASE("cli: timepred") {
  const fs::path dir = make_work_dir("timepred");

  // two-level corpus a boosted model drives to machine-precision fit
  std::ostringstream corpus;
  corpus << "height,total_pixels,frame_rate,n_frames,se_mean,se_max,se_median,se_std,"
            "te_mean,te_max,te_median,te_std,mean_brightness,preset,target_crf,"
            "measured_seconds,source_id\n";
  for (int i = 0; i < 60; ++i) {
    const bool big = i % 2 == 0;
    corpus << (big ? 1080 : 360) << "," << (big ? 2073600 : 230400) << ",30,120,"
           << "10,20,9,2,3,6,2.5,1,128,4,32," << (big ? 100.0 : 10.0) << ",src" << i / 6 << "\n";
  }
  write_text(dir / "corpus.csv", corpus.str());

  SUBCASE("train then eval reports an R2 = 1 block") {
    REQUIRE(run_cli("timepred train --data " + (dir / "corpus.csv").string() +
                    " --transform log --seed 3 --out " + (dir / "model.json").string())
                .exit_code == 0);
    const CliResult res = run_cli("timepred eval --model " + (dir / "model.json").string() +
                                  " --data " + (dir / "corpus.csv").string() + " --out " +
                                  (dir / "report.json").string());
    CHECK(res.exit_code == 0);
    CHECK(fs::exists(dir / "report.csv"));  // csv twin of the json report
    const json j = json::parse(slurp(dir / "report.json"));
    CHECK(j.at("metrics").contains("log"));
    CHECK(j.at("metrics").contains("log_to_linear"));
    CHECK(j.at("metrics").at("log").at("r2").get<double>() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(j.at("metrics").at("log").at("mae_pct").get<double>() <= 1e-4);
  }
  SUBCASE("training with a zero duration under the log transform is an explicit error") {
    std::string broken = corpus.str();
    broken.replace(broken.find(",100,src0"), 5, ",0,s");
    write_text(dir / "broken.csv", broken);
    const CliResult res = run_cli("timepred train --data " + (dir / "broken.csv").string() +
                                  " --transform log --out " + (dir / "m.json").string());
    CHECK(res.exit_code == 1);
    CHECK(res.output.find("non-positive") != std::string::npos);
  }
  SUBCASE("extract emits one row per clip") {
    REQUIRE(run_cli("synth-clip --kind structured --width 64 --height 64 --frames 3 --out " +
                    (dir / "c1.y4m").string())
                .exit_code == 0);
    REQUIRE(run_cli("synth-clip --kind structured --seed 9 --width 64 --height 64 --frames 3 "
                    "--out " +
                    (dir / "c2.y4m").string())
                .exit_code == 0);
    const CliResult res =
        run_cli("timepred extract " + (dir / "c1.y4m").string() + " " +
                (dir / "c2.y4m").string() + " --preset 4 --crf 32 --out " +
                (dir / "features.csv").string());
    CHECK(res.exit_code == 0);
    const std::string csv = slurp(dir / "features.csv");
    CHECK(count_occurrences(csv, ".y4m") == 2);
  }
  SUBCASE("the pricing path reproduces the published figures") {
    auto price = [&](const std::string& tier, const std::string& codec) {
      const CliResult res = run_cli("timepred predict --minutes 10 --price per_minute --tier " +
                                    tier + " --codec " + codec +
                                    " --height 1080 --fps 30 --region us-east");
      CHECK(res.exit_code == 0);
      const auto pos = res.output.find("total_usd=");
      REQUIRE(pos != std::string::npos);
      std::string v = res.output.substr(pos + 10);
      v.resize(v.find('\n'));
      return v;
    };
    CHECK(price("basic", "h264") == "0.15");
    CHECK(price("professional-speed", "h264") == "0.24");
    CHECK(price("professional-quality", "h264") == "0.42");
    CHECK(price("professional-speed", "hevc") == "0.48");
    CHECK(price("professional-quality", "hevc") == "3.3");
  }
  SUBCASE("a missing pricing key is named") {
    const CliResult res = run_cli(
        "timepred predict --minutes 10 --price per_minute --tier basic --codec hevc");
    CHECK(res.exit_code == 1);
    CHECK(res.output.find("hevc") != std::string::npos);
  }
}

TEST_CASE("cli: plot") {
  const fs::path dir = make_work_dir("plot");
  SUBCASE("two-point rd curve renders exactly one polyline, byte-deterministic") {
    write_text(dir / "two.csv", "rate_kbps,quality\n100,30\n400,34\n");
    REQUIRE(run_cli("plot --kind rd --input " + (dir / "two.csv").string() + " --out " +
                    (dir / "a.svg").string())
                .exit_code == 0);
    REQUIRE(run_cli("plot --kind rd --input " + (dir / "two.csv").string() + " --out " +
                    (dir / "b.svg").string())
                .exit_code == 0);
    const std::string svg = slurp(dir / "a.svg");
    CHECK(count_occurrences(svg, "<polyline") == 1);
    CHECK(svg == slurp(dir / "b.svg"));
  }
  SUBCASE("sweep plots emit one series per bitrate") {
    write_text(dir / "sweep.csv",
               "sigma,psnr_level,bitrate_kbps,strength,final_psnr\n"
               "10,27.5,1000,0,30\n10,27.5,1000,5,31\n"
               "10,27.5,4000,0,33\n10,27.5,4000,5,34\n");
    REQUIRE(run_cli("plot --kind sweep --input " + (dir / "sweep.csv").string() + " --out " +
                    (dir / "sweep.svg").string())
                .exit_code == 0);
    CHECK(count_occurrences(slurp(dir / "sweep.svg"), "<polyline") == 2);
  }
  SUBCASE("unknown kinds are usage errors") {
    write_text(dir / "x.csv", "rate_kbps,quality\n1,1\n");
    CHECK(run_cli("plot --kind pie --input " + (dir / "x.csv").string()).exit_code == 2);
  }
}

TEST_CASE("cli: partial batch failure isolates the bad clip") {
  const fs::path dir = make_work_dir("partial");
  REQUIRE(run_cli("synth-clip --kind structured --width 48 --height 48 --frames 3 --out " +
                  (dir / "good.y4m").string())
              .exit_code == 0);
  write_text(dir / "bad.y4m", "this is not video");
  const CliResult res = run_cli("optimize-lambda " + (dir / "good.y4m").string() + " " +
                                (dir / "bad.y4m").string() +
                                " --synthetic --planted-k 2 --gamma 0.5 --workers 2 --out " +
                                (dir / "out").string());
  CHECK(res.exit_code == 1);  // partial failure
  CHECK(fs::exists(dir / "out" / "good.lambda.json"));
  CHECK_FALSE(fs::exists(dir / "out" / "bad.lambda.json"));
  const json manifest = json::parse(slurp(dir / "out" / "manifest.json"));
  int ok = 0, failed = 0;
  for (const auto& t : manifest.at("tasks"))
    (t.at("status") == "ok" ? ok : failed) += 1;
  CHECK(ok == 1);
  CHECK(failed == 1);
  const json outcome = json::parse(slurp(dir / "out" / "good.lambda.json"));
  CHECK(outcome.at("seed").get<uint64_t>() == 1);
}

TEST_CASE("cli: standard streams move clips") {
  const fs::path dir = make_work_dir("streams");
  const CliResult res =
      run_cli("synth-clip --kind constant --width 16 --height 16 --frames 1 --out - | " +
              std::string(CLIPFORGE_BIN) + " degrade --input - --sigma 3 --seed 2 --out " +
              (dir / "noisy.y4m").string());
  CHECK(res.exit_code == 0);
  CHECK(clipforge::probe_y4m_file((dir / "noisy.y4m").string()).width == 16);
}

TEST_CASE("cli: synth-clip and degrade round trip through files") {
  const fs::path dir = make_work_dir("clips");
  REQUIRE(run_cli("synth-clip --kind random --seed 3 --width 32 --height 24 --frames 2 --out " +
                  (dir / "r.y4m").string())
              .exit_code == 0);
  const auto info = clipforge::probe_y4m_file((dir / "r.y4m").string());
  CHECK(info.width == 32);
  CHECK(info.height == 24);
  CHECK(info.frame_count == 2);

  REQUIRE(run_cli("degrade --input " + (dir / "r.y4m").string() + " --target-psnr 30 --seed 1 "
                  "--out " +
                  (dir / "n.y4m").string())
              .exit_code == 0);
  const clipforge::Clip noisy = clipforge::parse_y4m_file((dir / "n.y4m").string());
  CHECK(noisy.frame_count() == 2);
}

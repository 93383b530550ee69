// clipforge: per-clip transcoder optimization toolkit.
//
// Subcommands: bdrate, optimize-lambda, preproc (sweep|fit|apply),
// timepred (extract|train|eval|predict), plot, synth-clip, degrade.
// Exit codes: 0 success, 1 partial batch failure, 2 usage/config error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "clipforge/binning.hpp"
#include "clipforge/clipgen.hpp"
#include "clipforge/complexity.hpp"
#include "clipforge/external_codec.hpp"
#include "clipforge/k_features.hpp"
#include "clipforge/lambda_search.hpp"
#include "clipforge/metrics.hpp"
#include "clipforge/noise.hpp"
#include "clipforge/preproc_sweep.hpp"
#include "clipforge/pricing.hpp"
#include "clipforge/rng.hpp"
#include "clipforge/scale.hpp"
#include "clipforge/strength_policy.hpp"
#include "clipforge/svg_plot.hpp"
#include "clipforge/synthetic_codec.hpp"
#include "clipforge/thread_pool.hpp"
#include "clipforge/time_model.hpp"
#include "clipforge/toy_codec.hpp"
#include "clipforge/wiener3d.hpp"
#include "clipforge/y4m.hpp"

namespace fs = std::filesystem;
using namespace clipforge;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

void atomic_write(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot create " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// Manifest of one batch run, written atomically after all outputs.
struct Manifest {
  std::string command;
  uint64_t seed = 0;
  json config = json::object();
  json tasks = json::array();
  std::vector<std::string> outputs;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

  void add_task(const std::string& id, bool ok, const std::string& error = {}) {
    tasks.push_back({{"id", id}, {"status", ok ? "ok" : "failed"}, {"error", error}});
  }
  void write(const fs::path& dir) const {
    json j;
    j["schema_version"] = 1;
    j["tool"] = "clipforge";
    j["version"] = kVersion;
    j["command"] = command;
    j["seed"] = seed;
    j["config"] = config;
    j["tasks"] = tasks;
    j["outputs"] = outputs;
    j["elapsed_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    atomic_write(dir / "manifest.json", j.dump(2) + "\n");
  }
};

size_t resolve_workers(int flag_value) {
  if (flag_value > 0) return static_cast<size_t>(flag_value);
  return default_worker_count();
}

// ---------------------------------------------------------------------------
// bdrate

int cmd_bdrate(const std::string& test_path, const std::string& ref_path,
               const std::string& json_out) {
  const RDCurve test = read_rd_curve_csv_file(test_path);
  const RDCurve ref = read_rd_curve_csv_file(ref_path);
  const double bd = bd_rate(test, ref);
  std::cout << "bd_rate_pct=" << fmt_double(bd) << "\n";
  if (!json_out.empty()) {
    json j;
    j["schema_version"] = 1;
    j["test"] = test_path;
    j["reference"] = ref_path;
    j["metric"] = quality_metric_name(test.metric());
    j["bd_rate_pct"] = bd;
    atomic_write(json_out, j.dump(2) + "\n");
  }
  return 0;
}

// ---------------------------------------------------------------------------
// optimize-lambda

struct LambdaCmdOptions {
  std::vector<std::string> clips;
  std::string out_dir = "clipforge-out";
  std::string config_path;
  bool synthetic = false;
  double planted_k = 2.0;
  double planted_k2 = 0.0;  // 0 = absent
  double gamma = 0.5;
  double jitter = 0.0;
  std::string encoder = "x264";
  std::string profile_json;
  int dims = 1;
  std::string metric = "PSNR";
  std::string proxy = "none";
  int workers = 0;
  uint64_t seed = 1;
  double k_min = 1.0 / 16.0, k_max = 16.0;
  int max_iter = 50;
  double min_improvement = 0.05;
  int patience = 3;
  int encode_budget = 300;
};

void apply_json_config(LambdaCmdOptions& opt) {
  if (opt.config_path.empty()) return;
  const json j = json::parse(read_file(opt.config_path));
  if (j.contains("seed")) opt.seed = j["seed"].get<uint64_t>();
  if (j.contains("workers")) opt.workers = j["workers"].get<int>();
  if (j.contains("output_dir")) opt.out_dir = j["output_dir"].get<std::string>();
  if (j.contains("lambda")) {
    const auto& l = j["lambda"];
    if (l.contains("dims")) opt.dims = l["dims"].get<int>();
    if (l.contains("metric")) opt.metric = l["metric"].get<std::string>();
    if (l.contains("proxy")) opt.proxy = l["proxy"].get<std::string>();
    if (l.contains("k_min")) opt.k_min = l["k_min"].get<double>();
    if (l.contains("k_max")) opt.k_max = l["k_max"].get<double>();
    if (l.contains("max_iter")) opt.max_iter = l["max_iter"].get<int>();
    if (l.contains("min_improvement_pct")) opt.min_improvement = l["min_improvement_pct"].get<double>();
    if (l.contains("patience")) opt.patience = l["patience"].get<int>();
    if (l.contains("encode_budget")) opt.encode_budget = l["encode_budget"].get<int>();
  }
  if (j.contains("synthetic")) {
    const auto& s = j["synthetic"];
    opt.synthetic = true;
    if (s.contains("planted_k")) opt.planted_k = s["planted_k"].get<double>();
    if (s.contains("planted_k2")) opt.planted_k2 = s["planted_k2"].get<double>();
    if (s.contains("gamma")) opt.gamma = s["gamma"].get<double>();
    if (s.contains("jitter")) opt.jitter = s["jitter"].get<double>();
  }
  if (j.contains("encoder")) opt.encoder = j["encoder"].get<std::string>();
}

int cmd_optimize_lambda(LambdaCmdOptions opt) {
  apply_json_config(opt);
  if (opt.clips.empty()) throw CLI::ValidationError("optimize-lambda", "no input clips given");

  LambdaSearchConfig config;
  config.k_min = opt.k_min;
  config.k_max = opt.k_max;
  config.dims = opt.dims;
  config.max_iter = opt.max_iter;
  config.metric = quality_metric_from_name(opt.metric);
  config.proxy = proxy_strategy_from_name(opt.proxy);
  config.early_stop.min_improvement_pct = opt.min_improvement;
  config.early_stop.patience = opt.patience;
  config.early_stop.encode_budget = opt.encode_budget;
  config.validate();

  const fs::path out_dir(opt.out_dir);
  fs::create_directories(out_dir);
  ThreadPool pool(resolve_workers(opt.workers));

  struct ClipResult {
    std::string clip;
    bool ok = false;
    std::string error;
    LambdaSearchOutcome outcome;
  };

  auto results = parallel_map<ClipResult>(&pool, opt.clips.size(), [&](size_t i) {
    ClipResult res;
    res.clip = opt.clips[i];
    try {
      const Clip clip = parse_y4m_file(opt.clips[i]);
      const uint64_t clip_seed =
          hash_combine(opt.seed, fnv1a64(opt.clips[i].data(), opt.clips[i].size()));

      std::unique_ptr<CodecGateway> gateway;
      if (opt.synthetic) {
        SyntheticCodecSpec spec;
        spec.gamma = opt.gamma;
        spec.k_star = {opt.planted_k};
        if (opt.dims == 2) spec.k_star.push_back(opt.planted_k2 > 0 ? opt.planted_k2 : 1.5);
        spec.noise_std_log = opt.jitter;
        spec.seed = clip_seed;
        gateway = std::make_unique<SyntheticCodec>(spec);
      } else {
        EncoderProfile profile = opt.profile_json.empty()
                                     ? profile_by_name(opt.encoder)
                                     : profile_from_json(read_file(opt.profile_json));
        gateway = std::make_unique<ExternalEncoder>(profile, opt.clips[i]);
      }

      res.outcome = config.proxy == ProxyStrategy::kNone
                        ? optimize_k(*gateway, clip, config)
                        : optimize_with_proxy(*gateway, clip, config);
      res.ok = true;
    } catch (const std::exception& e) {
      res.error = e.what();
    }
    return res;
  });

  Manifest manifest;
  manifest.command = "optimize-lambda";
  manifest.seed = opt.seed;
  manifest.config = {{"dims", opt.dims},          {"metric", opt.metric},
                     {"proxy", opt.proxy},        {"synthetic", opt.synthetic},
                     {"k_min", opt.k_min},        {"k_max", opt.k_max},
                     {"max_iter", opt.max_iter},  {"encode_budget", opt.encode_budget},
                     {"encoder", opt.encoder}};

  std::ostringstream csv;
  csv << "# clipforge lambda_summary schema_version=1\n";
  csv << "clip,encoder,dims,k1,k2,iterations,optimizer_iterations,total_encodes,"
         "bd_rate_gain_pct,encode_seconds,terminated_early,reason\n";
  size_t failures = 0;
  double gain_sum = 0.0, gain_best = 0.0;
  int over1 = 0, over5 = 0, ok_count = 0;
  for (size_t i = 0; i < results.size(); ++i) {
    const ClipResult& r = results[i];
    if (!r.ok) {
      ++failures;
      manifest.add_task(r.clip, false, r.error);
      std::cerr << "clip failed: " << r.clip << ": " << r.error << "\n";
      continue;
    }
    const auto& o = r.outcome;
    const std::string stem = fs::path(r.clip).stem().string();
    const fs::path outcome_path = out_dir / (stem + ".lambda.json");
    json outcome_json = json::parse(o.to_json());
    outcome_json["seed"] = opt.seed;
    outcome_json["clip"] = r.clip;
    atomic_write(outcome_path, outcome_json.dump(2) + "\n");
    manifest.outputs.push_back(outcome_path.string());
    manifest.add_task(r.clip, true);

    csv << r.clip << "," << (opt.synthetic ? "synthetic" : opt.encoder) << "," << opt.dims << ","
        << fmt_double(o.k_opt[0]) << "," << fmt_double(o.k_opt.size() > 1 ? o.k_opt[1] : 1.0)
        << "," << o.iterations << "," << o.optimizer_iterations << "," << o.total_encodes << ","
        << fmt_double(o.bd_rate_gain) << "," << fmt_double(o.wall_seconds) << ","
        << (o.terminated_early ? "1" : "0") << "," << o.termination_reason << "\n";
    gain_sum += o.bd_rate_gain;
    gain_best = std::min(gain_best, o.bd_rate_gain);
    over1 += o.bd_rate_gain <= -1.0;
    over5 += o.bd_rate_gain <= -5.0;
    ++ok_count;
  }

  const fs::path summary_csv = out_dir / "summary.csv";
  atomic_write(summary_csv, csv.str());
  manifest.outputs.push_back(summary_csv.string());

  json summary;
  summary["schema_version"] = 1;
  summary["seed"] = opt.seed;
  summary["clips_total"] = opt.clips.size();
  summary["clips_failed"] = failures;
  if (ok_count > 0) {
    summary["avg_bd_rate_gain_pct"] = gain_sum / ok_count;
    summary["best_bd_rate_gain_pct"] = gain_best;
    summary["clips_gain_over_1pct"] = over1;
    summary["clips_gain_over_5pct"] = over5;
  }
  const fs::path summary_json = out_dir / "summary.json";
  atomic_write(summary_json, summary.dump(2) + "\n");
  manifest.outputs.push_back(summary_json.string());
  manifest.write(out_dir);

  std::cout << "completed " << ok_count << "/" << opt.clips.size() << " clips, summary in "
            << summary_csv.string() << "\n";
  if (failures == opt.clips.size()) return 1;
  return failures > 0 ? 1 : 0;
}

// ---------------------------------------------------------------------------
// preproc

int cmd_preproc_sweep(const std::vector<std::string>& clips, std::vector<double> levels,
                      std::vector<double> rates, std::vector<double> strengths,
                      const std::string& out_csv, uint64_t seed, int workers) {
  if (clips.empty()) throw CLI::ValidationError("preproc sweep", "no input clips given");
  SweepGrid grid = SweepGrid::default_grid();
  if (!levels.empty()) grid.psnr_levels = std::move(levels);
  if (!rates.empty()) grid.bitrates_kbps = std::move(rates);
  if (!strengths.empty()) grid.strengths = std::move(strengths);

  std::vector<Clip> clean;
  for (const auto& path : clips) clean.push_back(parse_y4m_file(path));

  ThreadPool pool(resolve_workers(workers));
  const SweepResult sweep = run_sweep(
      clean, [](const Clip& c, double rate) { return toy_intra_encode(c, rate); }, grid, seed,
      &pool);

  std::ostringstream buf;
  buf << "# seed=" << seed << "\n";
  write_sweep_csv(sweep, buf);
  atomic_write(out_csv, buf.str());

  json j;
  j["schema_version"] = 1;
  j["seed"] = seed;
  j["clip_ids"] = sweep.clip_ids;
  auto& cells = j["cells"] = json::array();
  for (const auto& [key, value] : sweep.cells)
    cells.push_back({{"sigma", sigma_for_target_psnr(key.psnr_level)},
                     {"psnr_level", key.psnr_level},
                     {"bitrate_kbps", key.bitrate_kbps},
                     {"strength", key.strength},
                     {"final_psnr", value}});
  auto& holes = j["holes"] = json::array();
  for (const auto& hole : sweep.holes)
    holes.push_back({{"psnr_level", hole.psnr_level},
                     {"bitrate_kbps", hole.bitrate_kbps},
                     {"strength", hole.strength}});
  atomic_write(fs::path(out_csv).replace_extension(".json"), j.dump(2) + "\n");

  std::cout << "sweep cells=" << sweep.cells.size() << " holes=" << sweep.holes.size()
            << " -> " << out_csv << "\n";
  return sweep.holes.empty() ? 0 : 1;
}

// --table rows: sigma,bitrate_kbps,best_strength (a precomputed argmax).
ArgmaxTable read_argmax_table(const std::string& path) {
  std::istringstream in(read_file(path));
  ArgmaxTable table;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("sigma", 0) == 0) continue;
    std::istringstream row(line);
    std::string field;
    std::vector<double> vals;
    while (std::getline(row, field, ',')) vals.push_back(std::stod(field));
    if (vals.size() < 3) throw std::runtime_error(path + ": expected sigma,rate,strength rows");
    table.entries.push_back({vals[0], vals[1], vals[2], 0.0});
  }
  return table;
}

int cmd_preproc_fit(const std::string& sweep_csv, const std::string& table_csv, double s_max,
                    const std::string& out_json) {
  ArgmaxTable table;
  if (!table_csv.empty()) {
    table = read_argmax_table(table_csv);
  } else {
    std::istringstream in(read_file(sweep_csv));
    const SweepResult sweep = read_sweep_csv(in);
    table = argmax_strengths(sweep);
  }
  for (const auto& w : table.warnings) std::cerr << "warning: " << w << "\n";
  if (s_max <= 0)
    for (const auto& e : table.entries) s_max = std::max(s_max, e.best_strength);
  const StrengthPolicy policy = fit_policy(table, s_max);
  atomic_write(out_json, policy.to_json() + "\n");
  std::cout << "fit residual_rmse=" << fmt_double(policy.fit_rmse) << " -> " << out_json << "\n";
  return 0;
}

int cmd_preproc_apply(const std::string& policy_json, double sigma, double rate,
                      const std::string& input, const std::string& output) {
  const StrengthPolicy policy = StrengthPolicy::from_json(read_file(policy_json));
  const double strength = optimal_strength(policy, sigma, rate);
  std::cout << "strength=" << fmt_double(strength) << "\n";
  if (!input.empty() && !output.empty()) {
    const Clip clip = parse_y4m_file(input);
    write_y4m_file(wiener3d_denoise(clip, strength), output);
    std::cout << "denoised -> " << output << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// timepred

int cmd_timepred_extract(const std::vector<std::string>& clips, int preset, int crf,
                         double seconds, const std::string& out_csv, int workers) {
  if (clips.empty()) throw CLI::ValidationError("timepred extract", "no input clips given");
  ThreadPool pool(resolve_workers(workers));
  auto samples = parallel_map<TimeSample>(&pool, clips.size(), [&](size_t i) {
    const Clip clip = parse_y4m_file(clips[i]);
    TimeSample s;
    s.features = extract_complexity(clip, preset, crf);
    s.measured_seconds = seconds > 0 ? seconds : 1.0;
    s.source_id = clips[i];
    return s;
  });
  std::ostringstream buf;
  write_time_samples_csv(samples, buf);
  atomic_write(out_csv, buf.str());
  std::cout << "extracted " << samples.size() << " rows -> " << out_csv << "\n";
  return 0;
}

int cmd_timepred_train(const std::string& data_csv, const std::string& transform,
                       const std::string& out_json, uint64_t seed, int rounds, int depth,
                       double learning_rate) {
  std::istringstream in(read_file(data_csv));
  const auto samples = read_time_samples_csv(in);
  BoostParams params;
  params.n_rounds = rounds;
  params.tree.max_depth = depth;
  params.learning_rate = learning_rate;
  const TimeModel model =
      train_time_model(samples, target_transform_from_name(transform), params, seed);
  atomic_write(out_json, model.to_json() + "\n");
  std::cout << "trained on " << samples.size() << " samples -> " << out_json << "\n";
  return 0;
}

int cmd_timepred_eval(const std::string& model_json, const std::string& data_csv,
                      const std::string& out_json) {
  const TimeModel model = TimeModel::from_json(read_file(model_json));
  std::istringstream in(read_file(data_csv));
  const auto holdout = read_time_samples_csv(in);

  json blocks;
  auto block = [&](EvalSpace space) {
    const EvalReport rep = evaluate(model, holdout, space);
    json b;
    if (rep.r2)
      b["r2"] = *rep.r2;
    else
      b["r2"] = nullptr;
    b["mae_pct"] = rep.mae_pct;
    b["smae_pct"] = rep.smae_pct;
    blocks[eval_space_name(space)] = b;
  };
  if (model.transform == TargetTransform::kLog) {
    block(EvalSpace::kLog);
    block(EvalSpace::kLogToLinear);
  } else {
    block(EvalSpace::kLinear);
  }
  json j;
  j["schema_version"] = 1;
  j["model"] = model_json;
  j["holdout_rows"] = holdout.size();
  j["metrics"] = blocks;
  const std::string text = j.dump(2) + "\n";
  if (out_json.empty()) {
    std::cout << text;
  } else {
    atomic_write(out_json, text);
    std::ostringstream csv;
    csv << "# clipforge eval_report schema_version=1\n";
    csv << "space,r2,mae_pct,smae_pct\n";
    for (const auto& [space, b] : blocks.items()) {
      csv << space << ",";
      if (b.at("r2").is_null())
        csv << "";
      else
        csv << fmt_double(b.at("r2").get<double>());
      csv << "," << fmt_double(b.at("mae_pct").get<double>()) << ","
          << fmt_double(b.at("smae_pct").get<double>()) << "\n";
    }
    atomic_write(fs::path(out_json).replace_extension(".csv"), csv.str());
  }
  return 0;
}

int cmd_timepred_predict(const std::string& model_json, const std::string& clip_path, int preset,
                         int crf, double minutes, const std::string& price_mode,
                         const std::string& tier, const std::string& codec, int height,
                         double fps, const std::string& region, const std::string& instance,
                         const std::string& pricing_json) {
  double predicted_seconds = 0.0;
  if (!model_json.empty()) {
    const TimeModel model = TimeModel::from_json(read_file(model_json));
    if (clip_path.empty())
      throw CLI::ValidationError("timepred predict", "--input clip required with --model");
    const Clip clip = parse_y4m_file(clip_path);
    predicted_seconds = predict_time(model, extract_complexity(clip, preset, crf));
    std::cout << "predicted_seconds=" << fmt_double(predicted_seconds) << "\n";
  }
  if (price_mode.empty()) return 0;

  const PricingTable table =
      pricing_json.empty() ? default_pricing_table() : PricingTable::from_json(read_file(pricing_json));
  CostJob job;
  job.output_minutes = minutes;
  job.codecs = {codec};
  job.tier = tier;
  job.region = region;
  job.height = height;
  job.fps = fps;
  job.instance_class = instance;
  const CostMode mode =
      price_mode == "per_minute" ? CostMode::kPerMinute : CostMode::kComputeTime;
  const CostEstimate est = estimate_cost(job, table, mode, predicted_seconds);
  std::cout << est.to_json() << "\n";
  std::cout << "total_usd=" << dollars_string(est.total) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// plot

// Raw (rate, quality) rows; plotting has no use for curve validation, so
// sparse or non-monotone inputs render too.
std::vector<std::pair<double, double>> read_rd_points(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::pair<double, double>> points;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("rate_kbps", 0) == 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error(path + ": expected 'rate,quality'");
    points.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
  }
  return points;
}

int cmd_plot(const std::string& kind, const std::string& input, const std::string& output) {
  PlotSpec spec;
  if (kind == "rd") {
    spec.title = "Rate-distortion curve";
    spec.x_label = "bitrate [kbps]";
    spec.y_label = "quality";
    spec.log_x = true;
    PlotSeries s;
    s.label = "rd";
    s.points = read_rd_points(input);
    spec.series.push_back(std::move(s));
  } else if (kind == "sweep") {
    std::istringstream in(read_file(input));
    const SweepResult sweep = read_sweep_csv(in);
    spec.title = "Denoiser strength sweep";
    spec.x_label = "filter strength";
    spec.y_label = "final PSNR [dB]";
    for (double level : sweep.grid.psnr_levels) {
      for (double rate : sweep.grid.bitrates_kbps) {
        PlotSeries s;
        std::ostringstream label;
        label << rate << " kbps";
        if (sweep.grid.psnr_levels.size() > 1) label << " @ " << level << " dB";
        s.label = label.str();
        for (double strength : sweep.grid.strengths) {
          const auto it = sweep.cells.find({level, rate, strength});
          if (it != sweep.cells.end()) s.points.push_back({strength, it->second});
        }
        if (!s.points.empty()) spec.series.push_back(std::move(s));
      }
    }
  } else if (kind == "scatter") {
    std::istringstream in(read_file(input));
    const auto samples = read_time_samples_csv(in);
    spec.title = "Spatial vs temporal energy";
    spec.x_label = "SE mean";
    spec.y_label = "TE mean";
    PlotSeries s;
    s.label = "clips";
    s.scatter_only = true;
    for (const auto& sample : samples)
      s.points.push_back({sample.features.se_mean, sample.features.te_mean});
    spec.series.push_back(std::move(s));
  } else {
    throw CLI::ValidationError("plot", "unknown kind '" + kind + "'");
  }
  atomic_write(output, render_svg(spec));
  std::cout << "plot -> " << output << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// clip utilities

// "-" selects the standard streams for clip input/output.
Clip read_clip(const std::string& path) {
  if (path == "-") return parse_y4m(std::cin);
  return parse_y4m_file(path);
}

void write_clip(const Clip& clip, const std::string& path) {
  if (path == "-")
    write_y4m(clip, std::cout);
  else
    write_y4m_file(clip, path);
}

int cmd_synth_clip(const std::string& kind, int width, int height, int frames, int fps,
                   uint64_t seed, int value, const std::string& output) {
  Clip clip = [&] {
    if (kind == "constant")
      return make_constant_clip(width, height, frames, {fps, 1}, static_cast<uint8_t>(value));
    if (kind == "random") return make_random_clip(width, height, frames, {fps, 1}, seed);
    return make_structured_clip(width, height, frames, {fps, 1}, seed);
  }();
  write_clip(clip, output);
  if (output != "-")
    std::cout << "clip " << width << "x" << height << "x" << frames << " -> " << output << "\n";
  return 0;
}

int cmd_degrade(const std::string& input, const std::string& output, double target_psnr,
                double sigma, uint64_t seed) {
  const Clip clip = read_clip(input);
  if (target_psnr > 0) sigma = sigma_for_target_psnr(target_psnr);
  if (sigma < 0) throw CLI::ValidationError("degrade", "need --sigma or --target-psnr");
  write_clip(add_gaussian_noise(clip, sigma, seed), output);
  if (output != "-") std::cout << "degraded sigma=" << fmt_double(sigma) << " -> " << output << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clipforge: per-clip transcoder optimization toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // bdrate
  std::string bd_test, bd_ref, bd_json;
  auto* bdrate_cmd = app.add_subcommand("bdrate", "BD-rate between two RD-curve CSVs");
  bdrate_cmd->add_option("--test", bd_test, "test curve CSV")->required();
  bdrate_cmd->add_option("--ref", bd_ref, "reference curve CSV")->required();
  bdrate_cmd->add_option("--json", bd_json, "write a JSON report here");

  // optimize-lambda
  LambdaCmdOptions lam;
  auto* lambda_cmd = app.add_subcommand("optimize-lambda", "per-clip Lagrangian multiplier search");
  lambda_cmd->add_option("clips", lam.clips, "input .y4m clips");
  lambda_cmd->add_option("--config", lam.config_path, "JSON job config");
  lambda_cmd->add_option("--out", lam.out_dir, "output directory");
  lambda_cmd->add_flag("--synthetic", lam.synthetic, "use the synthetic analytic codec");
  lambda_cmd->add_option("--planted-k", lam.planted_k, "synthetic: planted k*");
  lambda_cmd->add_option("--planted-k2", lam.planted_k2, "synthetic: planted k* of group 2");
  lambda_cmd->add_option("--gamma", lam.gamma, "synthetic: rate curvature");
  lambda_cmd->add_option("--jitter", lam.jitter, "synthetic: lognormal jitter sigma");
  lambda_cmd->add_option("--encoder", lam.encoder, "builtin profile name");
  lambda_cmd->add_option("--profile-json", lam.profile_json, "encoder profile JSON file");
  lambda_cmd->add_option("--dims", lam.dims, "1 or 2 multipliers");
  lambda_cmd->add_option("--metric", lam.metric, "PSNR or MS-SSIM");
  lambda_cmd->add_option("--proxy", lam.proxy, "none | downsample | fast_preset");
  lambda_cmd->add_option("--workers", lam.workers, "worker pool size");
  lambda_cmd->add_option("--seed", lam.seed, "job seed");
  lambda_cmd->add_option("--k-min", lam.k_min, "lower k bound");
  lambda_cmd->add_option("--k-max", lam.k_max, "upper k bound");
  lambda_cmd->add_option("--max-iter", lam.max_iter, "optimizer iteration cap");
  lambda_cmd->add_option("--min-improvement", lam.min_improvement,
                         "early stop: BD-rate points per patience window");
  lambda_cmd->add_option("--patience", lam.patience, "early stop window");
  lambda_cmd->add_option("--encode-budget", lam.encode_budget, "early stop encode budget");

  // preproc
  auto* preproc_cmd = app.add_subcommand("preproc", "pre-processor calibration");
  preproc_cmd->require_subcommand(1);
  std::vector<std::string> sweep_clips;
  std::vector<double> sweep_levels, sweep_rates, sweep_strengths;
  std::string sweep_out = "sweep.csv";
  uint64_t sweep_seed = 1;
  int sweep_workers = 0;
  auto* sweep_cmd = preproc_cmd->add_subcommand("sweep", "noise/bitrate/strength sweep");
  sweep_cmd->add_option("clips", sweep_clips, "clean input clips");
  sweep_cmd->add_option("--psnr-levels", sweep_levels, "degradation PSNR levels [dB]");
  sweep_cmd->add_option("--bitrates", sweep_rates, "target bitrates [kbps]");
  sweep_cmd->add_option("--strengths", sweep_strengths, "denoiser strengths (start at 0)");
  sweep_cmd->add_option("--out", sweep_out, "output CSV");
  sweep_cmd->add_option("--seed", sweep_seed, "noise seed");
  sweep_cmd->add_option("--workers", sweep_workers, "worker pool size");

  std::string fit_sweep, fit_table, fit_out = "policy.json";
  double fit_smax = 0.0;
  auto* fit_cmd = preproc_cmd->add_subcommand("fit", "fit the strength policy polynomial");
  fit_cmd->add_option("--sweep", fit_sweep, "sweep CSV (argmax taken per row)");
  fit_cmd->add_option("--table", fit_table, "precomputed argmax CSV: sigma,rate,strength");
  fit_cmd->add_option("--s-max", fit_smax, "strength clamp (default: table max)");
  fit_cmd->add_option("--out", fit_out, "output policy JSON");

  std::string apply_policy, apply_in, apply_out;
  double apply_sigma = 0.0, apply_rate = 0.0;
  auto* apply_cmd = preproc_cmd->add_subcommand("apply", "query the policy, optionally denoise");
  apply_cmd->add_option("--policy", apply_policy, "policy JSON")->required();
  apply_cmd->add_option("--sigma", apply_sigma, "measured noise level")->required();
  apply_cmd->add_option("--rate", apply_rate, "target bitrate [kbps]")->required();
  apply_cmd->add_option("--input", apply_in, "clip to denoise");
  apply_cmd->add_option("--output", apply_out, "denoised clip path");

  // timepred
  auto* timepred_cmd = app.add_subcommand("timepred", "encode-time prediction and cost");
  timepred_cmd->require_subcommand(1);
  std::vector<std::string> ex_clips;
  int ex_preset = 4, ex_crf = 32, ex_workers = 0;
  double ex_seconds = 0.0;
  std::string ex_out = "features.csv";
  auto* extract_cmd = timepred_cmd->add_subcommand("extract", "complexity features from clips");
  extract_cmd->add_option("clips", ex_clips, "input clips");
  extract_cmd->add_option("--preset", ex_preset, "encoder preset ordinal");
  extract_cmd->add_option("--crf", ex_crf, "target CRF");
  extract_cmd->add_option("--seconds", ex_seconds, "measured encode seconds for all rows");
  extract_cmd->add_option("--out", ex_out, "output CSV");
  extract_cmd->add_option("--workers", ex_workers, "worker pool size");

  std::string train_data, train_transform = "log", train_out = "model.json";
  uint64_t train_seed = 1;
  int train_rounds = 200, train_depth = 6;
  double train_lr = 0.1;
  auto* train_cmd = timepred_cmd->add_subcommand("train", "train the boosted time model");
  train_cmd->add_option("--data", train_data, "corpus CSV")->required();
  train_cmd->add_option("--transform", train_transform, "linear or log");
  train_cmd->add_option("--out", train_out, "model JSON");
  train_cmd->add_option("--seed", train_seed, "training seed");
  train_cmd->add_option("--rounds", train_rounds, "boosting rounds");
  train_cmd->add_option("--depth", train_depth, "tree depth");
  train_cmd->add_option("--learning-rate", train_lr, "shrinkage");

  std::string eval_model, eval_data, eval_out;
  auto* eval_cmd = timepred_cmd->add_subcommand("eval", "score a model on a holdout CSV");
  eval_cmd->add_option("--model", eval_model, "model JSON")->required();
  eval_cmd->add_option("--data", eval_data, "holdout CSV")->required();
  eval_cmd->add_option("--out", eval_out, "report JSON (stdout if omitted)");

  std::string pr_model, pr_clip, pr_price, pr_tier, pr_codec = "h264", pr_region = "us-east";
  std::string pr_instance = "lambda", pr_pricing;
  int pr_preset = 4, pr_crf = 32, pr_height = 1080;
  double pr_minutes = 0.0, pr_fps = 30.0;
  auto* predict_cmd = timepred_cmd->add_subcommand("predict", "predict seconds and/or cost");
  predict_cmd->add_option("--model", pr_model, "model JSON");
  predict_cmd->add_option("--input", pr_clip, "clip to predict for");
  predict_cmd->add_option("--preset", pr_preset, "encoder preset ordinal");
  predict_cmd->add_option("--crf", pr_crf, "target CRF");
  predict_cmd->add_option("--minutes", pr_minutes, "output minutes for per_minute pricing");
  predict_cmd->add_option("--price", pr_price, "per_minute or compute_time");
  predict_cmd->add_option("--tier", pr_tier, "pricing tier");
  predict_cmd->add_option("--codec", pr_codec, "pricing codec");
  predict_cmd->add_option("--height", pr_height, "output height for the resolution class");
  predict_cmd->add_option("--fps", pr_fps, "output fps for the framerate class");
  predict_cmd->add_option("--region", pr_region, "pricing region");
  predict_cmd->add_option("--instance", pr_instance, "compute_time instance class");
  predict_cmd->add_option("--pricing", pr_pricing, "pricing table JSON (default built-in)");

  // plot
  std::string plot_kind, plot_in, plot_out = "plot.svg";
  auto* plot_cmd = app.add_subcommand("plot", "render rd | sweep | scatter CSVs to SVG");
  plot_cmd->add_option("--kind", plot_kind, "rd | sweep | scatter")->required();
  plot_cmd->add_option("--input", plot_in, "input CSV")->required();
  plot_cmd->add_option("--out", plot_out, "output SVG");

  // synth-clip
  std::string sc_kind = "structured", sc_out = "clip.y4m";
  int sc_w = 192, sc_h = 192, sc_frames = 8, sc_fps = 30, sc_value = 128;
  uint64_t sc_seed = 1;
  auto* synth_cmd = app.add_subcommand("synth-clip", "generate a synthetic test clip");
  synth_cmd->add_option("--kind", sc_kind, "structured | constant | random");
  synth_cmd->add_option("--width", sc_w, "luma width");
  synth_cmd->add_option("--height", sc_h, "luma height");
  synth_cmd->add_option("--frames", sc_frames, "frame count");
  synth_cmd->add_option("--fps", sc_fps, "frames per second");
  synth_cmd->add_option("--seed", sc_seed, "generator seed");
  synth_cmd->add_option("--value", sc_value, "constant luma value");
  synth_cmd->add_option("--out", sc_out, "output .y4m");

  // degrade
  std::string dg_in, dg_out = "degraded.y4m";
  double dg_psnr = 0.0, dg_sigma = -1.0;
  uint64_t dg_seed = 1;
  auto* degrade_cmd = app.add_subcommand("degrade", "add calibrated gaussian noise");
  degrade_cmd->add_option("--input", dg_in, "clean input clip")->required();
  degrade_cmd->add_option("--out", dg_out, "output clip");
  degrade_cmd->add_option("--target-psnr", dg_psnr, "target degradation PSNR [dB]");
  degrade_cmd->add_option("--sigma", dg_sigma, "noise standard deviation");
  degrade_cmd->add_option("--seed", dg_seed, "noise seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*bdrate_cmd) return cmd_bdrate(bd_test, bd_ref, bd_json);
    if (*lambda_cmd) return cmd_optimize_lambda(lam);
    if (*sweep_cmd)
      return cmd_preproc_sweep(sweep_clips, sweep_levels, sweep_rates, sweep_strengths, sweep_out,
                               sweep_seed, sweep_workers);
    if (*fit_cmd) {
      if (fit_sweep.empty() && fit_table.empty())
        throw CLI::ValidationError("preproc fit", "need --sweep or --table");
      return cmd_preproc_fit(fit_sweep, fit_table, fit_smax, fit_out);
    }
    if (*apply_cmd)
      return cmd_preproc_apply(apply_policy, apply_sigma, apply_rate, apply_in, apply_out);
    if (*extract_cmd)
      return cmd_timepred_extract(ex_clips, ex_preset, ex_crf, ex_seconds, ex_out, ex_workers);
    if (*train_cmd)
      return cmd_timepred_train(train_data, train_transform, train_out, train_seed, train_rounds,
                                train_depth, train_lr);
    if (*eval_cmd) return cmd_timepred_eval(eval_model, eval_data, eval_out);
    if (*predict_cmd)
      return cmd_timepred_predict(pr_model, pr_clip, pr_preset, pr_crf, pr_minutes, pr_price,
                                  pr_tier, pr_codec, pr_height, pr_fps, pr_region, pr_instance,
                                  pr_pricing);
    if (*plot_cmd) return cmd_plot(plot_kind, plot_in, plot_out);
    if (*synth_cmd)
      return cmd_synth_clip(sc_kind, sc_w, sc_h, sc_frames, sc_fps, sc_seed, sc_value, sc_out);
    if (*degrade_cmd) return cmd_degrade(dg_in, dg_out, dg_psnr, dg_sigma, dg_seed);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

#include "clipforge/preproc_sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <ostream>
#include <sstream>

#include "clipforge/metrics.hpp"
#include "clipforge/noise.hpp"
#include "clipforge/rng.hpp"
#include "clipforge/thread_pool.hpp"
#include "clipforge/wiener3d.hpp"

namespace clipforge {

void SweepGrid::validate(bool for_fitting) const {
  const size_t min_axis = for_fitting ? 6 : 1;
  if (psnr_levels.size() < min_axis || bitrates_kbps.size() < min_axis)
    throw SweepError("sweep grid: psnr/bitrate axes need at least " + std::to_string(min_axis) +
                     " values");
  if (strengths.empty() || strengths.front() != 0.0)
    throw SweepError("sweep grid: strengths must start at 0");
  if (!std::is_sorted(strengths.begin(), strengths.end()))
    throw SweepError("sweep grid: strengths must be ascending");
  for (double p : psnr_levels)
    if (!(p > 0)) throw SweepError("sweep grid: psnr levels must be positive");
  for (double r : bitrates_kbps)
    if (!(r > 0)) throw SweepError("sweep grid: bitrates must be positive");
}

SweepGrid SweepGrid::default_grid() {
  SweepGrid g;
  g.psnr_levels = {20.0, 25.0, 27.5, 30.0, 35.0, 40.0};
  g.bitrates_kbps = {256, 512, 1024, 2048, 4096, 8192};
  const double sigma_max = sigma_for_target_psnr(20.0);  // worst degradation level
  for (int i = 0; i < 8; ++i) g.strengths.push_back(i * 2.0 * sigma_max / 7.0);
  g.strengths[0] = 0.0;
  return g;
}

SweepResult run_sweep(const std::vector<Clip>& clean_clips, const BitrateEncoder& encoder,
                      const SweepGrid& grid, uint64_t seed, ThreadPool* pool) {
  grid.validate();
  if (clean_clips.empty()) throw SweepError("run_sweep: no clips");

  SweepResult result;
  result.grid = grid;
  for (const auto& c : clean_clips) result.clip_ids.push_back(c.source_id());

  // Task = (clip, psnr level, strength): one degrade+denoise, then all rates.
  struct Task {
    size_t clip;
    size_t level;
    size_t strength;
  };
  std::vector<Task> tasks;
  for (size_t c = 0; c < clean_clips.size(); ++c)
    for (size_t p = 0; p < grid.psnr_levels.size(); ++p)
      for (size_t s = 0; s < grid.strengths.size(); ++s) tasks.push_back({c, p, s});

  struct CellValue {
    double psnr = 0.0;
    bool ok = false;
  };
  using TaskResult = std::vector<CellValue>;  // one entry per bitrate

  auto results = parallel_map<TaskResult>(pool, tasks.size(), [&](size_t ti) {
    const Task& task = tasks[ti];
    const Clip& clean = clean_clips[task.clip];
    const double level = grid.psnr_levels[task.level];
    const double sigma = sigma_for_target_psnr(level);

    uint64_t noise_seed = seed;
    noise_seed = hash_combine(noise_seed, static_cast<uint64_t>(task.clip));
    uint64_t level_bits;
    std::memcpy(&level_bits, &level, sizeof(level_bits));
    noise_seed = hash_combine(noise_seed, level_bits);

    const Clip degraded = add_gaussian_noise(clean, sigma, noise_seed);
    const Clip denoised = wiener3d_denoise(degraded, grid.strengths[task.strength]);

    TaskResult out(grid.bitrates_kbps.size());
    for (size_t r = 0; r < grid.bitrates_kbps.size(); ++r) {
      try {
        const EncodeResult enc = encoder(denoised, grid.bitrates_kbps[r]);
        if (!enc.output_clip) throw SweepError("encoder returned no output clip");
        out[r] = {psnr(clean, *enc.output_clip), true};
      } catch (const std::exception&) {
        out[r].ok = false;
      }
    }
    return out;
  });

  for (size_t ti = 0; ti < tasks.size(); ++ti) {
    const Task& task = tasks[ti];
    for (size_t r = 0; r < grid.bitrates_kbps.size(); ++r) {
      const SweepKey key{grid.psnr_levels[task.level], grid.bitrates_kbps[r],
                         grid.strengths[task.strength]};
      if (!results[ti][r].ok) {
        if (std::find(result.holes.begin(), result.holes.end(), key) == result.holes.end())
          result.holes.push_back(key);
        continue;
      }
      // Clip-set mean, accumulated incrementally.
      auto [it, inserted] = result.cells.try_emplace(key, 0.0);
      it->second += results[ti][r].psnr / static_cast<double>(clean_clips.size());
      (void)inserted;
    }
  }
  for (const auto& hole : result.holes) result.cells.erase(hole);
  return result;
}

ArgmaxTable argmax_strengths(const SweepResult& sweep) {
  ArgmaxTable table;
  for (double level : sweep.grid.psnr_levels) {
    const double sigma = sigma_for_target_psnr(level);
    for (double rate : sweep.grid.bitrates_kbps) {
      double best_psnr = -1.0, best_strength = 0.0;
      bool hole = false;
      for (double s : sweep.grid.strengths) {
        const auto it = sweep.cells.find({level, rate, s});
        if (it == sweep.cells.end()) {
          hole = true;
          break;
        }
        if (it->second > best_psnr) {  // strict: ties keep the smaller strength
          best_psnr = it->second;
          best_strength = s;
        }
      }
      if (hole) {
        std::ostringstream warn;
        warn << "row (psnr=" << level << ", rate=" << rate << ") skipped: incomplete";
        table.warnings.push_back(warn.str());
        continue;
      }
      table.entries.push_back({sigma, rate, best_strength, best_psnr});
    }
  }
  return table;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

void write_sweep_csv(const SweepResult& sweep, std::ostream& out) {
  out << "# clipforge sweep schema_version=1\n";
  out << "sigma,psnr_level,bitrate_kbps,strength,final_psnr\n";
  for (const auto& [key, value] : sweep.cells) {
    out << fmt(sigma_for_target_psnr(key.psnr_level)) << "," << fmt(key.psnr_level) << ","
        << fmt(key.bitrate_kbps) << "," << fmt(key.strength) << "," << fmt(value) << "\n";
  }
}

SweepResult read_sweep_csv(std::istream& in) {
  SweepResult sweep;
  std::string line;
  std::vector<double> levels, rates, strengths;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("sigma", 0) == 0) continue;
    std::istringstream row(line);
    std::string f;
    std::vector<double> vals;
    while (std::getline(row, f, ',')) vals.push_back(std::stod(f));
    if (vals.size() != 5) throw SweepError("sweep csv: expected 5 columns");
    sweep.cells[{vals[1], vals[2], vals[3]}] = vals[4];
    levels.push_back(vals[1]);
    rates.push_back(vals[2]);
    strengths.push_back(vals[3]);
  }
  auto unique_sorted = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  unique_sorted(levels);
  unique_sorted(rates);
  unique_sorted(strengths);
  sweep.grid.psnr_levels = std::move(levels);
  sweep.grid.bitrates_kbps = std::move(rates);
  sweep.grid.strengths = std::move(strengths);
  return sweep;
}

}  // namespace clipforge

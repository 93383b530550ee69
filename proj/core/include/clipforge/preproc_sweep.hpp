#ifndef CLIPFORGE_PREPROC_SWEEP_HPP
#define CLIPFORGE_PREPROC_SWEEP_HPP

#include <functional>
#include <iosfwd>
#include <map>
#include <tuple>

#include "clipforge/codec.hpp"

namespace clipforge {

class ThreadPool;

struct SweepError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Axes of the degradation/bitrate/strength sweep. Degradation levels are
// target PSNRs in dB (mapped to sigma through sigma_for_target_psnr);
// strengths must start at 0 so the no-filter column always exists.
struct SweepGrid {
  std::vector<double> psnr_levels;
  std::vector<double> bitrates_kbps;
  std::vector<double> strengths;

  void validate(bool for_fitting = false) const;
  static SweepGrid default_grid();
};

struct SweepKey {
  double psnr_level;
  double bitrate_kbps;
  double strength;
  auto operator<=>(const SweepKey&) const = default;
};

// cells: mean final PSNR of the denoise+encode cascade output against the
// clean source, averaged over the clip set. Failed cells land in holes.
struct SweepResult {
  SweepGrid grid;
  std::map<SweepKey, double> cells;
  std::vector<SweepKey> holes;
  std::vector<std::string> clip_ids;

  bool complete() const { return holes.empty(); }
};

using BitrateEncoder = std::function<EncodeResult(const Clip&, double bitrate_kbps)>;

// For every (p, r, s): degrade each clean clip to PSNR p, denoise at s,
// encode at r, measure PSNR against the clean original; the cell is the
// clip-set mean. Noise draws are keyed on (seed, clip, p) only, so every
// strength/bitrate cell of one degradation level sees the same noisy input.
SweepResult run_sweep(const std::vector<Clip>& clean_clips, const BitrateEncoder& encoder,
                      const SweepGrid& grid, uint64_t seed, ThreadPool* pool = nullptr);

// Per (sigma, bitrate): the strength with the highest final PSNR; ties pick
// the smaller strength. Rows with holes are skipped with a warning entry.
struct ArgmaxEntry {
  double sigma;
  double bitrate_kbps;
  double best_strength;
  double best_psnr;
};
struct ArgmaxTable {
  std::vector<ArgmaxEntry> entries;
  std::vector<std::string> warnings;
};
ArgmaxTable argmax_strengths(const SweepResult& sweep);

// CSV: sigma, psnr_level, bitrate_kbps, strength, final_psnr.
void write_sweep_csv(const SweepResult& sweep, std::ostream& out);
SweepResult read_sweep_csv(std::istream& in);

}  // namespace clipforge

#endif  // CLIPFORGE_PREPROC_SWEEP_HPP

#ifndef CLIPFORGE_TIME_MODEL_HPP
#define CLIPFORGE_TIME_MODEL_HPP

#include <optional>

#include "clipforge/complexity.hpp"
#include "clipforge/trees.hpp"

namespace clipforge {

struct TimeModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TimeSample {
  ComplexityFeatures features;
  double measured_seconds = 0.0;
  std::string source_id;  // grouping key for generalised splits
};

enum class TargetTransform { kLinear, kLog };
const char* target_transform_name(TargetTransform t);
TargetTransform target_transform_from_name(const std::string& name);

// Gradient-boosted regression of encode seconds. The target transform is
// recorded in the model and applied symmetrically at train and predict.
struct TimeModel {
  GradientBoostRegressor ensemble;
  TargetTransform transform = TargetTransform::kLog;
  uint64_t schema = 0;
  uint64_t seed = 0;
  BoostParams params;

  std::string to_json() const;
  static TimeModel from_json(const std::string& text);
};

inline constexpr size_t kMinTimeSamples = 50;

TimeModel train_time_model(const std::vector<TimeSample>& samples, TargetTransform transform,
                           const BoostParams& params, uint64_t seed);

// Ensemble output, exponentiated for log models; always positive.
double predict_time(const TimeModel& model, const ComplexityFeatures& features);

enum class EvalSpace { kLinear, kLog, kLogToLinear };
const char* eval_space_name(EvalSpace s);

// R^2 = 1 - SSE/SST (absent on a zero-variance holdout); MAE% and sMAE%
// with the symmetric mean-of-magnitudes denominator. kLog scores the pair
// (ln y, ln y_hat); kLogToLinear inverts a log model and scores linear.
struct EvalReport {
  std::optional<double> r2;
  double mae_pct = 0.0;
  double smae_pct = 0.0;
  EvalSpace space = EvalSpace::kLinear;
};

EvalReport evaluate(const TimeModel& model, const std::vector<TimeSample>& holdout,
                    EvalSpace space);
EvalReport evaluate_pairs(const std::vector<double>& truth, const std::vector<double>& predicted,
                          EvalSpace space);

enum class SplitMode { kOverfit, kGeneralised };

// overfit: per-sample shuffle split. generalised: whole source_id groups on
// one side only. Deterministic under seed.
std::pair<std::vector<TimeSample>, std::vector<TimeSample>> split_dataset(
    const std::vector<TimeSample>& samples, SplitMode mode, double train_ratio, uint64_t seed);

// Training corpus CSV: feature columns + measured_seconds + source_id.
void write_time_samples_csv(const std::vector<TimeSample>& samples, std::ostream& out);
std::vector<TimeSample> read_time_samples_csv(std::istream& in);

}  // namespace clipforge

#endif  // CLIPFORGE_TIME_MODEL_HPP

#ifndef CLIPFORGE_BINNING_HPP
#define CLIPFORGE_BINNING_HPP

#include "clipforge/time_model.hpp"

namespace clipforge {

enum class BinMode { kLinear, kGeometric };
const char* bin_mode_name(BinMode m);

// n bins partitioning (0, inf) with n-1 interior edges. Geometric edges are
// t_min * (t_max/t_min)^(i/n), whose widths grow strictly, matching the
// heavy tail of encode durations.
struct BinScheme {
  std::vector<double> edges;
  BinMode mode = BinMode::kLinear;

  int bin_count() const { return static_cast<int>(edges.size()) + 1; }
  int bin_index(double t) const;
};

BinScheme make_bins(BinMode mode, int n, double t_min, double t_max);

// One-vs-rest logistic classifier on standardized complexity features,
// trained with plain full-batch gradient descent. Deterministic.
struct DurationClassifier {
  BinScheme bins;
  std::vector<double> feature_mean, feature_scale;
  std::vector<std::vector<double>> weights;  // per class: d weights + bias
  uint64_t schema = 0;

  int predict(const ComplexityFeatures& features) const;

  std::string to_json() const;
  static DurationClassifier from_json(const std::string& text);
};

struct ClassifierParams {
  int epochs = 300;
  double learning_rate = 0.1;
};

struct ClassifierReport {
  DurationClassifier classifier;
  std::vector<double> per_class_recall;  // NaN-free: empty classes excluded
  std::vector<int> class_support;
  double macro_recall = 0.0;
  std::vector<std::vector<int>> confusion;  // [truth][predicted]
  bool merged_empty_classes = false;
};

ClassifierReport train_duration_classifier(const std::vector<TimeSample>& samples,
                                           const BinScheme& bins, const ClassifierParams& params,
                                           uint64_t seed);

}  // namespace clipforge

#endif  // CLIPFORGE_BINNING_HPP

#include "clipforge/binning.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace clipforge {

const char* bin_mode_name(BinMode m) { return m == BinMode::kLinear ? "linear" : "geometric"; }

int BinScheme::bin_index(double t) const {
  int i = 0;
  for (double e : edges) {
    if (t <= e) break;
    ++i;
  }
  return i;
}

BinScheme make_bins(BinMode mode, int n, double t_min, double t_max) {
  if (n < 2) throw TimeModelError("make_bins: need at least 2 bins");
  if (!(t_min < t_max) || t_min < 0)
    throw TimeModelError("make_bins: need 0 <= t_min < t_max");
  if (mode == BinMode::kGeometric && !(t_min > 0))
    throw TimeModelError("make_bins: geometric bins need t_min > 0");

  BinScheme scheme;
  scheme.mode = mode;
  for (int i = 1; i < n; ++i) {
    if (mode == BinMode::kLinear)
      scheme.edges.push_back(t_min + (t_max - t_min) * i / n);
    else
      scheme.edges.push_back(t_min * std::pow(t_max / t_min, static_cast<double>(i) / n));
  }
  return scheme;
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace

int DurationClassifier::predict(const ComplexityFeatures& features) const {
  const auto raw = features.to_vector();
  std::vector<double> x(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) x[i] = (raw[i] - feature_mean[i]) / feature_scale[i];
  int best = 0;
  double best_score = -1e300;
  for (size_t c = 0; c < weights.size(); ++c) {
    double z = weights[c].back();
    for (size_t i = 0; i < x.size(); ++i) z += weights[c][i] * x[i];
    if (z > best_score) {
      best_score = z;
      best = static_cast<int>(c);
    }
  }
  return best;
}

ClassifierReport train_duration_classifier(const std::vector<TimeSample>& samples,
                                           const BinScheme& bins, const ClassifierParams& params,
                                           uint64_t seed) {
  (void)seed;  // training is closed-form deterministic; kept for interface parity
  if (samples.empty()) throw TimeModelError("train_duration_classifier: empty sample set");

  const int n_classes = bins.bin_count();
  std::vector<int> labels(samples.size());
  std::vector<int> support(static_cast<size_t>(n_classes), 0);
  for (size_t i = 0; i < samples.size(); ++i) {
    labels[i] = bins.bin_index(samples[i].measured_seconds);
    ++support[static_cast<size_t>(labels[i])];
  }
  const int populated =
      static_cast<int>(std::count_if(support.begin(), support.end(), [](int s) { return s > 0; }));
  if (populated < 2)
    throw TimeModelError("train_duration_classifier: all durations fall into one bin");

  const size_t d = ComplexityFeatures::feature_names().size();
  std::vector<std::vector<double>> x(samples.size());
  std::vector<double> mean(d, 0.0), scale(d, 0.0);
  for (size_t i = 0; i < samples.size(); ++i) {
    x[i] = samples[i].features.to_vector();
    for (size_t j = 0; j < d; ++j) mean[j] += x[i][j];
  }
  for (auto& m : mean) m /= static_cast<double>(samples.size());
  for (size_t i = 0; i < samples.size(); ++i)
    for (size_t j = 0; j < d; ++j) scale[j] += (x[i][j] - mean[j]) * (x[i][j] - mean[j]);
  for (auto& s : scale) {
    s = std::sqrt(s / static_cast<double>(samples.size()));
    if (s < 1e-12) s = 1.0;
  }
  for (size_t i = 0; i < samples.size(); ++i)
    for (size_t j = 0; j < d; ++j) x[i][j] = (x[i][j] - mean[j]) / scale[j];

  ClassifierReport report;
  report.merged_empty_classes =
      std::any_of(support.begin(), support.end(), [](int s) { return s == 0; });
  report.class_support = support;
  report.classifier.bins = bins;
  report.classifier.feature_mean = mean;
  report.classifier.feature_scale = scale;
  report.classifier.schema = ComplexityFeatures::schema_hash();
  report.classifier.weights.assign(static_cast<size_t>(n_classes),
                                   std::vector<double>(d + 1, 0.0));

  const double n_inv = 1.0 / static_cast<double>(samples.size());
  for (int c = 0; c < n_classes; ++c) {
    auto& w = report.classifier.weights[static_cast<size_t>(c)];
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
      std::vector<double> grad(d + 1, 0.0);
      for (size_t i = 0; i < samples.size(); ++i) {
        double z = w.back();
        for (size_t j = 0; j < d; ++j) z += w[j] * x[i][j];
        const double err = sigmoid(z) - (labels[i] == c ? 1.0 : 0.0);
        for (size_t j = 0; j < d; ++j) grad[j] += err * x[i][j];
        grad[d] += err;
      }
      for (size_t j = 0; j <= d; ++j) w[j] -= params.learning_rate * grad[j] * n_inv;
    }
  }

  report.confusion.assign(static_cast<size_t>(n_classes),
                          std::vector<int>(static_cast<size_t>(n_classes), 0));
  for (size_t i = 0; i < samples.size(); ++i) {
    const int pred = report.classifier.predict(samples[i].features);
    ++report.confusion[static_cast<size_t>(labels[i])][static_cast<size_t>(pred)];
  }
  double recall_sum = 0.0;
  int classes_with_support = 0;
  for (int c = 0; c < n_classes; ++c) {
    if (support[static_cast<size_t>(c)] == 0) continue;
    const double recall =
        static_cast<double>(report.confusion[static_cast<size_t>(c)][static_cast<size_t>(c)]) /
        static_cast<double>(support[static_cast<size_t>(c)]);
    report.per_class_recall.push_back(recall);
    recall_sum += recall;
    ++classes_with_support;
  }
  report.macro_recall = recall_sum / static_cast<double>(classes_with_support);
  return report;
}

std::string DurationClassifier::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = "duration_classifier";
  j["feature_schema_hash"] = schema;
  j["bin_mode"] = bin_mode_name(bins.mode);
  j["bin_edges"] = bins.edges;
  j["feature_mean"] = feature_mean;
  j["feature_scale"] = feature_scale;
  j["weights"] = weights;
  return j.dump();
}

DurationClassifier DurationClassifier::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  DurationClassifier c;
  c.schema = j.at("feature_schema_hash").get<uint64_t>();
  c.bins.mode = j.at("bin_mode").get<std::string>() == "linear" ? BinMode::kLinear
                                                                : BinMode::kGeometric;
  c.bins.edges = j.at("bin_edges").get<std::vector<double>>();
  c.feature_mean = j.at("feature_mean").get<std::vector<double>>();
  c.feature_scale = j.at("feature_scale").get<std::vector<double>>();
  c.weights = j.at("weights").get<std::vector<std::vector<double>>>();
  return c;
}

}  // namespace clipforge

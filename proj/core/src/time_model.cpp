#include "clipforge/time_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "clipforge/rng.hpp"

namespace clipforge {

const char* target_transform_name(TargetTransform t) {
  return t == TargetTransform::kLinear ? "linear" : "log";
}

TargetTransform target_transform_from_name(const std::string& name) {
  if (name == "linear") return TargetTransform::kLinear;
  if (name == "log") return TargetTransform::kLog;
  throw TimeModelError("unknown target transform '" + name + "'");
}

const char* eval_space_name(EvalSpace s) {
  switch (s) {
    case EvalSpace::kLinear: return "linear";
    case EvalSpace::kLog: return "log";
    case EvalSpace::kLogToLinear: return "log_to_linear";
  }
  return "?";
}

TimeModel train_time_model(const std::vector<TimeSample>& samples, TargetTransform transform,
                           const BoostParams& params, uint64_t seed) {
  if (samples.size() < kMinTimeSamples)
    throw TimeModelError("train_time_model: needs at least " + std::to_string(kMinTimeSamples) +
                         " samples, got " + std::to_string(samples.size()));
  FeatureMatrix x;
  std::vector<double> y;
  x.reserve(samples.size());
  for (const auto& s : samples) {
    if (!(s.measured_seconds > 0))
      throw TimeModelError("train_time_model: non-positive duration for source '" +
                           s.source_id + "'");
    x.push_back(s.features.to_vector());
    y.push_back(transform == TargetTransform::kLog ? std::log(s.measured_seconds)
                                                   : s.measured_seconds);
  }
  TimeModel model;
  model.transform = transform;
  model.schema = ComplexityFeatures::schema_hash();
  model.seed = seed;
  model.params = params;
  model.ensemble.fit(x, y, params, seed);
  return model;
}

double predict_time(const TimeModel& model, const ComplexityFeatures& features) {
  if (model.schema != ComplexityFeatures::schema_hash())
    throw TimeModelError("predict_time: feature schema mismatch");
  const double raw = model.ensemble.predict(features.to_vector());
  if (model.transform == TargetTransform::kLog) return std::exp(raw);
  return std::max(raw, 1e-9);
}

EvalReport evaluate_pairs(const std::vector<double>& truth, const std::vector<double>& predicted,
                          EvalSpace space) {
  if (truth.empty() || truth.size() != predicted.size())
    throw TimeModelError("evaluate: empty or mismatched holdout");
  EvalReport rep;
  rep.space = space;

  std::vector<double> y(truth), yh(predicted);
  if (space == EvalSpace::kLog) {
    for (auto& v : y) v = std::log(v);
    for (auto& v : yh) v = std::log(v);
  }

  const double r2 = r_squared(y, yh);
  if (!std::isnan(r2)) rep.r2 = r2;

  double mae = 0.0, smae = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    const double err = std::abs(yh[i] - y[i]);
    mae += err / std::abs(y[i]);
    smae += err / (0.5 * (std::abs(y[i]) + std::abs(yh[i])));
  }
  rep.mae_pct = 100.0 * mae / static_cast<double>(y.size());
  rep.smae_pct = 100.0 * smae / static_cast<double>(y.size());
  return rep;
}

EvalReport evaluate(const TimeModel& model, const std::vector<TimeSample>& holdout,
                    EvalSpace space) {
  if (holdout.empty()) throw TimeModelError("evaluate: empty holdout");
  if (space == EvalSpace::kLog && model.transform != TargetTransform::kLog)
    throw TimeModelError("evaluate: log-space scoring needs a log model");
  if (space == EvalSpace::kLogToLinear && model.transform != TargetTransform::kLog)
    throw TimeModelError("evaluate: log_to_linear needs a log model");

  std::vector<double> truth, predicted;
  truth.reserve(holdout.size());
  for (const auto& s : holdout) {
    truth.push_back(s.measured_seconds);
    predicted.push_back(predict_time(model, s.features));
  }
  // kLogToLinear: prediction already inverted by predict_time; score linear.
  return evaluate_pairs(truth, predicted,
                        space == EvalSpace::kLogToLinear ? EvalSpace::kLinear : space);
}

std::pair<std::vector<TimeSample>, std::vector<TimeSample>> split_dataset(
    const std::vector<TimeSample>& samples, SplitMode mode, double train_ratio, uint64_t seed) {
  if (samples.empty()) throw TimeModelError("split_dataset: empty sample set");
  if (!(train_ratio > 0.0 && train_ratio < 1.0))
    throw TimeModelError("split_dataset: ratio must be in (0, 1)");

  SplitMix64 rng(seed);
  std::vector<TimeSample> train, test;

  if (mode == SplitMode::kOverfit) {
    std::vector<size_t> idx(samples.size());
    std::iota(idx.begin(), idx.end(), 0);
    for (size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.next_below(i)]);
    const size_t n_train = std::max<size_t>(
        1, std::min(samples.size() - 1,
                    static_cast<size_t>(std::lround(train_ratio * samples.size()))));
    for (size_t i = 0; i < idx.size(); ++i)
      (i < n_train ? train : test).push_back(samples[idx[i]]);
    return {train, test};
  }

  std::vector<std::string> sources;
  for (const auto& s : samples)
    if (std::find(sources.begin(), sources.end(), s.source_id) == sources.end())
      sources.push_back(s.source_id);
  if (sources.size() < 2)
    throw TimeModelError("split_dataset: generalised split needs >= 2 distinct sources");
  std::sort(sources.begin(), sources.end());
  for (size_t i = sources.size(); i > 1; --i) std::swap(sources[i - 1], sources[rng.next_below(i)]);

  // Fill train with whole sources until the sample ratio is reached, always
  // leaving at least one source for the test side.
  std::vector<std::string> train_sources;
  size_t train_count = 0;
  const auto target = static_cast<size_t>(std::lround(train_ratio * samples.size()));
  for (const auto& src : sources) {
    if (train_sources.size() + 1 >= sources.size()) break;
    if (train_count >= target && !train_sources.empty()) break;
    train_sources.push_back(src);
    for (const auto& s : samples)
      if (s.source_id == src) ++train_count;
  }
  for (const auto& s : samples) {
    const bool in_train = std::find(train_sources.begin(), train_sources.end(), s.source_id) !=
                          train_sources.end();
    (in_train ? train : test).push_back(s);
  }
  return {train, test};
}

// ---------------------------------------------------------------------------
// Corpus CSV

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

void write_time_samples_csv(const std::vector<TimeSample>& samples, std::ostream& out) {
  out << "# clipforge time_corpus schema_version=1\n";
  for (size_t i = 0; i < ComplexityFeatures::feature_names().size(); ++i)
    out << ComplexityFeatures::feature_names()[i] << ",";
  out << "measured_seconds,source_id\n";
  for (const auto& s : samples) {
    for (double v : s.features.to_vector()) out << fmt(v) << ",";
    out << fmt(s.measured_seconds) << "," << s.source_id << "\n";
  }
}

std::vector<TimeSample> read_time_samples_csv(std::istream& in) {
  std::vector<TimeSample> samples;
  std::string line;
  const size_t n_features = ComplexityFeatures::feature_names().size();
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("height,", 0) == 0) continue;
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != n_features + 2)
      throw TimeModelError("time corpus csv: expected " + std::to_string(n_features + 2) +
                           " columns, got " + std::to_string(fields.size()));
    TimeSample s;
    std::vector<double> v(n_features);
    for (size_t i = 0; i < n_features; ++i) v[i] = std::stod(fields[i]);
    s.features = ComplexityFeatures::from_vector(v);
    s.measured_seconds = std::stod(fields[n_features]);
    s.source_id = fields[n_features + 1];
    samples.push_back(std::move(s));
  }
  return samples;
}

std::string TimeModel::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = "time_model";
  j["transform"] = target_transform_name(transform);
  j["feature_schema_hash"] = schema;
  j["seed"] = seed;
  j["params"] = {{"n_rounds", params.n_rounds},
                 {"max_depth", params.tree.max_depth},
                 {"learning_rate", params.learning_rate},
                 {"subsample", params.subsample}};
  j["ensemble"] = ensemble.to_json();
  return j.dump();
}

TimeModel TimeModel::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  TimeModel m;
  m.transform = target_transform_from_name(j.at("transform").get<std::string>());
  m.schema = j.at("feature_schema_hash").get<uint64_t>();
  m.seed = j.value("seed", 0ULL);
  if (j.contains("params")) {
    m.params.n_rounds = j["params"].value("n_rounds", 200);
    m.params.tree.max_depth = j["params"].value("max_depth", 6);
    m.params.learning_rate = j["params"].value("learning_rate", 0.1);
    m.params.subsample = j["params"].value("subsample", 0.8);
  }
  m.ensemble = GradientBoostRegressor::from_json(j.at("ensemble"));
  return m;
}

}  // namespace clipforge

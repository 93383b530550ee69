#include "clipforge/k_features.hpp"

#include <cmath>

#include "clipforge/rng.hpp"

namespace clipforge {

const std::vector<std::string>& KFeatureVector::feature_names() {
  static const std::vector<std::string> names = {
      "width", "height", "bitrate_kbps",
      "msssim_i_y", "msssim_i_u", "msssim_i_v",
      "msssim_p_y", "msssim_p_u", "msssim_p_v",
      "msssim_b_y", "msssim_b_u", "msssim_b_v",
      "p_count", "b_count", "p_avg_qp", "b_avg_qp",
      "p_bitrate_kbps", "b_bitrate_kbps",
      "pb_ratio_y", "pb_ratio_u", "pb_ratio_v",
      "pb_count_ratio", "pb_size_ratio",
      "bitrate_x_pb_ratio_y", "bitrate_x_pb_ratio_u", "bitrate_x_pb_ratio_v",
      "bitrate_x_pb_count", "bitrate_x_pb_size",
      "pb_ratio_y_x_pb_size", "pb_ratio_u_x_pb_size", "pb_ratio_v_x_pb_size",
      "pb_count_x_pb_size",
      "pb_ratio_y_x_pb_ratio_u", "pb_ratio_y_x_pb_ratio_v", "pb_ratio_u_x_pb_ratio_v",
  };
  return names;
}

uint64_t KFeatureVector::schema_hash() {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& n : feature_names()) h = fnv1a64(n.data(), n.size(), h);
  return h;
}

std::vector<double> KFeatureVector::to_vector() const {
  return {width, height, bitrate_kbps,
          msssim_i_y, msssim_i_u, msssim_i_v,
          msssim_p_y, msssim_p_u, msssim_p_v,
          msssim_b_y, msssim_b_u, msssim_b_v,
          p_count, b_count, p_avg_qp, b_avg_qp,
          p_bitrate_kbps, b_bitrate_kbps,
          pb_ratio_y, pb_ratio_u, pb_ratio_v,
          pb_count_ratio, pb_size_ratio,
          bitrate_x_pb_ratio_y, bitrate_x_pb_ratio_u, bitrate_x_pb_ratio_v,
          bitrate_x_pb_count, bitrate_x_pb_size,
          pb_ratio_y_x_pb_size, pb_ratio_u_x_pb_size, pb_ratio_v_x_pb_size,
          pb_count_x_pb_size,
          pb_ratio_y_x_pb_ratio_u, pb_ratio_y_x_pb_ratio_v, pb_ratio_u_x_pb_ratio_v};
}

void KFeatureVector::validate() const {
  auto ensure = [](bool ok, const char* what) {
    if (!ok) throw std::runtime_error(std::string("k features: ") + what);
  };
  ensure(p_count >= 0 && b_count >= 0, "counts must be non-negative");
  for (double v : to_vector()) ensure(std::isfinite(v), "all fields must be finite");
  auto product_eq = [&](double field, double a, double b, const char* what) {
    ensure(std::abs(field - a * b) <= 1e-9 * std::max(1.0, std::abs(a * b)), what);
  };
  product_eq(bitrate_x_pb_ratio_y, bitrate_kbps, pb_ratio_y, "bitrate_x_pb_ratio_y mismatch");
  product_eq(bitrate_x_pb_ratio_u, bitrate_kbps, pb_ratio_u, "bitrate_x_pb_ratio_u mismatch");
  product_eq(bitrate_x_pb_ratio_v, bitrate_kbps, pb_ratio_v, "bitrate_x_pb_ratio_v mismatch");
  product_eq(bitrate_x_pb_count, bitrate_kbps, pb_count_ratio, "bitrate_x_pb_count mismatch");
  product_eq(bitrate_x_pb_size, bitrate_kbps, pb_size_ratio, "bitrate_x_pb_size mismatch");
  product_eq(pb_ratio_y_x_pb_size, pb_ratio_y, pb_size_ratio, "pb_ratio_y_x_pb_size mismatch");
  product_eq(pb_ratio_u_x_pb_size, pb_ratio_u, pb_size_ratio, "pb_ratio_u_x_pb_size mismatch");
  product_eq(pb_ratio_v_x_pb_size, pb_ratio_v, pb_size_ratio, "pb_ratio_v_x_pb_size mismatch");
  product_eq(pb_count_x_pb_size, pb_count_ratio, pb_size_ratio, "pb_count_x_pb_size mismatch");
  product_eq(pb_ratio_y_x_pb_ratio_u, pb_ratio_y, pb_ratio_u, "pb_ratio_y_x_pb_ratio_u mismatch");
  product_eq(pb_ratio_y_x_pb_ratio_v, pb_ratio_y, pb_ratio_v, "pb_ratio_y_x_pb_ratio_v mismatch");
  product_eq(pb_ratio_u_x_pb_ratio_v, pb_ratio_u, pb_ratio_v, "pb_ratio_u_x_pb_ratio_v mismatch");
}

namespace {

struct TypeAggregate {
  double count = 0, bits = 0, qp_sum = 0, qy_sum = 0, qu_sum = 0, qv_sum = 0;

  double mean_qp() const { return count > 0 ? qp_sum / count : 0.0; }
  double mean_qy() const { return count > 0 ? qy_sum / count : 0.0; }
  double mean_qu() const { return count > 0 ? qu_sum / count : 0.0; }
  double mean_qv() const { return count > 0 ? qv_sum / count : 0.0; }
};

int group_of(const std::string& type) {
  if (type == "I" || type == "KF") return 0;
  if (type == "P" || type == "GF") return 1;
  return 2;  // B, ARF
}

}  // namespace

KFeatureVector extract_k_features(const std::vector<FrameStats>& stats, const ClipMeta& meta) {
  if (stats.empty()) throw std::invalid_argument("extract_k_features: no per-frame stats");
  if (meta.n_frames == 0 || meta.fps <= 0)
    throw std::invalid_argument("extract_k_features: invalid clip meta");

  TypeAggregate agg[3];
  double total_bits = 0;
  for (const auto& s : stats) {
    TypeAggregate& a = agg[group_of(s.frame_type)];
    a.count += 1;
    a.bits += static_cast<double>(s.bits);
    a.qp_sum += s.avg_qp;
    a.qy_sum += s.q_y;
    a.qu_sum += s.q_u;
    a.qv_sum += s.q_v;
    total_bits += static_cast<double>(s.bits);
  }

  const double duration_s = static_cast<double>(meta.n_frames) / meta.fps;
  auto type_bitrate = [&](const TypeAggregate& a) { return a.bits / duration_s / 1000.0; };

  KFeatureVector f;
  f.width = meta.width;
  f.height = meta.height;
  f.bitrate_kbps = total_bits / duration_s / 1000.0;
  f.msssim_i_y = agg[0].mean_qy();
  f.msssim_i_u = agg[0].mean_qu();
  f.msssim_i_v = agg[0].mean_qv();
  f.msssim_p_y = agg[1].mean_qy();
  f.msssim_p_u = agg[1].mean_qu();
  f.msssim_p_v = agg[1].mean_qv();
  f.msssim_b_y = agg[2].mean_qy();
  f.msssim_b_u = agg[2].mean_qu();
  f.msssim_b_v = agg[2].mean_qv();
  f.p_count = agg[1].count;
  f.b_count = agg[2].count;
  f.p_avg_qp = agg[1].mean_qp();
  f.b_avg_qp = agg[2].mean_qp();
  f.p_bitrate_kbps = type_bitrate(agg[1]);
  f.b_bitrate_kbps = type_bitrate(agg[2]);

  f.missing_frame_types = agg[1].count == 0 || agg[2].count == 0;
  if (!f.missing_frame_types) {
    f.pb_ratio_y = agg[2].mean_qy() != 0 ? agg[1].mean_qy() / agg[2].mean_qy() : 0.0;
    f.pb_ratio_u = agg[2].mean_qu() != 0 ? agg[1].mean_qu() / agg[2].mean_qu() : 0.0;
    f.pb_ratio_v = agg[2].mean_qv() != 0 ? agg[1].mean_qv() / agg[2].mean_qv() : 0.0;
    f.pb_count_ratio = agg[1].count / agg[2].count;
    f.pb_size_ratio = agg[2].bits != 0 ? agg[1].bits / agg[2].bits : 0.0;
  }

  f.bitrate_x_pb_ratio_y = f.bitrate_kbps * f.pb_ratio_y;
  f.bitrate_x_pb_ratio_u = f.bitrate_kbps * f.pb_ratio_u;
  f.bitrate_x_pb_ratio_v = f.bitrate_kbps * f.pb_ratio_v;
  f.bitrate_x_pb_count = f.bitrate_kbps * f.pb_count_ratio;
  f.bitrate_x_pb_size = f.bitrate_kbps * f.pb_size_ratio;
  f.pb_ratio_y_x_pb_size = f.pb_ratio_y * f.pb_size_ratio;
  f.pb_ratio_u_x_pb_size = f.pb_ratio_u * f.pb_size_ratio;
  f.pb_ratio_v_x_pb_size = f.pb_ratio_v * f.pb_size_ratio;
  f.pb_count_x_pb_size = f.pb_count_ratio * f.pb_size_ratio;
  f.pb_ratio_y_x_pb_ratio_u = f.pb_ratio_y * f.pb_ratio_u;
  f.pb_ratio_y_x_pb_ratio_v = f.pb_ratio_y * f.pb_ratio_v;
  f.pb_ratio_u_x_pb_ratio_v = f.pb_ratio_u * f.pb_ratio_v;
  return f;
}

KPredictor train_k_predictor(const std::vector<std::pair<KFeatureVector, double>>& dataset,
                             const ForestParams& params, uint64_t seed) {
  if (dataset.size() < 20)
    throw std::invalid_argument("train_k_predictor: needs at least 20 samples");
  FeatureMatrix x;
  std::vector<double> y;
  x.reserve(dataset.size());
  for (const auto& [features, k] : dataset) {
    x.push_back(features.to_vector());
    y.push_back(k);
  }
  KPredictor model;
  model.schema = KFeatureVector::schema_hash();
  model.seed = seed;
  model.constant_target = std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
  model.constant_value = y[0];
  model.forest.fit(x, y, params, seed);
  return model;
}

double predict_k(const KPredictor& model, const KFeatureVector& features, double k_min,
                 double k_max) {
  if (model.schema != KFeatureVector::schema_hash())
    throw std::runtime_error("predict_k: feature schema mismatch");
  const double raw = model.forest.predict(features.to_vector());
  return std::min(std::max(raw, k_min), k_max);
}

std::string KPredictor::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = "k_predictor";
  j["feature_schema_hash"] = schema;
  j["seed"] = seed;
  j["constant_target"] = constant_target;
  j["constant_value"] = constant_value;
  j["forest"] = forest.to_json();
  return j.dump();
}

KPredictor KPredictor::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  KPredictor m;
  m.schema = j.at("feature_schema_hash").get<uint64_t>();
  m.seed = j.value("seed", 0ULL);
  m.constant_target = j.value("constant_target", false);
  m.constant_value = j.value("constant_value", 1.0);
  m.forest = RandomForestRegressor::from_json(j.at("forest"));
  return m;
}

}  // namespace clipforge

#include "clipforge/rd_curve.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace clipforge {

const char* quality_metric_name(QualityMetric m) {
  return m == QualityMetric::kPsnr ? "PSNR" : "MS-SSIM";
}

QualityMetric quality_metric_from_name(const std::string& name) {
  if (name == "PSNR" || name == "psnr") return QualityMetric::kPsnr;
  if (name == "MS-SSIM" || name == "ms-ssim" || name == "MSSSIM" || name == "ms_ssim")
    return QualityMetric::kMsSsim;
  throw CurveError("unknown quality metric tag '" + name + "'");
}

RDCurve::RDCurve(std::vector<RDPoint> points, QualityMetric metric)
    : points_(std::move(points)), metric_(metric) {
  if (points_.size() < kMinCurvePoints)
    throw CurveError("RD curve needs at least " + std::to_string(kMinCurvePoints) + " points, got " +
                     std::to_string(points_.size()));
  for (size_t i = 0; i < points_.size(); ++i) {
    if (!(points_[i].rate_kbps > 0.0))
      throw CurveError("RD point " + std::to_string(i) + ": rate must be positive");
    if (!std::isfinite(points_[i].quality))
      throw CurveError("RD point " + std::to_string(i) + ": quality must be finite");
  }
  for (size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i].rate_kbps > points_[i - 1].rate_kbps))
      throw CurveError("RD curve: rates must be strictly increasing");
    if (points_[i].quality < points_[i - 1].quality)
      throw CurveError("RD curve: quality decreases with rate at point " + std::to_string(i));
  }
}

RDCurve build_rd_curve(std::vector<RDPoint> samples, QualityMetric metric) {
  if (samples.size() < kMinCurvePoints)
    throw CurveError("build_rd_curve: needs at least " + std::to_string(kMinCurvePoints) +
                     " samples, got " + std::to_string(samples.size()));
  std::sort(samples.begin(), samples.end(),
            [](const RDPoint& a, const RDPoint& b) { return a.rate_kbps < b.rate_kbps; });
  for (size_t i = 1; i < samples.size(); ++i)
    if (samples[i].rate_kbps == samples[i - 1].rate_kbps)
      throw CurveError("build_rd_curve: duplicate rate " + std::to_string(samples[i].rate_kbps));

  // Tiny quality inversions are measurement jitter: average the pair.
  bool changed = true;
  size_t guard = samples.size() * samples.size() + 4;
  while (changed && guard-- > 0) {
    changed = false;
    for (size_t i = 1; i < samples.size(); ++i) {
      if (samples[i].quality < samples[i - 1].quality) {
        const double gap = samples[i - 1].quality - samples[i].quality;
        if (gap > kMonotonizeTolerance)
          throw CurveError("build_rd_curve: quality inversion of " + std::to_string(gap) +
                           " exceeds monotonize tolerance");
        const double avg = 0.5 * (samples[i - 1].quality + samples[i].quality);
        samples[i - 1].quality = avg;
        samples[i].quality = avg;
        changed = true;
      }
    }
  }
  return RDCurve(std::move(samples), metric);
}

// ---------------------------------------------------------------------------
// BD-rate

namespace {

// ln(rate) as a monotone piecewise-cubic (Fritsch-Carlson slopes) of quality.
struct LogRateSpline {
  std::vector<double> q;  // strictly increasing knots
  std::vector<double> v;  // ln(rate) at knots
  std::vector<double> m;  // endpoint-adjusted slopes

  explicit LogRateSpline(const RDCurve& c) {
    // Collapse duplicate-quality knots (a monotonized pair) into one.
    for (const auto& p : c.points()) {
      const double lr = std::log(p.rate_kbps);
      if (!q.empty() && p.quality == q.back()) {
        v.back() = 0.5 * (v.back() + lr);
      } else {
        q.push_back(p.quality);
        v.push_back(lr);
      }
    }
    if (q.size() < 2)
      throw CurveError("bd_rate: curve degenerates to a single quality value");
    const size_t n = q.size();
    std::vector<double> h(n - 1), d(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) {
      h[i] = q[i + 1] - q[i];
      d[i] = (v[i + 1] - v[i]) / h[i];
    }
    m.assign(n, 0.0);
    if (n == 2) {
      m[0] = m[1] = d[0];
    } else {
      m[0] = edge_slope(h[0], h[1], d[0], d[1]);
      m[n - 1] = edge_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
      for (size_t i = 1; i + 1 < n; ++i) {
        if (d[i - 1] == 0.0 || d[i] == 0.0 || (d[i - 1] > 0) != (d[i] > 0)) {
          m[i] = 0.0;
        } else {
          const double w1 = 2.0 * h[i] + h[i - 1];
          const double w2 = h[i] + 2.0 * h[i - 1];
          m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
      }
    }
  }

  static double edge_slope(double h0, double h1, double d0, double d1) {
    double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (s * d0 <= 0.0) return 0.0;
    if ((d0 > 0) != (d1 > 0) && std::abs(s) > 3.0 * std::abs(d0)) return 3.0 * d0;
    return s;
  }

  // Exact integral over [a, b] within the knot range.
  double integrate(double a, double b) const {
    double total = 0.0;
    for (size_t i = 0; i + 1 < q.size(); ++i) {
      const double lo = std::max(a, q[i]);
      const double hi = std::min(b, q[i + 1]);
      if (hi <= lo) continue;
      const double h = q[i + 1] - q[i];
      const double t0 = (lo - q[i]) / h;
      const double t1 = (hi - q[i]) / h;
      total += h * (v[i] * (i00(t1) - i00(t0)) + h * m[i] * (i10(t1) - i10(t0)) +
                    v[i + 1] * (i01(t1) - i01(t0)) + h * m[i + 1] * (i11(t1) - i11(t0)));
    }
    return total;
  }

  // Antiderivatives of the cubic Hermite basis on [0, 1].
  static double i00(double t) { return ((0.5 * t - 1.0) * t * t + 1.0) * t; }
  static double i10(double t) { return (((0.25 * t - 2.0 / 3.0) * t + 0.5) * t) * t; }
  static double i01(double t) { return (1.0 - 0.5 * t) * t * t * t; }
  static double i11(double t) { return ((0.25 * t - 1.0 / 3.0) * t) * t * t; }
};

}  // namespace

double bd_rate(const RDCurve& test, const RDCurve& reference) {
  if (test.metric() != reference.metric())
    throw CurveError("bd_rate: curves carry different quality metrics");
  const double lo = std::max(test.min_quality(), reference.min_quality());
  const double hi = std::min(test.max_quality(), reference.max_quality());
  if (!(hi > lo)) throw CurveError("bd_rate: no overlapping quality interval");

  const LogRateSpline st(test), sr(reference);
  const double mean_diff = (st.integrate(lo, hi) - sr.integrate(lo, hi)) / (hi - lo);
  return 100.0 * (std::exp(mean_diff) - 1.0);
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

void write_rd_curve_csv(const RDCurve& curve, std::ostream& out) {
  out << "# clipforge rd_curve schema_version=1 metric=" << quality_metric_name(curve.metric())
      << "\n";
  out << "rate_kbps,quality\n";
  for (const auto& p : curve.points())
    out << format_double(p.rate_kbps) << "," << format_double(p.quality) << "\n";
}

RDCurve read_rd_curve_csv(std::istream& in, const std::string& name) {
  std::string line;
  QualityMetric metric = QualityMetric::kPsnr;
  std::vector<RDPoint> points;
  size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("metric=");
      if (pos != std::string::npos) {
        std::string tag = line.substr(pos + 7);
        if (const auto sp = tag.find(' '); sp != std::string::npos) tag.resize(sp);
        metric = quality_metric_from_name(tag);
      }
      continue;
    }
    if (line.rfind("rate_kbps", 0) == 0) continue;
    std::istringstream row_stream(line);
    std::string rate_str, quality_str;
    if (!std::getline(row_stream, rate_str, ',') || !std::getline(row_stream, quality_str))
      throw CurveError(name + ": row " + std::to_string(row) + ": expected 'rate,quality'");
    try {
      points.push_back({std::stod(rate_str), std::stod(quality_str)});
    } catch (const std::exception&) {
      throw CurveError(name + ": row " + std::to_string(row) + ": non-numeric value");
    }
  }
  try {
    return build_rd_curve(std::move(points), metric);
  } catch (const CurveError& e) {
    throw CurveError(name + ": " + e.what());
  }
}

RDCurve read_rd_curve_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CurveError("cannot open curve file '" + path + "'");
  return read_rd_curve_csv(in, path);
}

void write_rd_curve_csv_file(const RDCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CurveError("cannot create curve file '" + path + "'");
  write_rd_curve_csv(curve, out);
}

std::string rd_curve_to_json(const RDCurve& curve) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["metric"] = quality_metric_name(curve.metric());
  auto& pts = j["points"] = nlohmann::json::array();
  for (const auto& p : curve.points())
    pts.push_back({{"rate_kbps", p.rate_kbps}, {"quality", p.quality}});
  return j.dump(2);
}

RDCurve rd_curve_from_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  std::vector<RDPoint> points;
  for (const auto& p : j.at("points"))
    points.push_back({p.at("rate_kbps").get<double>(), p.at("quality").get<double>()});
  return build_rd_curve(std::move(points),
                        quality_metric_from_name(j.at("metric").get<std::string>()));
}

}  // namespace clipforge

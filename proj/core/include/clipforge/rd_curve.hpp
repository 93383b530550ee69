#ifndef CLIPFORGE_RD_CURVE_HPP
#define CLIPFORGE_RD_CURVE_HPP

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace clipforge {

struct CurveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class QualityMetric { kPsnr, kMsSsim };

const char* quality_metric_name(QualityMetric m);
QualityMetric quality_metric_from_name(const std::string& name);

struct RDPoint {
  double rate_kbps = 0.0;
  double quality = 0.0;
};

// Validated RD characteristic of one encode configuration: >= 4 points,
// strictly increasing in rate, quality non-decreasing with rate.
class RDCurve {
 public:
  RDCurve(std::vector<RDPoint> points, QualityMetric metric);

  const std::vector<RDPoint>& points() const { return points_; }
  QualityMetric metric() const { return metric_; }

  double min_quality() const { return points_.front().quality; }
  double max_quality() const { return points_.back().quality; }

 private:
  std::vector<RDPoint> points_;
  QualityMetric metric_;
};

inline constexpr size_t kMinCurvePoints = 4;

// Maximum quality inversion (in quality units) repaired by averaging the
// offending pair; anything larger is a hard error.
inline constexpr double kMonotonizeTolerance = 0.05;

// Sorts, validates and (within tolerance) monotonizes raw samples.
RDCurve build_rd_curve(std::vector<RDPoint> samples, QualityMetric metric);

// Bjontegaard delta rate of `test` against `reference` in percent: the mean
// log-rate gap over the shared quality interval, mapped through
// 100*(exp(mean) - 1). Monotone piecewise-cubic (PCHIP) interpolation of
// ln(rate) as a function of quality, integrated exactly per segment.
// Negative result = test needs fewer bits at equal quality.
double bd_rate(const RDCurve& test, const RDCurve& reference);

// CSV: "# clipforge rd_curve schema_version=1 metric=<tag>" comment line +
// "rate_kbps,quality" header. JSON carries the same fields.
void write_rd_curve_csv(const RDCurve& curve, std::ostream& out);
RDCurve read_rd_curve_csv(std::istream& in, const std::string& name = "<stream>");
RDCurve read_rd_curve_csv_file(const std::string& path);
void write_rd_curve_csv_file(const RDCurve& curve, const std::string& path);

std::string rd_curve_to_json(const RDCurve& curve);
RDCurve rd_curve_from_json(const std::string& json_text);

}  // namespace clipforge

#endif  // CLIPFORGE_RD_CURVE_HPP

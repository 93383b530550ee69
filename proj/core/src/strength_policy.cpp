#include "clipforge/strength_policy.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Dense>

#include "json.hpp"

namespace clipforge {

namespace {

// Normalized to [-1, 1] on the fitted range; degenerate ranges pin to 0.
double normalize(double v, double lo, double hi) {
  if (hi <= lo) return 0.0;
  return 2.0 * (v - lo) / (hi - lo) - 1.0;
}

void design_row(double nx, double ny, double* row) {
  int c = 0;
  for (int i = 0; i <= StrengthPolicy::kDegree; ++i)
    for (int j = 0; i + j <= StrengthPolicy::kDegree; ++j)
      row[c++] = std::pow(nx, i) * std::pow(ny, j);
}

}  // namespace

StrengthPolicy fit_policy(const ArgmaxTable& table, double s_max) {
  const auto& entries = table.entries;
  if (entries.size() < StrengthPolicy::kCoefficients)
    throw SweepError("fit_policy: needs at least " +
                     std::to_string(StrengthPolicy::kCoefficients) + " table entries, got " +
                     std::to_string(entries.size()));

  StrengthPolicy policy;
  policy.s_max = s_max;
  auto sigma_range = std::minmax_element(
      entries.begin(), entries.end(),
      [](const ArgmaxEntry& a, const ArgmaxEntry& b) { return a.sigma < b.sigma; });
  auto rate_range = std::minmax_element(
      entries.begin(), entries.end(),
      [](const ArgmaxEntry& a, const ArgmaxEntry& b) { return a.bitrate_kbps < b.bitrate_kbps; });
  policy.sigma_min = sigma_range.first->sigma;
  policy.sigma_max = sigma_range.second->sigma;
  policy.ln_rate_min = std::log(rate_range.first->bitrate_kbps);
  policy.ln_rate_max = std::log(rate_range.second->bitrate_kbps);
  if (!(policy.sigma_max > policy.sigma_min) || !(policy.ln_rate_max > policy.ln_rate_min))
    throw SweepError("fit_policy: table does not span both axes");

  const int n = static_cast<int>(entries.size());
  Eigen::MatrixXd a(n, StrengthPolicy::kCoefficients);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    const double nx = normalize(entries[i].sigma, policy.sigma_min, policy.sigma_max);
    const double ny = normalize(std::log(entries[i].bitrate_kbps), policy.ln_rate_min,
                                policy.ln_rate_max);
    double row[StrengthPolicy::kCoefficients];
    design_row(nx, ny, row);
    for (int c = 0; c < StrengthPolicy::kCoefficients; ++c) a(i, c) = row[c];
    b(i) = entries[i].best_strength;
  }

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < StrengthPolicy::kCoefficients)
    throw SweepError("fit_policy: rank-deficient design matrix (axes too sparse)");
  const Eigen::VectorXd x = qr.solve(b);
  policy.coefficients.assign(x.data(), x.data() + StrengthPolicy::kCoefficients);

  const Eigen::VectorXd residual = a * x - b;
  policy.fit_rmse = std::sqrt(residual.squaredNorm() / n);
  return policy;
}

double optimal_strength(const StrengthPolicy& policy, double sigma, double rate_kbps) {
  if (policy.coefficients.size() != StrengthPolicy::kCoefficients)
    throw SweepError("optimal_strength: policy has wrong coefficient count");
  const double cs = std::clamp(sigma, policy.sigma_min, policy.sigma_max);
  const double cr = std::clamp(std::log(rate_kbps), policy.ln_rate_min, policy.ln_rate_max);
  const double nx = normalize(cs, policy.sigma_min, policy.sigma_max);
  const double ny = normalize(cr, policy.ln_rate_min, policy.ln_rate_max);
  double row[StrengthPolicy::kCoefficients];
  design_row(nx, ny, row);
  double v = 0.0;
  for (int c = 0; c < StrengthPolicy::kCoefficients; ++c) v += policy.coefficients[c] * row[c];
  return std::clamp(v, 0.0, policy.s_max);
}

std::string StrengthPolicy::to_json() const {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["kind"] = "strength_policy";
  j["degree"] = kDegree;
  j["coefficients"] = coefficients;
  j["sigma_range"] = {sigma_min, sigma_max};
  j["ln_rate_range"] = {ln_rate_min, ln_rate_max};
  j["s_max"] = s_max;
  j["fit_rmse"] = fit_rmse;
  return j.dump(2);
}

StrengthPolicy StrengthPolicy::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  StrengthPolicy p;
  p.coefficients = j.at("coefficients").get<std::vector<double>>();
  p.sigma_min = j.at("sigma_range").at(0).get<double>();
  p.sigma_max = j.at("sigma_range").at(1).get<double>();
  p.ln_rate_min = j.at("ln_rate_range").at(0).get<double>();
  p.ln_rate_max = j.at("ln_rate_range").at(1).get<double>();
  p.s_max = j.at("s_max").get<double>();
  p.fit_rmse = j.value("fit_rmse", 0.0);
  return p;
}

}  // namespace clipforge
